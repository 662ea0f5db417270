#include "csm/cli_app.hpp"

#include "csm/bisim.hpp"
#include "csm/errors.hpp"
#include "csm/eval.hpp"
#include "csm/fixtures.hpp"
#include "csm/graph_io.hpp"
#include "csm/model.hpp"
#include "csm/reducer.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>
#include <optional>
#include <sstream>

namespace csm::cli {

namespace {

constexpr int kOk = 0;
constexpr int kSemanticError = 1;
constexpr int kUsageError = 2;

struct RunConfig {
    std::string system_path;
    std::string formula_path;
    bool online = false;
    bool relaxed_v = false;
    bool explain = false;
    std::uint64_t seed = 1;
    int depth = 3;
    std::size_t count = 100;
    std::size_t cap = kDefaultStateCap;
    std::size_t passes = 1;
    std::string dot_path;
    std::string dot_annotated_path;
    std::string json_path;
    std::string env;
    bool inject_fault = false; // test-only negative control

    // bench
    std::string family = "chain";
    std::vector<std::size_t> sizes;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::ios_base::failure("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::ios_base::failure("cannot open '" + path + "' for writing");
    out << content;
}

void apply_env_override(CsmSystem& sys, const std::string& env) {
    if (env.empty())
        return;
    if (env == "closed") {
        sys.environment.mode = EnvironmentMode::Closed;
        return;
    }
    if (env == "all") {
        sys.environment.mode = EnvironmentMode::AllSubsets;
        return;
    }
    if (env.rfind("fixed:", 0) == 0) {
        sys.environment.mode = EnvironmentMode::Fixed;
        sys.environment.fixed = sys.signals.empty_set();
        std::stringstream ss(env.substr(6));
        std::string name;
        while (std::getline(ss, name, ',')) {
            auto id = sys.signals.find(name);
            if (!id)
                throw ResolveError("--env fixed names unknown signal '" + name + "'");
            sys.environment.fixed.set(*id);
        }
        return;
    }
    throw ResolveError("--env expects closed|all|fixed:<sig,...>, got '" + env + "'");
}

CsmSystem load_system(const RunConfig& cfg) {
    CsmSystem sys = parse_system(read_file(cfg.system_path));
    apply_env_override(sys, cfg.env);
    return sys;
}

TemporalFormula load_formula(const RunConfig& cfg) {
    return parse_temporal(read_file(cfg.formula_path));
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
    CsmSystem sys = load_system(cfg);
    ValidationReport report = validate(sys);
    out << report.to_text();
    if (!cfg.json_path.empty())
        write_file(cfg.json_path, report.to_json().dump(2) + "\n");
    return report.pass ? kOk : kSemanticError;
}

int cmd_build(const RunConfig& cfg, std::ostream& out) {
    CsmSystem sys = load_system(cfg);
    ValidationReport report = validate(sys);
    if (!report.pass) {
        out << report.to_text();
        return kSemanticError;
    }
    Graph rg = build_rg(sys, cfg.cap);
    Graph rgm = strip_ears(rg);
    nlohmann::json sizes = {
        {"rg", {{"states", rg.states.size()}, {"arcs", rg.arc_count()}}},
        {"rg_minus_at", {{"states", rgm.states.size()}, {"arcs", rgm.arc_count()}}}};
    out << sizes.dump(2) << "\n";
    if (!cfg.json_path.empty()) {
        nlohmann::json j = {{"version", 1},
                            {"rg", graph_to_json(rg)},
                            {"rg_minus_at", graph_to_json(rgm)}};
        write_file(cfg.json_path, j.dump(2) + "\n");
    }
    if (!cfg.dot_path.empty())
        write_file(cfg.dot_path, to_dot(rgm));
    return kOk;
}

struct ReducedPipeline {
    Graph rg_minus_at; // only filled for the off-line path
    Graph rrg;
    ReductionReport report;
    PropSet props;
};

ReducedPipeline run_reduction(const RunConfig& cfg, const CsmSystem& sys,
                              const TemporalFormula& formula) {
    ReducedPipeline p;
    if (cfg.online) {
        OnlineSource source = system_source(sys, cfg.cap);
        p.props = complete_props_online(formula, *source.info, source.initial);
        ReductionContext ctx = make_reduction_context(p.props, source.info);
        ctx.relaxed_v = cfg.relaxed_v;
        ctx.max_passes = cfg.passes;
        std::tie(p.rrg, p.report) = reduce_online(source, ctx);
    } else {
        Graph rg = build_rg(sys, cfg.cap);
        p.rg_minus_at = strip_ears(rg);
        p.props = complete_props(formula, p.rg_minus_at);
        ReductionContext ctx = make_reduction_context(p.props, p.rg_minus_at.info);
        ctx.relaxed_v = cfg.relaxed_v;
        ctx.max_passes = cfg.passes;
        std::tie(p.rrg, p.report) = reduce_offline(p.rg_minus_at, ctx);
    }
    return p;
}

int cmd_reduce(const RunConfig& cfg, std::ostream& out) {
    CsmSystem sys = load_system(cfg);
    ValidationReport vreport = validate(sys);
    if (!vreport.pass) {
        out << vreport.to_text();
        return kSemanticError;
    }
    TemporalFormula formula = load_formula(cfg);
    ReducedPipeline p = run_reduction(cfg, sys, formula);
    out << p.report.to_json(cfg.explain).dump(2) << "\n";
    if (!cfg.json_path.empty()) {
        nlohmann::json j = {{"version", 1},
                            {"report", p.report.to_json(cfg.explain)},
                            {"rrg", graph_to_json(p.rrg)}};
        write_file(cfg.json_path, j.dump(2) + "\n");
    }
    if (!cfg.dot_path.empty())
        write_file(cfg.dot_path, to_dot(p.rrg));
    if (!cfg.dot_annotated_path.empty()) {
        if (cfg.online)
            throw ResolveError("--dot-annotated needs the off-line pipeline");
        write_file(cfg.dot_annotated_path, to_dot_annotated(p.rg_minus_at, p.rrg));
    }
    return kOk;
}

int cmd_diff(const RunConfig& cfg, std::ostream& out) {
    CsmSystem sys = load_system(cfg);
    ValidationReport vreport = validate(sys);
    if (!vreport.pass) {
        out << vreport.to_text();
        return kSemanticError;
    }
    TemporalFormula formula = load_formula(cfg);

    Graph rg = build_rg(sys, cfg.cap);
    Graph rgm = strip_ears(rg);
    PropSet props = complete_props(formula, rgm);

    PropSet reduction_props = props;
    if (cfg.inject_fault && !reduction_props.atoms.empty())
        reduction_props.atoms.pop_back(); // deliberately blind the reducer

    ReductionContext ctx = make_reduction_context(reduction_props, rgm.info);
    ctx.relaxed_v = cfg.relaxed_v;
    ctx.max_passes = cfg.passes;
    auto [rrg, report] = cfg.online
                             ? reduce_online(system_source(sys, cfg.cap), ctx)
                             : reduce_offline(rgm, ctx);

    std::vector<TemporalFormula> corpus =
        generate_corpus(props, cfg.depth, cfg.seed, cfg.count);
    DiffReport diff = check_theorem1(rgm, rrg, props, corpus);

    Labeling full_labels = label(rgm, props);
    Labeling reduced_labels = label(rrg, props);
    BisimCheck bisim = check_bisimilar(rgm, full_labels, rrg, reduced_labels);

    nlohmann::json j = diff.to_json();
    j["bisimilar"] = bisim.ok;
    if (!bisim.ok)
        j["bisim_offenders"] = bisim.offenders;
    j["reduction"] = report.to_json(cfg.explain);
    out << j.dump(2) << "\n";
    if (!cfg.json_path.empty())
        write_file(cfg.json_path, j.dump(2) + "\n");
    return diff.mismatches == 0 && bisim.ok ? kOk : kSemanticError;
}

CsmSystem bench_instance(const std::string& family, std::size_t n) {
    if (family == "chain")
        return fixtures::chain(n);
    if (family == "rhombus-ladder")
        return fixtures::rhombus_ladder(n);
    if (family == "near-clique")
        return fixtures::near_clique(n);
    throw ResolveError("unknown bench family '" + family + "'");
}

int cmd_bench(const RunConfig& cfg, std::ostream& out) {
    out << "family,n,states,arcs,reduce_ms,ratio\n";
    for (std::size_t n : cfg.sizes) {
        CsmSystem sys = bench_instance(cfg.family, n);
        Graph rgm = strip_ears(build_rg(sys, cfg.cap));
        PropSet props; // empty atom set: everything invisible
        ReductionContext ctx = make_reduction_context(props, rgm.info);
        ctx.record_decisions = false;

        auto start = std::chrono::steady_clock::now();
        auto [rrg, report] = reduce_offline(rgm, ctx);
        auto stop = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(stop - start).count();

        double ratio = report.ratio_den
                           ? static_cast<double>(report.ratio_num) / report.ratio_den
                           : 0.0;
        out << cfg.family << ',' << n << ',' << rgm.states.size() << ',' << rgm.arc_count()
            << ',' << ms << ',' << ratio << "\n";
    }
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"CSM reachability-graph construction, QsCTL evaluation and "
                 "invisibility-based arc reduction"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto add_common = [&](CLI::App* cmd, bool needs_system, bool needs_formula) {
        if (needs_system)
            cmd->add_option("--system", cfg.system_path, "system file")->required();
        if (needs_formula)
            cmd->add_option("--formula", cfg.formula_path, "formula file")->required();
        cmd->add_option("--cap", cfg.cap, "state cap");
        cmd->add_option("--json", cfg.json_path, "write JSON output here");
        cmd->add_option("--env", cfg.env, "override environment: closed|all|fixed:<sigs>");
    };

    CLI::App* validate_cmd = app.add_subcommand("validate", "check completeness");
    add_common(validate_cmd, true, false);

    CLI::App* build_cmd = app.add_subcommand("build", "build RG and RG-@");
    add_common(build_cmd, true, false);
    build_cmd->add_option("--dot", cfg.dot_path, "write DOT here");

    CLI::App* reduce_cmd = app.add_subcommand("reduce", "reduce invisible arcs");
    add_common(reduce_cmd, true, true);
    reduce_cmd->add_flag("--online", cfg.online, "reduce while discovering states");
    reduce_cmd->add_flag("--relaxed-v", cfg.relaxed_v, "relaxed protected-state exception");
    reduce_cmd->add_flag("--explain", cfg.explain, "include per-arc decisions in reports");
    reduce_cmd->add_option("--passes", cfg.passes, "re-reduce until stable, at most this often");
    reduce_cmd->add_option("--dot", cfg.dot_path, "write RRG DOT here");
    reduce_cmd->add_option("--dot-annotated", cfg.dot_annotated_path,
                           "write annotated full-graph DOT here");

    CLI::App* diff_cmd = app.add_subcommand("diff", "differential check of the reduction");
    add_common(diff_cmd, true, true);
    diff_cmd->add_flag("--online", cfg.online, "use the on-line reducer");
    diff_cmd->add_flag("--relaxed-v", cfg.relaxed_v, "relaxed protected-state exception");
    diff_cmd->add_flag("--explain", cfg.explain, "include per-arc decisions in reports");
    diff_cmd->add_option("--passes", cfg.passes, "reduction passes");
    diff_cmd->add_option("--seed", cfg.seed, "corpus seed");
    diff_cmd->add_option("--depth", cfg.depth, "corpus formula depth");
    diff_cmd->add_option("--count", cfg.count, "corpus size");
    diff_cmd->add_flag("--inject-fault", cfg.inject_fault,
                       "drop one atom from the reducer's label set (negative control)")
        ->group(""); // hidden
    CLI::App* bench_cmd = app.add_subcommand("bench", "timing table for generated families");
    bench_cmd->add_option("--family", cfg.family, "chain|rhombus-ladder|near-clique");
    bench_cmd->add_option("--sizes", cfg.sizes, "instance sizes")->delimiter(',');
    bench_cmd->add_option("--cap", cfg.cap, "state cap");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            out << app.help();
            return kOk;
        }
        err << e.what() << "\n";
        return kUsageError;
    }

    try {
        if (validate_cmd->parsed())
            return cmd_validate(cfg, out);
        if (build_cmd->parsed())
            return cmd_build(cfg, out);
        if (reduce_cmd->parsed())
            return cmd_reduce(cfg, out);
        if (diff_cmd->parsed())
            return cmd_diff(cfg, out);
        if (bench_cmd->parsed())
            return cmd_bench(cfg, out);
    } catch (const std::ios_base::failure& e) {
        err << "i/o error: " << e.what() << "\n";
        return kUsageError;
    } catch (const LimitError& e) {
        err << "limit: " << e.what() << " (states seen: " << e.states_seen()
            << ", arcs seen: " << e.arcs_seen() << ")\n";
        return kSemanticError;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kSemanticError;
    } catch (const ResolveError& e) {
        err << "resolve error: " << e.what() << "\n";
        return kSemanticError;
    }
    return kUsageError;
}

} // namespace csm::cli
