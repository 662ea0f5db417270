// Acceptance suite: runs every top-level criterion and prints one
// pass/fail line each. Exit status is nonzero if any gating criterion
// fails (the complexity-trend criterion is advisory).
//
// Usage: csm_acceptance [--data-dir <dir>] [--update-snapshots]

#include "csm/bisim.hpp"
#include "csm/eval.hpp"
#include "csm/graph_io.hpp"
#include "csm/reducer.hpp"

#include "csm/fixtures.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace csm;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Criterion {
    int id;
    std::string name;
    bool pass = false;
    bool advisory = false;
    double ms = 0;
    std::string note;
};

std::vector<Criterion> results;

void report(int id, const std::string& name, bool pass, double ms,
            const std::string& note = "", bool advisory = false) {
    results.push_back({id, name, pass, advisory, ms, note});
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << id << ": " << name
              << " (" << std::fixed << std::setprecision(2) << ms << " ms)";
    if (!note.empty())
        std::cout << " -- " << note;
    if (advisory)
        std::cout << " [advisory]";
    std::cout << "\n";
}

std::set<std::pair<std::string, std::string>> arc_names(const Graph& g) {
    std::set<std::pair<std::string, std::string>> out;
    for (std::uint32_t s = 0; s < g.states.size(); ++s)
        for (std::uint32_t d : g.succ[s])
            out.emplace(g.state_name(s), g.state_name(d));
    return out;
}

// ---------------------------------------------------------------------------

void criterion_output_union() {
    CsmSystem sys = parse_system(R"(
system unions
automaton A {
  state 1 init outputs { p q }
  state 2
  arc 1 -> 2 when 1
  arc 2 -> 2 when 1
}
automaton B {
  state 3 init outputs { q m }
  state 4
  arc 3 -> 4 when 1
  arc 4 -> 4 when 1
}
)");
    auto start = Clock::now();
    SignalSet outs = tuple_outputs(sys, StateTuple{0, 0});
    double ms = ms_since(start);
    auto names = sys.signals.names_of(outs);
    bool pass = std::set<std::string>(names.begin(), names.end()) ==
                    std::set<std::string>{"p", "q", "m"} &&
                ms < 1.0;
    report(1, "output-union exactness", pass, ms);
}

void criterion_rhombus() {
    auto start = Clock::now();
    CsmSystem sys = fixtures::rhombus();
    Graph rgm = strip_ears(build_rg(sys));
    PropSet props = complete_props(parse_temporal("AG q"), rgm);
    ReductionContext ctx = make_reduction_context(props, rgm.info);
    auto [rrg, rep] = reduce_offline(rgm, ctx);
    double ms = ms_since(start);

    bool arcs_ok = arc_names(rrg) == std::set<std::pair<std::string, std::string>>{
                                         {"(si)", "(sk1)"}, {"(sk1)", "(sk1)"}};
    std::set<std::string> skipped;
    for (const auto& t : rep.skipped_states)
        skipped.insert(rgm.info->tuple_name(t));
    bool skipped_ok = skipped == std::set<std::string>{"(sj1)", "(sj2)"};
    report(2, "rhombus-with-diameter reduces to the diameter",
           arcs_ok && skipped_ok && ms < 1000.0, ms);
}

// Shared run over the generated suite, feeding criteria 3, 4, 5 and 9.
struct SuiteOutcome {
    std::size_t instances = 0;
    std::size_t formulas = 0;
    std::size_t mismatches = 0;        // criterion 3
    std::size_t bisim_failures = 0;    // criterion 4
    std::size_t ears_introduced = 0;   // criterion 5
    std::size_t protected_skipped = 0; // criterion 5
    std::size_t visible_removed = 0;   // criterion 5
    std::size_t snapshot_diffs = 0;    // criterion 9
    double diff_ms = 0;
    double bisim_ms = 0;
    double online_ms = 0;
    std::string first_failure;
};

SuiteOutcome run_suite(std::size_t instances, std::size_t corpus_size) {
    SuiteOutcome out;
    for (std::uint64_t seed = 1; seed <= instances; ++seed) {
        CsmSystem sys = fixtures::random_system(seed);
        if (!validate(sys).pass)
            continue;
        Graph rgm = strip_ears(build_rg(sys));
        TemporalFormula base = fixtures::random_base_formula(sys, seed * 7 + 1);
        PropSet props = complete_props(base, rgm);
        ReductionContext ctx = make_reduction_context(props, rgm.info);
        auto [rrg, rep] = reduce_offline(rgm, ctx);
        Labeling full_labels = label(rgm, props);
        ++out.instances;

        // 3: differential corpus
        auto t0 = Clock::now();
        auto corpus = generate_corpus(props, 3, 1000 + seed, corpus_size);
        DiffReport diff = check_theorem1(rgm, rrg, props, corpus);
        out.formulas += corpus.size();
        if (diff.mismatches) {
            out.mismatches += diff.mismatches;
            if (out.first_failure.empty())
                for (const auto& v : diff.verdicts)
                    if (!v.match) {
                        out.first_failure =
                            "seed " + std::to_string(seed) + ": " + v.text;
                        break;
                    }
        }
        out.diff_ms += ms_since(t0);

        // 4: partition oracle
        t0 = Clock::now();
        Labeling reduced_labels = label(rrg, props);
        if (!check_bisimilar(rgm, full_labels, rrg, reduced_labels).ok) {
            ++out.bisim_failures;
            if (out.first_failure.empty())
                out.first_failure = "seed " + std::to_string(seed) + ": bisim";
        }
        out.bisim_ms += ms_since(t0);

        // 5: restriction audit
        for (std::uint32_t s = 0; s < rrg.states.size(); ++s)
            if (rrg.has_ear(s)) {
                auto o = rgm.find(rrg.states[s].components);
                if (!o || !rgm.has_ear(*o))
                    ++out.ears_introduced;
            }
        for (const auto& [u, v] : rep.removed_arcs) {
            auto iu = rgm.find(u);
            auto iv = rgm.find(v);
            if (!iu || !iv || !is_invisible(rgm, *iu, *iv, full_labels))
                ++out.visible_removed;
        }
        for (const auto& t : rep.skipped_states)
            if (ctx.protected_states.count(t)) {
                // must be justified by an exception-v reduce decision
                bool justified = false;
                for (const Decision& d : rep.decisions)
                    if (d.via == t && d.all_reduced() && !d.verdicts.empty() &&
                        d.verdicts.front().reason == Reason::exception_v)
                        justified = true;
                if (!justified)
                    ++out.protected_skipped;
            }

        // 9: on-line equivalence
        t0 = Clock::now();
        OnlineSource source = system_source(sys);
        PropSet online_props =
            complete_props_online(base, *source.info, source.initial);
        ReductionContext octx = make_reduction_context(online_props, source.info);
        auto [online_rrg, online_rep] = reduce_online(source, octx);
        if (canonical_snapshot(online_rrg) != canonical_snapshot(rrg)) {
            ++out.snapshot_diffs;
            if (out.first_failure.empty())
                out.first_failure = "seed " + std::to_string(seed) + ": online snapshot";
        }
        out.online_ms += ms_since(t0);
    }
    return out;
}

void criterion_asymmetry(double& extra_ms, bool& guard_ok) {
    auto t0 = Clock::now();
    CsmSystem sys = fixtures::single_automaton(
        "asym", {{"si", {}}, {"sj", {}}, {"sn", {"r"}}, {"sk1", {"q"}}},
        {{"si", "sj"}, {"si", "sn"}, {"sj", "sk1"}, {"sn", "sn"}, {"sk1", "sk1"}});
    Graph rgm = strip_ears(build_rg(sys));
    PropSet props = complete_props(parse_temporal("AG (q | r)"), rgm);
    ReductionContext ctx = make_reduction_context(props, rgm.info);
    auto [rrg, rep] = reduce_offline(rgm, ctx);
    Labeling lf = label(rgm, props);
    Labeling lr = label(rrg, props);
    guard_ok = false;
    if (!rrg.find(StateTuple{1}) && check_bisimilar(rgm, lf, rrg, lr).ok) {
        Partition part = stuttering_classes(rgm, lf, rrg, lr);
        auto full_sj = rgm.find(StateTuple{1});
        auto red_si = rrg.find(StateTuple{0});
        guard_ok = full_sj && red_si &&
                   part.block(false, *full_sj) != part.block(true, *red_si);
    }
    extra_ms = ms_since(t0);
}

void criterion_cycles(const std::string& data_dir, bool update_snapshots) {
    auto start = Clock::now();
    nlohmann::json snaps;
    snaps["version"] = 1;
    bool oracle_ok = true;
    std::string note;
    for (std::size_t k = 3; k <= 10; ++k) {
        CsmSystem sys = fixtures::cycle(k);
        Graph rgm = strip_ears(build_rg(sys));
        PropSet props = complete_props(parse_temporal("AG 1"), rgm);
        ReductionContext ctx = make_reduction_context(props, rgm.info);
        auto [rrg, rep] = reduce_offline(rgm, ctx);
        Labeling lf = label(rgm, props);
        Labeling lr = label(rrg, props);
        if (!check_bisimilar(rgm, lf, rrg, lr).ok)
            oracle_ok = false;
        DiffReport diff =
            check_theorem1(rgm, rrg, props, generate_corpus(props, 3, 77 + k, 50));
        if (diff.mismatches)
            oracle_ok = false;
        snaps["cycles"][std::to_string(k)] = canonical_snapshot(rrg);
    }

    std::string path = data_dir + "/cycle_snapshots.json";
    bool snapshot_ok = false;
    if (update_snapshots && oracle_ok) {
        std::ofstream(path) << snaps.dump(2) << "\n";
        snapshot_ok = true;
        note = "snapshots rewritten";
    } else {
        std::ifstream in(path);
        if (!in) {
            note = "missing " + path + " (run with --update-snapshots once)";
        } else {
            nlohmann::json stored = nlohmann::json::parse(in, nullptr, false);
            snapshot_ok = !stored.is_discarded() && stored == snaps;
            if (!snapshot_ok)
                note = "snapshot drift against " + path;
        }
    }
    double ms = ms_since(start);
    report(6, "cycle families terminate, match oracles and the stored snapshot",
           oracle_ok && snapshot_ok && ms < 10000.0, ms, note);
}

void criterion_completion_rules() {
    auto start = Clock::now();
    CsmSystem sys = parse_system(R"(
system pair
automaton A {
  state 1 init outputs { p }
  state 2
  arc 1 -> 2 when 1
  arc 2 -> 2 when 1
}
automaton B {
  state 3 init outputs { q }
  state 4
  arc 3 -> 4 when 1
  arc 4 -> 4 when 1
}
)");
    Graph g = strip_ears(build_rg(sys));

    PropSet anchored = complete_props(parse_temporal("@<A.1,B.3> AX p"), g);
    bool rule_i =
        anchored.reduction_allowed &&
        anchored.has_atom(
            AtomicProp::make_in_state(Designator{{{"A", "1"}, {"B", "3"}}}));

    bool rule_ii = !complete_props(parse_temporal("AX AX p"), g).reduction_allowed;

    PropSet proj = complete_props(parse_temporal("AG (AX@A p)"), g);
    bool rule_iv = proj.reduction_allowed &&
                   proj.has_atom(AtomicProp::make_in_proj("A", "1")) &&
                   proj.has_atom(AtomicProp::make_in_proj("A", "2"));

    double ms = ms_since(start);
    std::string note;
    if (!rule_i)
        note = "anchored next did not add its in-state atom";
    else if (!rule_ii)
        note = "nested next failed to disable reduction";
    else if (!rule_iv)
        note = "non-static next-in-automaton missed projection atoms";
    report(7, "completion rules add atoms and gate reduction",
           rule_i && rule_ii && rule_iv, ms, note);
}

double reduce_time_ms(const CsmSystem& sys) {
    Graph rgm = strip_ears(build_rg(sys));
    PropSet props;
    ReductionContext ctx = make_reduction_context(props, rgm.info);
    ctx.record_decisions = false;
    double best = 1e18;
    for (int rep = 0; rep < 3; ++rep) {
        auto t0 = Clock::now();
        auto [rrg, r] = reduce_offline(rgm, ctx);
        best = std::min(best, ms_since(t0));
    }
    return best;
}

double loglog_slope(const std::vector<std::pair<double, double>>& points) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : points) {
        double lx = std::log(x), ly = std::log(std::max(y, 1e-6));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double n = static_cast<double>(points.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void criterion_complexity_trend() {
    auto start = Clock::now();
    std::vector<std::pair<double, double>> chain_points;
    for (std::size_t n : {100, 200, 400, 800, 1600, 2000})
        chain_points.emplace_back(double(n), reduce_time_ms(fixtures::chain(n)));
    double chain_slope = loglog_slope(chain_points);

    std::vector<std::pair<double, double>> clique_points;
    for (std::size_t n : {16, 24, 32, 48, 64, 96})
        clique_points.emplace_back(double(n), reduce_time_ms(fixtures::near_clique(n)));
    double clique_slope = loglog_slope(clique_points);

    double ms = ms_since(start);
    std::ostringstream note;
    note << "chain slope " << std::setprecision(3) << chain_slope
         << " (< 1.4), near-clique slope " << clique_slope << " (< 3.3)";
    report(8, "complexity trend envelopes", chain_slope < 1.4 && clique_slope < 3.3,
           ms, note.str(), /*advisory=*/true);
}

} // namespace

int main(int argc, char** argv) {
    std::string data_dir = "tests/data";
    bool update_snapshots = false;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--data-dir" && i + 1 < argc)
            data_dir = argv[++i];
        else if (arg == "--update-snapshots")
            update_snapshots = true;
    }

    criterion_output_union();
    criterion_rhombus();

    auto suite_start = Clock::now();
    SuiteOutcome suite = run_suite(200, 100);
    double suite_ms = ms_since(suite_start);

    {
        std::ostringstream note;
        note << suite.instances << " systems, " << suite.formulas << " formulas, "
             << suite.mismatches << " mismatches";
        if (!suite.first_failure.empty())
            note << " (first: " << suite.first_failure << ")";
        report(3, "theorem-1 differential suite",
               suite.mismatches == 0 && suite_ms < 300000.0, suite.diff_ms, note.str());
    }
    {
        double extra_ms = 0;
        bool guard_ok = false;
        criterion_asymmetry(extra_ms, guard_ok);
        std::ostringstream note;
        note << suite.bisim_failures << " bisim failures, asymmetry guard "
             << (guard_ok ? "held" : "violated");
        report(4, "stuttering oracle over the suite",
               suite.bisim_failures == 0 && guard_ok &&
                   (suite.bisim_ms + extra_ms) < 60000.0,
               suite.bisim_ms + extra_ms, note.str());
    }
    {
        std::ostringstream note;
        note << suite.ears_introduced << " new ears, " << suite.protected_skipped
             << " unjustified protected skips, " << suite.visible_removed
             << " visible removals";
        report(5, "restriction audit across the suite",
               suite.ears_introduced == 0 && suite.protected_skipped == 0 &&
                   suite.visible_removed == 0,
               0.0, note.str());
    }

    criterion_cycles(data_dir, update_snapshots);
    criterion_completion_rules();
    criterion_complexity_trend();

    {
        std::ostringstream note;
        note << suite.snapshot_diffs << " snapshot differences over " << suite.instances
             << " systems";
        report(9, "on-line and off-line reducers agree", suite.snapshot_diffs == 0,
               suite.online_ms, note.str());
    }

    bool ok = true;
    for (const Criterion& c : results)
        if (!c.pass && !c.advisory)
            ok = false;
    std::cout << (ok ? "ACCEPTANCE: all gating criteria passed\n"
                     : "ACCEPTANCE: FAILURES present\n");
    return ok ? 0 : 1;
}
