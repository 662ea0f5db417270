#include "csm/bisim.hpp"
#include "csm/graph_io.hpp"
#include "csm/reducer.hpp"

#include "csm/fixtures.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <functional>

using namespace csm;

namespace {

struct Instance {
    CsmSystem sys;
    Graph rgm;
    PropSet props;
    Labeling labels;

    Instance(CsmSystem system, const std::string& formula)
        : sys(std::move(system)), rgm(strip_ears(build_rg(sys))),
          props(complete_props(parse_temporal(formula), rgm)),
          labels(label(rgm, props)) {}

    std::pair<Graph, Labeling> reduce() {
        ReductionContext ctx = make_reduction_context(props, rgm.info);
        auto [rrg, report] = reduce_offline(rgm, ctx);
        Labeling lr = label(rrg, props);
        return {std::move(rrg), std::move(lr)};
    }
};

} // namespace

TEST_CASE("a graph is bisimilar to its own copy, state by state") {
    Instance inst(fixtures::rhombus_ladder(2), "AG q");
    Partition part = stuttering_classes(inst.rgm, inst.labels, inst.rgm, inst.labels);
    for (std::uint32_t s = 0; s < inst.rgm.states.size(); ++s)
        CHECK(part.block(false, s) == part.block(true, s));
    CHECK(check_bisimilar(inst.rgm, inst.labels, inst.rgm, inst.labels).ok);
}

TEST_CASE("chain blocks: skipped middle state joins its predecessor") {
    // full: si -> sj -> sk(ear); reduced: si -> sk(ear); labels si = sj.
    Instance inst(fixtures::chain(3, true), "AG t");
    auto [rrg, lr] = inst.reduce();
    REQUIRE(rrg.states.size() == 2);
    Partition part = stuttering_classes(inst.rgm, inst.labels, rrg, lr);
    auto full_si = *inst.rgm.find(StateTuple{0});
    auto full_sj = *inst.rgm.find(StateTuple{1});
    auto red_si = *rrg.find(StateTuple{0});
    CHECK(part.block(false, full_si) == part.block(false, full_sj));
    CHECK(part.block(false, full_si) == part.block(true, red_si));
    // the marked terminal is in a different block
    auto full_sk = *inst.rgm.find(StateTuple{2});
    CHECK(part.block(false, full_sk) != part.block(false, full_si));
}

TEST_CASE("rhombus blocks: tops and bottoms pair up across graphs") {
    Instance inst(fixtures::rhombus(), "AG q");
    auto [rrg, lr] = inst.reduce();
    Partition part = stuttering_classes(inst.rgm, inst.labels, rrg, lr);
    auto fsi = *inst.rgm.find(StateTuple{0});
    auto fsk = *inst.rgm.find(StateTuple{3});
    auto rsi = *rrg.find(StateTuple{0});
    auto rsk = *rrg.find(StateTuple{3});
    CHECK(part.block(false, fsi) == part.block(true, rsi));
    CHECK(part.block(false, fsk) == part.block(true, rsk));
    CHECK(check_bisimilar(inst.rgm, inst.labels, rrg, lr).ok);
}

TEST_CASE("asymmetry guard: an extra successor separates the skipped state") {
    // si -> {sj, sn}; sj -> sk1; sn and sk1 terminal, distinct labels.
    CsmSystem sys = fixtures::single_automaton(
        "asym", {{"si", {}}, {"sj", {}}, {"sn", {"r"}}, {"sk1", {"q"}}},
        {{"si", "sj"}, {"si", "sn"}, {"sj", "sk1"}, {"sn", "sn"}, {"sk1", "sk1"}});
    Instance inst(sys, "AG (q | r)");
    ReductionContext ctx = make_reduction_context(inst.props, inst.rgm.info);
    auto [rrg, report] = reduce_offline(inst.rgm, ctx);
    // sj was skippable (arc si->sj invisible, no restriction bites)
    REQUIRE_FALSE(rrg.find(StateTuple{1}).has_value());

    Labeling lr = label(rrg, inst.props);
    Partition part = stuttering_classes(inst.rgm, inst.labels, rrg, lr);
    auto full_sj = *inst.rgm.find(StateTuple{1});
    auto red_si = *rrg.find(StateTuple{0});
    // sj must NOT share a block with the reduced si'
    CHECK(part.block(false, full_sj) != part.block(true, red_si));
    // while the surviving namesakes still match
    CHECK(check_bisimilar(inst.rgm, inst.labels, rrg, lr).ok);
}

TEST_CASE("a deliberately broken reduction is detected") {
    // drop a visible arc: remove the rhombus diameter's visible target arcs
    Instance inst(fixtures::chain(3, true), "AG t");
    Graph broken;
    broken.kind = GraphKind::RRG;
    broken.info = inst.rgm.info;
    // keep only s0 with a fake ear: collapses distinct behaviors
    broken.initial = broken.add_state(inst.rgm.states[inst.rgm.initial]);
    broken.add_arc(0, 0);
    Labeling lb = label(broken, inst.props);
    BisimCheck check = check_bisimilar(inst.rgm, inst.labels, broken, lb);
    CHECK_FALSE(check.ok);
    CHECK_FALSE(check.offenders.empty());
}

TEST_CASE("a skipped state blocks with its bypassing predecessor, or the "
          "predecessor has behavior of its own") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        CsmSystem sys = fixtures::random_system(seed);
        Graph rgm = strip_ears(build_rg(sys));
        PropSet props =
            complete_props(fixtures::random_base_formula(sys, seed * 7 + 1), rgm);
        ReductionContext ctx = make_reduction_context(props, rgm.info);
        auto [rrg, rep] = reduce_offline(rgm, ctx);
        if (rep.skipped_states.empty())
            continue;
        Labeling lf = label(rgm, props);
        Partition part = stuttering_classes(rgm, lf, rgm, lf);
        for (const auto& [u, v] : rep.removed_arcs) {
            if (rrg.find(v))
                continue; // target survived elsewhere
            auto iu = rgm.find(u), iv = rgm.find(v);
            REQUIRE(iu);
            REQUIRE(iv);
            bool same_block = part.block(false, *iu) == part.block(false, *iv);
            if (same_block)
                continue;
            // the only sanctioned exception: u has a successor that is
            // neither v nor one of v's successors
            bool extra = false;
            for (std::uint32_t w : rgm.succ[*iu])
                if (w != *iv && !rgm.has_arc(*iv, w))
                    extra = true;
            CHECK(extra);
        }
    }
}

TEST_CASE("the off-line pass attempts boundedly many candidates") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        CsmSystem sys = fixtures::random_system(seed);
        Graph rgm = strip_ears(build_rg(sys));
        PropSet props;
        ReductionContext ctx = make_reduction_context(props, rgm.info);
        auto [rrg, rep] = reduce_offline(rgm, ctx);
        std::size_t n = rgm.states.size();
        CHECK(rep.decisions.size() <= 2 * n * n);
    }
}

TEST_CASE("refinement terminates within the state-count bound") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Instance inst(fixtures::random_system(seed), "AG 1");
        Partition part =
            stuttering_classes(inst.rgm, inst.labels, inst.rgm, inst.labels);
        CHECK(part.block_count <= 2 * inst.rgm.states.size());
        for (std::uint32_t b : part.block_of)
            CHECK(b < part.block_count);
    }
}

TEST_CASE("corpus generation is deterministic and depth-bounded") {
    Instance inst(fixtures::rhombus(), "AG q");
    auto a = generate_corpus(inst.props, 3, 42, 50);
    auto b = generate_corpus(inst.props, 3, 42, 50);
    REQUIRE(a.size() == 50);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i] == b[i]);

    auto different = generate_corpus(inst.props, 3, 43, 50);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        any_diff = any_diff || !(a[i] == different[i]);
    CHECK(any_diff);

    // depth 0 stays at literals
    PropSet simple;
    simple.atoms = {AtomicProp::make_signal("q")};
    for (const TemporalFormula& f : generate_corpus(simple, 0, 7, 20)) {
        bool literal = f.op() == TOp::Atom ||
                       (f.op() == TOp::Not && f.lhs().op() == TOp::Atom) ||
                       f.op() == TOp::ConstTrue || f.op() == TOp::ConstFalse;
        CHECK(literal);
    }
}

TEST_CASE("corpus anchors next-step operators only at in-state members") {
    Instance inst(fixtures::rhombus(), "@<M.si> AX q");
    REQUIRE(inst.props.has_atom(
        AtomicProp::make_in_state(Designator{{{"M", "si"}}})));
    auto corpus = generate_corpus(inst.props, 4, 11, 200);
    // every AX/AXa occurrence sits directly under an @-anchor
    std::function<void(const TemporalFormula&, bool)> walk =
        [&](const TemporalFormula& f, bool anchored) {
            switch (f.op()) {
            case TOp::AX:
            case TOp::AXa:
                CHECK(anchored);
                walk(f.lhs(), false);
                return;
            case TOp::At:
                walk(f.lhs(), true);
                return;
            case TOp::And:
            case TOp::Or:
            case TOp::Implies:
            case TOp::AW:
                walk(f.lhs(), false);
                walk(f.rhs(), false);
                return;
            case TOp::Not:
            case TOp::AG:
            case TOp::AF:
                walk(f.lhs(), false);
                return;
            default:
                return;
            }
        };
    for (const TemporalFormula& f : corpus)
        walk(f, false);
}

TEST_CASE("theorem 1 differential: identical graphs never mismatch") {
    Instance inst(fixtures::rhombus(), "AX AX q"); // reduction disabled
    ReductionContext ctx = make_reduction_context(inst.props, inst.rgm.info);
    auto [rrg, report] = reduce_offline(inst.rgm, ctx);
    auto corpus = generate_corpus(inst.props, 3, 5, 60);
    DiffReport diff = check_theorem1(inst.rgm, rrg, inst.props, corpus);
    CHECK(diff.mismatches == 0);
    CHECK(diff.states_compared == inst.rgm.states.size());
}

TEST_CASE("theorem 1 differential: rhombus instance has zero mismatches") {
    Instance inst(fixtures::rhombus(), "AG q");
    auto [rrg, lr] = inst.reduce();
    auto corpus = generate_corpus(inst.props, 3, 9, 100);
    DiffReport diff = check_theorem1(inst.rgm, rrg, inst.props, corpus);
    CHECK(diff.mismatches == 0);
    nlohmann::json j = diff.to_json();
    CHECK(j["mismatches"] == 0);
    CHECK(j["formulas"].size() == 100);
}

TEST_CASE("fault injection: a blinded reducer is caught by the oracles") {
    // A marked state in the middle of the chain: a reducer that ignores
    // the marking skips it and loses `every path passes t`.
    CsmSystem sys = fixtures::single_automaton(
        "marked", {{"s0", {}}, {"s1", {"t"}}, {"s2", {}}},
        {{"s0", "s1"}, {"s1", "s2"}, {"s2", "s2"}});
    Instance inst(sys, "AF t");
    PropSet blinded; // no atoms at all
    ReductionContext ctx = make_reduction_context(blinded, inst.rgm.info);
    auto [rrg, report] = reduce_offline(inst.rgm, ctx);
    REQUIRE_FALSE(rrg.find(StateTuple{1}).has_value()); // the fault fired

    auto corpus = generate_corpus(inst.props, 3, 21, 80);
    DiffReport diff = check_theorem1(inst.rgm, rrg, inst.props, corpus);
    bool caught = diff.mismatches > 0;
    Labeling lr = label(rrg, inst.props);
    bool caught_by_bisim = !check_bisimilar(inst.rgm, inst.labels, rrg, lr).ok;
    CHECK(caught);
    CHECK(caught_by_bisim);
}
