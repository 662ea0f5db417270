#include "csm/errors.hpp"
#include "csm/eval.hpp"
#include "csm/graph.hpp"
#include "csm/temporal.hpp"

#include "csm/fixtures.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace csm;

namespace {

Graph two_state_chain() {
    // s0 -> s1, ear at s1; q only at s1.
    CsmSystem sys = fixtures::single_automaton(
        "chain2", {{"s0", {}}, {"s1", {"q"}}}, {{"s0", "s1"}, {"s1", "s1"}});
    return strip_ears(build_rg(sys));
}

Graph pair_graph() {
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
    return strip_ears(build_rg(sys));
}

} // namespace

TEST_CASE("temporal parsing builds the expected shapes") {
    CHECK(parse_temporal("AG (p -> AF q)") ==
          TemporalFormula::always(TemporalFormula::implication(
              TemporalFormula::atom(AtomicProp::make_signal("p")),
              TemporalFormula::eventually(TemporalFormula::atom(AtomicProp::make_signal("q"))))));

    TemporalFormula q = parse_temporal("forall s in {<A.1,B.3>}: @s AX p");
    REQUIRE(q.op() == TOp::Quant);
    CHECK(q.is_forall());
    CHECK(q.var() == "s");
    CHECK(q.range().kind == QuantRange::Kind::Explicit);
    REQUIRE(q.lhs().op() == TOp::At);
    CHECK(q.lhs().at_ref().is_var());
    CHECK(q.lhs().lhs().op() == TOp::AX);

    CHECK(parse_temporal("A[ p W q ]") ==
          TemporalFormula::weak_until(TemporalFormula::atom(AtomicProp::make_signal("p")),
                                      TemporalFormula::atom(AtomicProp::make_signal("q"))));

    CHECK(parse_temporal("AX@A p") ==
          TemporalFormula::next_in("A", TemporalFormula::atom(AtomicProp::make_signal("p"))));

    CHECK(parse_temporal("in A.1") ==
          TemporalFormula::atom(AtomicProp::make_in_proj("A", "1")));
}

TEST_CASE("temporal parse rejects unbound variables and bad syntax") {
    CHECK_THROWS_AS(parse_temporal("@s p"), ParseError);
    CHECK_THROWS_AS(parse_temporal("in s"), ParseError);
    CHECK_THROWS_AS(parse_temporal("AG"), ParseError);
    CHECK_THROWS_AS(parse_temporal("A[ p q ]"), ParseError);
    CHECK_THROWS_AS(parse_temporal("forall s in bogus: @s p"), ParseError);
    CHECK_THROWS_AS(parse_temporal("p p"), ParseError);
}

TEST_CASE("temporal printing round-trips") {
    for (const char* text : {
             "AG (p -> AF q)",
             "A[ p & !q W AG r ]",
             "forall s in {<A.1,B.3>, <A.2,B.4>}: @s AX p",
             "exists v in FUT(<A.1,B.3>): @v in <A.1,B.3>",
             "AX@A (p | q)",
             "@<A.1,B.3> AX AX p",
             "in { <A.1,B.3>, <A.2,B.4> } -> in B.4",
         }) {
        TemporalFormula f = parse_temporal(text);
        CHECK(parse_temporal(f.to_string()) == f);
    }
}

TEST_CASE("collect_atoms gathers syntactic atoms") {
    auto atoms = collect_atoms(parse_temporal("AG (p -> AF q)"));
    CHECK(atoms == std::vector<AtomicProp>{AtomicProp::make_signal("p"),
                                           AtomicProp::make_signal("q")});

    atoms = collect_atoms(parse_temporal("in <A.1,B.3>"));
    REQUIRE(atoms.size() == 1);
    CHECK(atoms[0].kind == AtomicProp::Kind::InState);

    atoms = collect_atoms(parse_temporal("in A.1"));
    REQUIRE(atoms.size() == 1);
    CHECK(atoms[0] == AtomicProp::make_in_proj("A", "1"));

    // variable `in` occurrences expand over explicit ranges
    atoms = collect_atoms(parse_temporal("forall s in {<A.1,B.3>, <A.2,B.4>}: in s"));
    CHECK(atoms.size() == 2);
}

TEST_CASE("completion: anchored next adds the in-state atom") {
    Graph g = pair_graph();
    PropSet props = complete_props(parse_temporal("@<A.1,B.3> AX p"), g);
    CHECK(props.reduction_allowed);
    CHECK(props.has_atom(AtomicProp::make_in_state(Designator{{{"A", "1"}, {"B", "3"}}})));
    // the at-target is protected
    CHECK(props.protected_states ==
          std::vector<Designator>{Designator{{{"A", "1"}, {"B", "3"}}}});
}

TEST_CASE("completion: a bare next refers to the initial state") {
    Graph g = pair_graph();
    PropSet props = complete_props(parse_temporal("AX p"), g);
    CHECK(props.reduction_allowed);
    CHECK(props.has_atom(AtomicProp::make_in_state(Designator{{{"A", "1"}, {"B", "3"}}})));
}

TEST_CASE("completion: nested or non-static next disables reduction") {
    Graph g = pair_graph();
    CHECK_FALSE(complete_props(parse_temporal("AX AX p"), g).reduction_allowed);
    CHECK_FALSE(complete_props(parse_temporal("AG (AX p)"), g).reduction_allowed);
    CHECK(complete_props(parse_temporal("AG (@<A.1,B.3> AX p)"), g).reduction_allowed);
}

TEST_CASE("completion: next-in-automaton adds projection atoms") {
    Graph g = pair_graph();
    // static reference: only the referenced projection
    PropSet stat = complete_props(parse_temporal("@<A.2,B.4> AX@A p"), g);
    CHECK(stat.reduction_allowed);
    CHECK(stat.has_atom(AtomicProp::make_in_proj("A", "2")));
    CHECK_FALSE(stat.has_atom(AtomicProp::make_in_proj("A", "1")));

    // non-static reference: every component state of the automaton
    PropSet dyn = complete_props(parse_temporal("AG (AX@A p)"), g);
    CHECK(dyn.reduction_allowed);
    CHECK(dyn.has_atom(AtomicProp::make_in_proj("A", "1")));
    CHECK(dyn.has_atom(AtomicProp::make_in_proj("A", "2")));
}

TEST_CASE("completion: non-static quantifier ranges disable reduction") {
    Graph g = pair_graph();
    PropSet props =
        complete_props(parse_temporal("forall s in FUT(<A.1,B.3>): @s p"), g);
    CHECK_FALSE(props.reduction_allowed);

    PropSet stat = complete_props(
        parse_temporal("forall s in {<A.1,B.3>, <A.2,B.4>}: @s p"), g);
    CHECK(stat.reduction_allowed);
    CHECK(stat.protected_states.size() == 2);
}

TEST_CASE("completion: quantified next over a static range adds every member") {
    Graph g = pair_graph();
    PropSet props = complete_props(
        parse_temporal("forall s in {<A.1,B.3>, <A.2,B.4>}: @s AX p"), g);
    CHECK(props.reduction_allowed);
    CHECK(props.has_atom(AtomicProp::make_in_state(Designator{{{"A", "1"}, {"B", "3"}}})));
    CHECK(props.has_atom(AtomicProp::make_in_state(Designator{{{"A", "2"}, {"B", "4"}}})));
}

TEST_CASE("completion is monotone over collected atoms") {
    Graph g = pair_graph();
    for (const char* text : {"AG (p -> AF q)", "@<A.1,B.3> AX p", "AX@A q",
                             "A[ p W in <A.2,B.4> ]"}) {
        TemporalFormula f = parse_temporal(text);
        PropSet props = complete_props(f, g);
        for (const AtomicProp& a : collect_atoms(f))
            CHECK(props.has_atom(a));
    }
}

TEST_CASE("evaluate: basics on the two-state chain") {
    Graph g = two_state_chain();
    CHECK(evaluate(g, parse_temporal("AX q")).at_initial);
    CHECK_FALSE(evaluate(g, parse_temporal("AG q")).at_initial);
    CHECK(evaluate(g, parse_temporal("AF q")).at_initial);
    CHECK(evaluate(g, parse_temporal("A[ !q W q ]")).at_initial);
}

TEST_CASE("evaluate: AG saturates when the atom holds everywhere") {
    CsmSystem sys = fixtures::single_automaton("allp", {{"s0", {"p"}}, {"s1", {"p"}}},
                                               {{"s0", "s1"}, {"s1", "s0"}});
    Graph g = strip_ears(build_rg(sys));
    EvalResult r = evaluate(g, parse_temporal("AG p"));
    CHECK(r.at_initial);
    for (char v : r.sat)
        CHECK(v == 1);
}

TEST_CASE("evaluate: next-in-automaton is vacuous at terminal projections") {
    Graph g = two_state_chain();
    auto s1 = *g.find(StateTuple{1});
    EvalResult r = evaluate(g, parse_temporal("AX@M 0"));
    CHECK(r.sat[s1] == 1); // terminal projection: true even of `false`
    CHECK(r.sat[g.initial] == 0);
    CHECK(evaluate(g, parse_temporal("AX@M q")).at_initial);
}

TEST_CASE("evaluate: at-state and in-state forms") {
    Graph g = two_state_chain();
    EvalResult r = evaluate(g, parse_temporal("@<M.s1> q"));
    CHECK(r.at_initial); // truth at s1, broadcast
    CHECK(evaluate(g, parse_temporal("in <M.s0>")).at_initial);
    CHECK_FALSE(evaluate(g, parse_temporal("in <M.s1>")).at_initial);
    CHECK_THROWS_AS(evaluate(g, parse_temporal("@<M.missing> q")), ResolveError);
}

TEST_CASE("evaluate: well-named but absent designators are vacuously false") {
    Graph g = pair_graph(); // reachable: (1,3) and (2,4); (1,4) is not
    EvalResult r = evaluate(g, parse_temporal("in <A.1,B.4>"));
    for (char v : r.sat)
        CHECK(v == 0);
    EvalResult set = evaluate(g, parse_temporal("in { <A.1,B.4>, <A.2,B.4> }"));
    CHECK(set.sat[*g.find(StateTuple{1, 1})] == 1);
    CHECK(set.sat[*g.find(StateTuple{0, 0})] == 0);
    // at-state over an absent tuple is a hard error instead
    CHECK_THROWS_AS(evaluate(g, parse_temporal("@<A.1,B.4> p")), ResolveError);
}

TEST_CASE("evaluate: algebraic identities") {
    std::mt19937_64 rng(31);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Graph g = strip_ears(build_rg(fixtures::random_system(seed)));
        std::string p = g.info->signals.size() ? g.info->signals.name(0) : "";
        if (p.empty())
            continue;
        TemporalFormula phi = TemporalFormula::atom(AtomicProp::make_signal(p));
        // A[false W psi] == psi
        EvalResult lhs = evaluate(
            g, TemporalFormula::weak_until(TemporalFormula::constant(false), phi));
        EvalResult rhs = evaluate(g, phi);
        CHECK(lhs.sat == rhs.sat);
        // AG phi == A[phi W false]
        EvalResult ag = evaluate(g, TemporalFormula::always(phi));
        EvalResult aw = evaluate(
            g, TemporalFormula::weak_until(phi, TemporalFormula::constant(false)));
        CHECK(ag.sat == aw.sat);
    }
}

TEST_CASE("evaluate: quantifier expansion equals explicit conjunction") {
    Graph g = pair_graph();
    TemporalFormula quant = parse_temporal(
        "forall s in {<A.1,B.3>, <A.2,B.4>}: @s AF q -> in s");
    // the quantifier body with its variable still free, built directly
    TemporalFormula body = TemporalFormula::implication(
        TemporalFormula::at(
            StateRef{"v", {}},
            TemporalFormula::eventually(TemporalFormula::atom(AtomicProp::make_signal("q")))),
        TemporalFormula::in_var("v"));
    // manual expansion by substitution
    TemporalFormula a =
        substitute(body, "v", Designator{{{"A", "1"}, {"B", "3"}}});
    TemporalFormula b =
        substitute(body, "v", Designator{{{"A", "2"}, {"B", "4"}}});
    EvalResult expanded = evaluate(g, TemporalFormula::conjunction(a, b));
    EvalResult direct = evaluate(g, quant);
    CHECK(direct.sat == expanded.sat);

    // exists over FUT: future of the initial covers both states
    CHECK(evaluate(g, parse_temporal("exists s in FUT(<A.1,B.3>): @s in <A.2,B.4>"))
              .at_initial);
    CHECK(evaluate(g, parse_temporal("forall s in all: @s AF in <A.2,B.4>")).at_initial);
    CHECK(evaluate(g, parse_temporal("forall s in proj A.2: @s in <A.2,B.4>")).at_initial);
}

TEST_CASE("evaluate agrees with bounded path enumeration") {
    int graphs_checked = 0;
    for (std::uint64_t seed = 1; seed <= 60 && graphs_checked < 25; ++seed) {
        CsmSystem sys = fixtures::random_system(seed);
        Graph g = strip_ears(build_rg(sys));
        if (g.states.size() > 8)
            continue;
        ++graphs_checked;
        std::size_t depth = g.states.size();

        std::string p = g.info->signals.name(0);
        std::string q = g.info->signals.size() > 1 ? g.info->signals.name(1) : p;
        EvalResult phi = evaluate(g, parse_temporal(p));
        EvalResult psi = evaluate(g, parse_temporal(q));

        EvalResult ag = evaluate(g, parse_temporal("AG " + p));
        EvalResult af = evaluate(g, parse_temporal("AF " + p));
        EvalResult ax = evaluate(g, parse_temporal("AX " + p));
        EvalResult aw = evaluate(g, parse_temporal("A[ " + p + " W " + q + " ]"));
        for (std::uint32_t s = 0; s < g.states.size(); ++s) {
            CHECK(static_cast<bool>(ag.sat[s]) ==
                  oracle::path_all_globally(g, s, phi.sat, depth));
            CHECK(static_cast<bool>(af.sat[s]) ==
                  oracle::path_all_eventually(g, s, phi.sat, depth));
            CHECK(static_cast<bool>(ax.sat[s]) == oracle::path_all_next(g, s, phi.sat));
            CHECK(static_cast<bool>(aw.sat[s]) ==
                  oracle::path_weak_until(g, s, phi.sat, psi.sat, depth));
        }

        const std::string& aut = g.info->automaton_names[0];
        auto ai = *g.info->automaton_index(aut);
        EvalResult axa = evaluate(g, parse_temporal("AX@" + aut + " " + p));
        for (std::uint32_t s = 0; s < g.states.size(); ++s) {
            std::uint32_t proj = g.states[s].components[ai];
            bool expected =
                g.info->state_terminal[ai][proj]
                    ? true
                    : oracle::path_next_in(g, s, ai, proj, phi.sat, depth);
            CHECK(static_cast<bool>(axa.sat[s]) == expected);
        }
    }
    CHECK(graphs_checked >= 10);
}
