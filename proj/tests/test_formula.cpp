#include "csm/bool_formula.hpp"
#include "csm/errors.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace csm;

namespace {

SignalTable qpm_alphabet() {
    SignalTable t;
    t.intern("q");
    t.intern("p");
    t.intern("m");
    return t;
}

SignalSet active(const SignalTable& t, std::initializer_list<const char*> names) {
    SignalSet s = t.empty_set();
    for (const char* n : names)
        s.set(*t.find(n));
    return s;
}

// Random formula over the alphabet, for property runs.
BoolFormula random_formula(std::mt19937_64& rng, const SignalTable& t, int depth) {
    if (depth == 0 || rng() % 4 == 0) {
        switch (rng() % 4) {
        case 0:
            return BoolFormula::constant(true);
        case 1:
            return BoolFormula::constant(false);
        default:
            return BoolFormula::atom(static_cast<SignalId>(rng() % t.size()));
        }
    }
    switch (rng() % 3) {
    case 0:
        return BoolFormula::negation(random_formula(rng, t, depth - 1));
    case 1:
        return BoolFormula::conjunction(random_formula(rng, t, depth - 1),
                                        random_formula(rng, t, depth - 1));
    default:
        return BoolFormula::disjunction(random_formula(rng, t, depth - 1),
                                        random_formula(rng, t, depth - 1));
    }
}

std::set<SignalId> to_id_set(const SignalSet& s) {
    std::set<SignalId> out;
    for (SignalId i = 0; i < s.size(); ++i)
        if (s.test(i))
            out.insert(i);
    return out;
}

} // namespace

TEST_CASE("guard parsing honors not > and > or precedence") {
    SignalTable t = qpm_alphabet();
    BoolFormula f = parse_bool_formula("q | p & m", t);
    BoolFormula expected = BoolFormula::disjunction(
        BoolFormula::atom(*t.find("q")),
        BoolFormula::conjunction(BoolFormula::atom(*t.find("p")),
                                 BoolFormula::atom(*t.find("m"))));
    CHECK(f == expected);
    // q alone fulfills the formula.
    CHECK(eval(f, active(t, {"q"})));
    CHECK_FALSE(eval(f, active(t, {"p"})));
    CHECK(eval(f, active(t, {"p", "m"})));
}

TEST_CASE("guard constants") {
    SignalTable t = qpm_alphabet();
    CHECK(parse_bool_formula("1", t) == BoolFormula::constant(true));
    CHECK(parse_bool_formula("0", t) == BoolFormula::constant(false));
    CHECK(eval(BoolFormula::constant(true), t.empty_set()));
    CHECK_FALSE(eval(BoolFormula::constant(false), active(t, {"p", "q", "m"})));
}

TEST_CASE("unknown signals are named in the error") {
    SignalTable t;
    t.intern("q");
    CHECK_THROWS_WITH_AS(parse_bool_formula("!(q | p)", t), "unknown signal 'p'",
                         ResolveError);
}

TEST_CASE("syntax errors report a position") {
    SignalTable t = qpm_alphabet();
    CHECK_THROWS_AS(parse_bool_formula("q |", t), ParseError);
    CHECK_THROWS_AS(parse_bool_formula("(q", t), ParseError);
    CHECK_THROWS_AS(parse_bool_formula("", t), ParseError);
    CHECK_THROWS_AS(parse_bool_formula("q p", t), ParseError);
    try {
        parse_bool_formula("q & & p", t);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.position() == 4);
    }
}

TEST_CASE("disjunction is fulfilled by its first alternative alone") {
    SignalTable t = qpm_alphabet();
    BoolFormula f = parse_bool_formula("q | p & m", t);
    CHECK(eval(f, active(t, {"q"})));
}

TEST_CASE("support is the syntactic atom set") {
    SignalTable t = qpm_alphabet();
    CHECK(to_id_set(support(parse_bool_formula("q | (p & m)", t), t.size())) ==
          std::set<SignalId>{*t.find("q"), *t.find("p"), *t.find("m")});
    CHECK(support(BoolFormula::constant(true), t.size()).none());
    CHECK(to_id_set(support(parse_bool_formula("!q", t), t.size())) ==
          std::set<SignalId>{*t.find("q")});
}

TEST_CASE("tautology samples") {
    SignalTable t = qpm_alphabet();
    CHECK(is_tautology(parse_bool_formula("q | !q", t), t.size()));
    CHECK_FALSE(is_tautology(parse_bool_formula("q", t), t.size()));
    CHECK(is_tautology(BoolFormula::constant(true), t.size()));
}

TEST_CASE("tautology support cap") {
    SignalTable t;
    BoolFormula f = BoolFormula::constant(false);
    for (int i = 0; i < 25; ++i)
        f = BoolFormula::disjunction(f, BoolFormula::atom(t.intern("s" + std::to_string(i))));
    CHECK_THROWS_AS(is_tautology(f, t.size()), LimitError);
}

TEST_CASE("negation flips eval on random assignments") {
    SignalTable t = qpm_alphabet();
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        BoolFormula f = random_formula(rng, t, 4);
        SignalSet a = t.empty_set();
        for (SignalId s = 0; s < t.size(); ++s)
            a.set(s, rng() % 2);
        CHECK(eval(BoolFormula::negation(f), a) == !eval(f, a));
    }
}

TEST_CASE("tautology agrees with whole-alphabet enumeration") {
    SignalTable t = qpm_alphabet();
    std::mt19937_64 rng(11);
    for (int i = 0; i < 300; ++i) {
        BoolFormula f = random_formula(rng, t, 4);
        CHECK(is_tautology(f, t.size()) == oracle::brute_tautology(f, t.size()));
    }
}

TEST_CASE("parse of the printed form is the identity") {
    SignalTable t = qpm_alphabet();
    std::mt19937_64 rng(13);
    for (int i = 0; i < 300; ++i) {
        BoolFormula f = random_formula(rng, t, 5);
        CHECK(parse_bool_formula(to_string(f, t), t) == f);
    }
}

TEST_CASE("eval agrees with the naive oracle on random assignments") {
    SignalTable t = qpm_alphabet();
    std::mt19937_64 rng(17);
    for (int i = 0; i < 300; ++i) {
        BoolFormula f = random_formula(rng, t, 4);
        SignalSet a = t.empty_set();
        for (SignalId s = 0; s < t.size(); ++s)
            a.set(s, rng() % 2);
        CHECK(eval(f, a) == oracle::naive_eval(f, to_id_set(a)));
    }
}
