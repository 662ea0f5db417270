#include "csm/fixtures.hpp"

#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>

namespace csm::fixtures {

namespace {

struct Builder {
    CsmSystem sys;

    std::uint32_t automaton(const std::string& name) {
        CsmAutomaton a;
        a.name = name;
        sys.automata.push_back(std::move(a));
        return static_cast<std::uint32_t>(sys.automata.size() - 1);
    }

    std::uint32_t state(std::uint32_t aut, const std::string& name,
                        const std::vector<std::string>& outputs, bool initial) {
        ComponentState st;
        st.name = name;
        st.is_initial = initial;
        for (const std::string& o : outputs)
            sys.signals.intern(o);
        auto& a = sys.automata[aut];
        if (initial)
            a.initial = static_cast<std::uint32_t>(a.states.size());
        a.states.push_back(std::move(st));
        a.outgoing.emplace_back();
        // outputs are fixed up in finish() once the alphabet is closed
        pending_outputs.push_back({aut, static_cast<std::uint32_t>(a.states.size() - 1), outputs});
        return static_cast<std::uint32_t>(a.states.size() - 1);
    }

    void arc(std::uint32_t aut, std::uint32_t src, std::uint32_t dst, BoolFormula guard) {
        auto& a = sys.automata[aut];
        a.outgoing[src].push_back(static_cast<std::uint32_t>(a.arcs.size()));
        a.arcs.push_back(ComponentArc{src, dst, std::move(guard)});
    }

    CsmSystem finish() {
        sys.external = sys.signals.empty_set();
        if (external_name) {
            sys.external.set(*sys.signals.find(*external_name));
            sys.environment.mode = EnvironmentMode::AllSubsets;
        }
        sys.environment.fixed = sys.signals.empty_set();
        for (auto& [aut, st, outputs] : pending_outputs) {
            sys.automata[aut].states[st].outputs = sys.signals.empty_set();
            for (const std::string& o : outputs)
                sys.automata[aut].states[st].outputs.set(*sys.signals.find(o));
        }
        return std::move(sys);
    }

    void declare_external(const std::string& name) {
        sys.signals.intern(name);
        external_name = name;
    }

    std::vector<std::tuple<std::uint32_t, std::uint32_t, std::vector<std::string>>>
        pending_outputs;
    std::optional<std::string> external_name;
};

} // namespace

CsmSystem single_automaton(
    const std::string& name,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& states,
    const std::vector<std::pair<std::string, std::string>>& arcs) {
    Builder b;
    b.sys.name = name;
    std::uint32_t aut = b.automaton("M");
    for (std::size_t i = 0; i < states.size(); ++i)
        b.state(aut, states[i].first, states[i].second, i == 0);
    auto index = [&](const std::string& s) {
        auto idx = b.sys.automata[aut].state_index(s);
        if (!idx)
            throw std::invalid_argument("fixture arc names unknown state '" + s + "'");
        return *idx;
    };
    for (const auto& [src, dst] : arcs)
        b.arc(aut, index(src), index(dst), BoolFormula::constant(true));
    return b.finish();
}

CsmSystem chain(std::size_t n, bool mark_last) {
    std::vector<std::pair<std::string, std::vector<std::string>>> states;
    std::vector<std::pair<std::string, std::string>> arcs;
    for (std::size_t i = 0; i < n; ++i) {
        std::string name = "s" + std::to_string(i);
        std::vector<std::string> outputs;
        if (mark_last && i + 1 == n)
            outputs.push_back("t");
        states.emplace_back(name, outputs);
        if (i + 1 < n)
            arcs.emplace_back(name, "s" + std::to_string(i + 1));
        else
            arcs.emplace_back(name, name); // terminal ear
    }
    return single_automaton("chain" + std::to_string(n), states, arcs);
}

CsmSystem rhombus() {
    return single_automaton("rhombus",
                            {{"si", {"q"}}, {"sj1", {"q"}}, {"sj2", {"q"}}, {"sk1", {"q"}}},
                            {{"si", "sj1"},
                             {"si", "sj2"},
                             {"si", "sk1"},
                             {"sj1", "sk1"},
                             {"sj2", "sk1"},
                             {"sk1", "sk1"}});
}

CsmSystem rhombus_ladder(std::size_t stages) {
    std::vector<std::pair<std::string, std::vector<std::string>>> states;
    std::vector<std::pair<std::string, std::string>> arcs;
    for (std::size_t i = 0; i <= stages; ++i)
        states.emplace_back("a" + std::to_string(i), std::vector<std::string>{"q"});
    for (std::size_t i = 0; i < stages; ++i) {
        std::string top = "a" + std::to_string(i);
        std::string bottom = "a" + std::to_string(i + 1);
        std::string left = "b" + std::to_string(i);
        std::string right = "c" + std::to_string(i);
        states.emplace_back(left, std::vector<std::string>{"q"});
        states.emplace_back(right, std::vector<std::string>{"q"});
        arcs.emplace_back(top, left);
        arcs.emplace_back(top, right);
        arcs.emplace_back(top, bottom);
        arcs.emplace_back(left, bottom);
        arcs.emplace_back(right, bottom);
    }
    std::string last = "a" + std::to_string(stages);
    arcs.emplace_back(last, last);
    return single_automaton("ladder" + std::to_string(stages), states, arcs);
}

CsmSystem cycle(std::size_t k) {
    std::vector<std::pair<std::string, std::vector<std::string>>> states;
    std::vector<std::pair<std::string, std::string>> arcs;
    states.emplace_back("entry", std::vector<std::string>{});
    for (std::size_t i = 0; i < k; ++i)
        states.emplace_back("c" + std::to_string(i), std::vector<std::string>{});
    arcs.emplace_back("entry", "c0");
    for (std::size_t i = 0; i < k; ++i)
        arcs.emplace_back("c" + std::to_string(i), "c" + std::to_string((i + 1) % k));
    return single_automaton("cycle" + std::to_string(k), states, arcs);
}

CsmSystem near_clique(std::size_t n) {
    std::vector<std::pair<std::string, std::vector<std::string>>> states;
    std::vector<std::pair<std::string, std::string>> arcs;
    for (std::size_t i = 0; i < n; ++i)
        states.emplace_back("s" + std::to_string(i), std::vector<std::string>{});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            arcs.emplace_back("s" + std::to_string(i), "s" + std::to_string(j));
    return single_automaton("clique" + std::to_string(n), states, arcs);
}

namespace {

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    std::uint64_t next(std::uint64_t n) { return n ? gen() % n : 0; }
    bool chance(unsigned percent) { return next(100) < percent; }
};

} // namespace

CsmSystem random_system(std::uint64_t seed) {
    Rng rng(seed);
    Builder b;
    b.sys.name = "random" + std::to_string(seed);

    std::size_t n_signals = 2 + rng.next(3); // 2..4
    std::vector<std::string> pool;
    for (std::size_t i = 0; i < n_signals; ++i)
        pool.push_back("p" + std::to_string(i));
    bool with_external = rng.chance(25);
    if (with_external)
        b.declare_external("e0");

    std::size_t n_automata = 2 + rng.next(2); // 2..3
    for (std::size_t a = 0; a < n_automata; ++a) {
        std::uint32_t aut = b.automaton(std::string(1, static_cast<char>('A' + a)));
        std::size_t n_states = 3 + rng.next(4); // 3..6

        // Two output profiles per automaton keep many labels equal.
        std::vector<std::vector<std::string>> profiles(2);
        for (auto& profile : profiles) {
            std::size_t k = rng.next(3); // 0..2 signals
            std::set<std::string> chosen;
            while (chosen.size() < k)
                chosen.insert(pool[rng.next(pool.size())]);
            profile.assign(chosen.begin(), chosen.end());
        }

        for (std::size_t s = 0; s < n_states; ++s)
            b.state(aut, "s" + std::to_string(s), profiles[rng.next(2)], s == 0);

        auto guard_atom = [&]() {
            std::string name = with_external && rng.chance(30)
                                   ? "e0"
                                   : pool[rng.next(pool.size())];
            return BoolFormula::atom(b.sys.signals.intern(name));
        };
        auto dst = [&]() { return static_cast<std::uint32_t>(rng.next(n_states)); };
        for (std::uint32_t s = 0; s < n_states; ++s) {
            switch (rng.next(6)) {
            case 0:
                b.arc(aut, s, dst(), BoolFormula::constant(true));
                break;
            case 1: {
                BoolFormula g = guard_atom();
                b.arc(aut, s, dst(), g);
                b.arc(aut, s, dst(), BoolFormula::negation(g));
                break;
            }
            case 2: {
                BoolFormula g = guard_atom();
                b.arc(aut, s, dst(), g);
                b.arc(aut, s, dst(), BoolFormula::negation(g));
                b.arc(aut, s, dst(), BoolFormula::constant(true));
                break;
            }
            case 3:
                b.arc(aut, s, dst(), BoolFormula::constant(true));
                b.arc(aut, s, s, BoolFormula::constant(true)); // ear
                break;
            default: // nondeterministic fork, grows the product
                b.arc(aut, s, dst(), BoolFormula::constant(true));
                b.arc(aut, s, dst(), BoolFormula::constant(true));
                break;
            }
        }
    }
    return b.finish();
}

TemporalFormula random_base_formula(const CsmSystem& sys, std::uint64_t seed) {
    Rng rng(seed);

    std::vector<std::string> signals;
    for (SignalId i = 0; i < sys.signals.size(); ++i)
        signals.push_back(sys.signals.name(i));
    auto atom = [&]() {
        if (signals.empty())
            return TemporalFormula::constant(true);
        TemporalFormula f =
            TemporalFormula::atom(AtomicProp::make_signal(signals[rng.next(signals.size())]));
        if (rng.chance(30))
            f = TemporalFormula::negation(std::move(f));
        return f;
    };

    Designator initial;
    for (const auto& a : sys.automata)
        initial.parts.emplace_back(a.name, a.states[a.initial].name);
    initial.normalize();

    // An arbitrary well-named designator; may or may not be reachable.
    Designator some_state;
    for (const auto& a : sys.automata)
        some_state.parts.emplace_back(a.name,
                                      a.states[rng.next(a.states.size())].name);
    some_state.normalize();

    switch (rng.next(8)) {
    case 0:
        return TemporalFormula::always(TemporalFormula::implication(
            atom(), TemporalFormula::eventually(atom())));
    case 1:
        return TemporalFormula::eventually(atom());
    case 2:
        return TemporalFormula::weak_until(atom(), atom());
    case 3:
        return TemporalFormula::always(atom());
    case 4: // anchored next at the initial state
        return TemporalFormula::at(StateRef{"", initial}, TemporalFormula::next(atom()));
    case 5: { // next-in-automaton at the initial state
        const std::string& aut = sys.automata[rng.next(sys.automata.size())].name;
        return TemporalFormula::at(StateRef{"", initial},
                                   TemporalFormula::next_in(aut, atom()));
    }
    case 6: { // non-static next-in-automaton reference
        const std::string& aut = sys.automata[rng.next(sys.automata.size())].name;
        return TemporalFormula::always(TemporalFormula::implication(
            atom(), TemporalFormula::next_in(aut, atom())));
    }
    case 7: // protects a named state (reachable or not)
        return TemporalFormula::at(StateRef{"", some_state},
                                   TemporalFormula::always(atom()));
    }
    return atom();
}

} // namespace csm::fixtures
