#include "csm/eval.hpp"

#include "csm/errors.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace csm {

namespace {

using Bits = std::vector<char>;

struct Evaluator {
    const Graph& g;
    std::map<std::string, std::uint32_t> env; // bound quantifier variables

    std::size_t n() const { return g.states.size(); }

    Bits all(bool v) const { return Bits(n(), v ? 1 : 0); }

    // All successors of s inside `z`.
    bool univ_next(std::uint32_t s, const Bits& z) const {
        for (std::uint32_t d : g.succ[s])
            if (!z[d])
                return false;
        return true;
    }

    std::uint32_t resolve_state(const Designator& d) const {
        StateTuple t = resolve_designator(d, *g.info);
        auto id = g.find(t);
        if (!id)
            throw ResolveError("designator " + d.to_string() +
                               " names no state of this graph");
        return *id;
    }

    Bits atom_bits(const AtomicProp& p) const {
        Bits out = all(false);
        switch (p.kind) {
        case AtomicProp::Kind::Signal: {
            auto id = g.info->signals.find(p.signal);
            if (!id)
                throw ResolveError("unknown signal '" + p.signal + "'");
            for (std::uint32_t s = 0; s < n(); ++s)
                out[s] = g.states[s].outputs.test(*id);
            return out;
        }
        case AtomicProp::Kind::InState: {
            StateTuple t = resolve_designator(p.state, *g.info);
            if (auto id = g.find(t))
                out[*id] = 1; // absent designators are vacuously false
            return out;
        }
        case AtomicProp::Kind::InSet: {
            for (const Designator& d : p.members) {
                StateTuple t = resolve_designator(d, *g.info);
                if (auto id = g.find(t))
                    out[*id] = 1;
            }
            return out;
        }
        case AtomicProp::Kind::InProj: {
            auto ai = g.info->automaton_index(p.automaton);
            if (!ai)
                throw ResolveError("unknown automaton '" + p.automaton + "'");
            auto si = g.info->state_index(*ai, p.component);
            if (!si)
                throw ResolveError("unknown state '" + p.component + "' of automaton '" +
                                   p.automaton + "'");
            for (std::uint32_t s = 0; s < n(); ++s)
                out[s] = g.states[s].components[*ai] == *si;
            return out;
        }
        }
        return out;
    }

    // All paths reach a different projection of `automaton` and satisfy
    // `phi` there; vacuous where the projection is terminal.
    Bits next_in_automaton(const std::string& automaton, const Bits& phi) const {
        auto ai = g.info->automaton_index(automaton);
        if (!ai)
            throw ResolveError("unknown automaton '" + automaton + "'");
        Bits out = all(false);
        Bits z = all(false);
        // Least fixpoint, computed jointly: states with equal projection
        // feed each other, projection changes are the frontier.
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::uint32_t s = 0; s < n(); ++s) {
                if (z[s])
                    continue;
                std::uint32_t proj = g.states[s].components[*ai];
                bool ok = true;
                for (std::uint32_t d : g.succ[s]) {
                    bool same = g.states[d].components[*ai] == proj;
                    if (same ? !z[d] : !phi[d]) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    z[s] = 1;
                    changed = true;
                }
            }
        }
        for (std::uint32_t s = 0; s < n(); ++s) {
            std::uint32_t proj = g.states[s].components[*ai];
            out[s] = g.info->state_terminal[*ai][proj] ? 1 : z[s];
        }
        return out;
    }

    Bits eval(const TemporalFormula& f) {
        switch (f.op()) {
        case TOp::Atom:
            return atom_bits(f.prop());
        case TOp::ConstTrue:
            return all(true);
        case TOp::ConstFalse:
            return all(false);
        case TOp::InVar: {
            auto it = env.find(f.var());
            if (it == env.end())
                throw ResolveError("unbound variable '" + f.var() + "'");
            Bits out = all(false);
            out[it->second] = 1;
            return out;
        }
        case TOp::Not: {
            Bits a = eval(f.lhs());
            for (auto& v : a)
                v = !v;
            return a;
        }
        case TOp::And: {
            Bits a = eval(f.lhs()), b = eval(f.rhs());
            for (std::size_t i = 0; i < a.size(); ++i)
                a[i] = a[i] && b[i];
            return a;
        }
        case TOp::Or: {
            Bits a = eval(f.lhs()), b = eval(f.rhs());
            for (std::size_t i = 0; i < a.size(); ++i)
                a[i] = a[i] || b[i];
            return a;
        }
        case TOp::Implies: {
            Bits a = eval(f.lhs()), b = eval(f.rhs());
            for (std::size_t i = 0; i < a.size(); ++i)
                a[i] = !a[i] || b[i];
            return a;
        }
        case TOp::AX: {
            Bits a = eval(f.lhs());
            Bits out = all(false);
            for (std::uint32_t s = 0; s < n(); ++s)
                out[s] = univ_next(s, a);
            return out;
        }
        case TOp::AG: {
            Bits phi = eval(f.lhs());
            Bits z = phi;
            bool changed = true;
            while (changed) {
                changed = false;
                for (std::uint32_t s = 0; s < n(); ++s)
                    if (z[s] && !univ_next(s, z)) {
                        z[s] = 0;
                        changed = true;
                    }
            }
            return z;
        }
        case TOp::AF: {
            Bits phi = eval(f.lhs());
            Bits z = phi;
            bool changed = true;
            while (changed) {
                changed = false;
                for (std::uint32_t s = 0; s < n(); ++s)
                    if (!z[s] && univ_next(s, z)) {
                        z[s] = 1;
                        changed = true;
                    }
            }
            return z;
        }
        case TOp::AW: {
            Bits phi = eval(f.lhs()), psi = eval(f.rhs());
            Bits z = all(true);
            bool changed = true;
            while (changed) {
                changed = false;
                for (std::uint32_t s = 0; s < n(); ++s)
                    if (z[s] && !(psi[s] || (phi[s] && univ_next(s, z)))) {
                        z[s] = 0;
                        changed = true;
                    }
            }
            return z;
        }
        case TOp::AXa:
            return next_in_automaton(f.automaton(), eval(f.lhs()));
        case TOp::Quant: {
            std::vector<std::uint32_t> members = range_states(g, f.range());
            Bits acc = all(f.is_forall());
            auto saved = env.find(f.var()) != env.end()
                             ? std::optional<std::uint32_t>(env[f.var()])
                             : std::nullopt;
            for (std::uint32_t m : members) {
                env[f.var()] = m;
                Bits one = eval(f.lhs());
                for (std::size_t i = 0; i < acc.size(); ++i)
                    acc[i] = f.is_forall() ? (acc[i] && one[i]) : (acc[i] || one[i]);
            }
            if (saved)
                env[f.var()] = *saved;
            else
                env.erase(f.var());
            return acc;
        }
        case TOp::At: {
            std::uint32_t s;
            if (f.at_ref().is_var()) {
                auto it = env.find(f.at_ref().var);
                if (it == env.end())
                    throw ResolveError("unbound variable '" + f.at_ref().var + "'");
                s = it->second;
            } else {
                s = resolve_state(f.at_ref().des);
            }
            Bits a = eval(f.lhs());
            return all(a[s]);
        }
        }
        return all(false);
    }
};

} // namespace

std::vector<std::uint32_t> range_states(const Graph& g, const QuantRange& r) {
    std::vector<std::uint32_t> out;
    switch (r.kind) {
    case QuantRange::Kind::Explicit:
        for (const Designator& d : r.members) {
            StateTuple t = resolve_designator(d, *g.info);
            auto id = g.find(t);
            if (!id)
                throw ResolveError("designator " + d.to_string() +
                                   " names no state of this graph");
            out.push_back(*id);
        }
        break;
    case QuantRange::Kind::All:
        for (std::uint32_t s = 0; s < g.states.size(); ++s)
            out.push_back(s);
        break;
    case QuantRange::Kind::Proj: {
        auto ai = g.info->automaton_index(r.automaton);
        if (!ai)
            throw ResolveError("unknown automaton '" + r.automaton + "'");
        auto si = g.info->state_index(*ai, r.component);
        if (!si)
            throw ResolveError("unknown state '" + r.component + "' of automaton '" +
                               r.automaton + "'");
        for (std::uint32_t s = 0; s < g.states.size(); ++s)
            if (g.states[s].components[*ai] == *si)
                out.push_back(s);
        break;
    }
    case QuantRange::Kind::Future: {
        StateTuple t = resolve_designator(r.future_of, *g.info);
        auto id = g.find(t);
        if (!id)
            throw ResolveError("designator " + r.future_of.to_string() +
                               " names no state of this graph");
        std::vector<char> seen(g.states.size(), 0);
        std::deque<std::uint32_t> frontier{*id};
        seen[*id] = 1;
        while (!frontier.empty()) {
            std::uint32_t s = frontier.front();
            frontier.pop_front();
            out.push_back(s);
            for (std::uint32_t d : g.succ[s])
                if (!seen[d]) {
                    seen[d] = 1;
                    frontier.push_back(d);
                }
        }
        std::sort(out.begin(), out.end());
        break;
    }
    }
    return out;
}

EvalResult evaluate(const Graph& g, const TemporalFormula& f) {
    Evaluator ev{g};
    std::vector<char> sat = ev.eval(f);
    return EvalResult{sat[g.initial] != 0, std::move(sat)};
}

} // namespace csm
