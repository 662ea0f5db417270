#include "csm/graph.hpp"

#include "csm/errors.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

namespace csm {

std::string to_string(GraphKind kind) {
    switch (kind) {
    case GraphKind::RG:
        return "RG";
    case GraphKind::RGMinusAt:
        return "RG-@";
    case GraphKind::RRG:
        return "RRG";
    }
    return "?";
}

std::shared_ptr<const SystemInfo> SystemInfo::from(const CsmSystem& sys) {
    auto info = std::make_shared<SystemInfo>();
    info->signals = sys.signals;
    for (const auto& a : sys.automata) {
        info->automaton_names.push_back(a.name);
        std::vector<std::string> names;
        std::vector<char> terminal;
        for (std::uint32_t s = 0; s < a.states.size(); ++s) {
            names.push_back(a.states[s].name);
            terminal.push_back(a.state_terminal(s) ? 1 : 0);
        }
        info->state_names.push_back(std::move(names));
        info->state_terminal.push_back(std::move(terminal));
    }
    return info;
}

std::optional<std::uint32_t> SystemInfo::automaton_index(const std::string& name) const {
    for (std::uint32_t i = 0; i < automaton_names.size(); ++i)
        if (automaton_names[i] == name)
            return i;
    return std::nullopt;
}

std::optional<std::uint32_t> SystemInfo::state_index(std::uint32_t automaton,
                                                     const std::string& name) const {
    const auto& names = state_names.at(automaton);
    for (std::uint32_t i = 0; i < names.size(); ++i)
        if (names[i] == name)
            return i;
    return std::nullopt;
}

std::string SystemInfo::tuple_name(const StateTuple& t) const {
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i)
            out += ',';
        out += state_names.at(i).at(t[i]);
    }
    out += ')';
    return out;
}

std::uint32_t Graph::add_state(GlobalState s) {
    std::uint32_t id = static_cast<std::uint32_t>(states.size());
    index.emplace(s.components, id);
    states.push_back(std::move(s));
    succ.emplace_back();
    pred.emplace_back();
    return id;
}

void Graph::add_arc(std::uint32_t src, std::uint32_t dst) {
    auto& out = succ[src];
    auto it = std::lower_bound(out.begin(), out.end(), dst);
    if (it != out.end() && *it == dst)
        return;
    out.insert(it, dst);
    auto& in = pred[dst];
    in.insert(std::lower_bound(in.begin(), in.end(), src), src);
}

bool Graph::has_arc(std::uint32_t src, std::uint32_t dst) const {
    const auto& out = succ[src];
    return std::binary_search(out.begin(), out.end(), dst);
}

std::size_t Graph::arc_count() const {
    std::size_t n = 0;
    for (const auto& out : succ)
        n += out.size();
    return n;
}

std::optional<std::uint32_t> Graph::find(const StateTuple& t) const {
    auto it = index.find(t);
    if (it == index.end())
        return std::nullopt;
    return it->second;
}

std::string Graph::state_name(std::uint32_t id) const {
    return info->tuple_name(states.at(id).components);
}

bool Graph::terminal(std::uint32_t id) const {
    for (std::uint32_t s : succ[id])
        if (s != id)
            return false;
    return true;
}

SignalSet tuple_outputs(const CsmSystem& sys, const StateTuple& t) {
    SignalSet out = sys.signals.empty_set();
    for (std::size_t i = 0; i < sys.automata.size(); ++i)
        out |= sys.automata[i].states.at(t[i]).outputs;
    return out;
}

std::vector<StateTuple> step(const CsmSystem& sys, const StateTuple& t,
                             const SignalSet& external, std::vector<BoolFormula>* guards) {
    SignalSet active = tuple_outputs(sys, t);
    active |= external;

    // Enabled arcs per automaton.
    std::vector<std::vector<const ComponentArc*>> enabled(sys.automata.size());
    for (std::size_t i = 0; i < sys.automata.size(); ++i) {
        const auto& a = sys.automata[i];
        for (std::uint32_t arc : a.outgoing[t[i]])
            if (eval(a.arcs[arc].guard, active))
                enabled[i].push_back(&a.arcs[arc]);
        if (enabled[i].empty())
            throw std::logic_error("automaton '" + a.name + "' has no enabled arc in state '" +
                                   a.states[t[i]].name + "': system was not validated");
    }

    // Cross product, one enabled arc per automaton; dedup by destination tuple.
    std::map<StateTuple, BoolFormula> dests;
    std::vector<std::size_t> pick(sys.automata.size(), 0);
    for (;;) {
        StateTuple dst(t.size());
        BoolFormula combo;
        for (std::size_t i = 0; i < pick.size(); ++i) {
            const ComponentArc* arc = enabled[i][pick[i]];
            dst[i] = arc->dst;
            combo = combo.empty() ? arc->guard
                                  : BoolFormula::conjunction(std::move(combo), arc->guard);
        }
        auto [it, inserted] = dests.emplace(std::move(dst), combo);
        if (!inserted && guards)
            it->second = BoolFormula::disjunction(it->second, std::move(combo));

        std::size_t i = 0;
        while (i < pick.size() && ++pick[i] == enabled[i].size())
            pick[i++] = 0;
        if (i == pick.size())
            break;
    }

    std::vector<StateTuple> out;
    out.reserve(dests.size());
    for (auto& [dst, guard] : dests) {
        out.push_back(dst);
        if (guards)
            guards->push_back(std::move(guard));
    }
    return out;
}

Graph build_rg(const CsmSystem& sys, std::size_t cap) {
    Graph g;
    g.kind = GraphKind::RG;
    g.info = SystemInfo::from(sys);

    StateTuple init(sys.automata.size());
    for (std::size_t i = 0; i < sys.automata.size(); ++i)
        init[i] = sys.automata[i].initial;

    const std::vector<SignalSet> externals = sys.external_choices();

    g.initial = g.add_state(GlobalState{init, tuple_outputs(sys, init)});
    std::deque<std::uint32_t> frontier{g.initial};
    std::size_t arcs_seen = 0;

    while (!frontier.empty()) {
        std::uint32_t src = frontier.front();
        frontier.pop_front();
        const StateTuple current = g.states[src].components;

        // Successors over every allowed external assignment, in tuple order.
        std::map<StateTuple, BoolFormula> combined;
        for (const SignalSet& ext : externals) {
            std::vector<BoolFormula> guards;
            std::vector<StateTuple> dsts = step(sys, current, ext, &guards);
            for (std::size_t i = 0; i < dsts.size(); ++i) {
                auto [it, inserted] = combined.emplace(std::move(dsts[i]), guards[i]);
                if (!inserted)
                    it->second = BoolFormula::disjunction(it->second, std::move(guards[i]));
            }
        }

        for (auto& [dst, guard] : combined) {
            auto found = g.find(dst);
            std::uint32_t dst_id;
            if (found) {
                dst_id = *found;
            } else {
                if (g.states.size() >= cap)
                    throw LimitError("state cap of " + std::to_string(cap) +
                                         " exceeded while building the reachability graph",
                                     g.states.size(), arcs_seen);
                dst_id = g.add_state(GlobalState{dst, tuple_outputs(sys, dst)});
                frontier.push_back(dst_id);
            }
            g.add_arc(src, dst_id);
            g.guards.emplace((std::uint64_t{src} << 32) | dst_id, std::move(guard));
            ++arcs_seen;
        }
    }
    return g;
}

Graph strip_ears(const Graph& g) {
    Graph out;
    out.kind = GraphKind::RGMinusAt;
    out.info = g.info;
    out.states = g.states;
    out.index = g.index;
    out.initial = g.initial;
    out.succ.resize(g.states.size());
    out.pred.resize(g.states.size());
    for (std::uint32_t s = 0; s < g.states.size(); ++s) {
        bool keep_ear = g.terminal(s);
        for (std::uint32_t d : g.succ[s]) {
            if (d == s && !keep_ear)
                continue;
            out.add_arc(s, d);
            auto it = g.guards.find((std::uint64_t{s} << 32) | d);
            if (it != g.guards.end())
                out.guards.emplace(it->first, it->second);
        }
    }
    return out;
}

} // namespace csm
