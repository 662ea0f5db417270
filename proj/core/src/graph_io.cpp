#include "csm/graph_io.hpp"

#include "csm/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <sstream>

namespace csm {

namespace {

std::string outputs_label(const Graph& g, std::uint32_t s) {
    std::string out = "{";
    bool first = true;
    for (const std::string& name : g.info->signals.names_of(g.states[s].outputs)) {
        if (!first)
            out += ',';
        out += name;
        first = false;
    }
    return out + "}";
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out;
}

} // namespace

std::string to_dot(const Graph& g) {
    std::ostringstream out;
    out << "digraph \"" << to_string(g.kind) << "\" {\n  rankdir=LR;\n";
    for (std::uint32_t s = 0; s < g.states.size(); ++s) {
        out << "  s" << s << " [label=\"" << dot_escape(g.state_name(s)) << "\\n"
            << dot_escape(outputs_label(g, s)) << "\"";
        if (s == g.initial)
            out << ", shape=doublecircle";
        out << "];\n";
    }
    for (std::uint32_t s = 0; s < g.states.size(); ++s)
        for (std::uint32_t d : g.succ[s]) {
            out << "  s" << s << " -> s" << d;
            auto it = g.guards.find((std::uint64_t{s} << 32) | d);
            if (it != g.guards.end())
                out << " [label=\"" << dot_escape(to_string(it->second, g.info->signals))
                    << "\"]";
            out << ";\n";
        }
    out << "}\n";
    return out.str();
}

std::string to_dot_annotated(const Graph& full, const Graph& reduced) {
    std::ostringstream out;
    out << "digraph annotated {\n  rankdir=LR;\n";
    for (std::uint32_t s = 0; s < full.states.size(); ++s) {
        bool kept = reduced.find(full.states[s].components).has_value();
        out << "  s" << s << " [label=\"" << dot_escape(full.state_name(s)) << "\\n"
            << dot_escape(outputs_label(full, s)) << "\"";
        if (s == full.initial)
            out << ", shape=doublecircle";
        if (!kept)
            out << ", style=dashed";
        out << "];\n";
    }
    for (std::uint32_t s = 0; s < full.states.size(); ++s)
        for (std::uint32_t d : full.succ[s]) {
            auto rs = reduced.find(full.states[s].components);
            auto rd = reduced.find(full.states[d].components);
            bool kept = rs && rd && reduced.has_arc(*rs, *rd);
            out << "  s" << s << " -> s" << d;
            if (!kept)
                out << " [style=dashed]";
            out << ";\n";
        }
    // Arcs the reduction introduced.
    for (std::uint32_t s = 0; s < reduced.states.size(); ++s)
        for (std::uint32_t d : reduced.succ[s]) {
            auto fs = full.find(reduced.states[s].components);
            auto fd = full.find(reduced.states[d].components);
            if (fs && fd && !full.has_arc(*fs, *fd))
                out << "  s" << *fs << " -> s" << *fd << " [penwidth=2];\n";
        }
    out << "}\n";
    return out.str();
}

namespace {

nlohmann::json graph_json_impl(const Graph& g, const Labeling* labels) {
    nlohmann::json j;
    j["version"] = 1;
    j["kind"] = to_string(g.kind);
    j["automata"] = g.info->automaton_names;
    j["component_states"] = g.info->state_names;
    nlohmann::json terminals = nlohmann::json::array();
    for (const auto& per_automaton : g.info->state_terminal) {
        nlohmann::json row = nlohmann::json::array();
        for (char t : per_automaton)
            row.push_back(t != 0);
        terminals.push_back(std::move(row));
    }
    j["component_terminal"] = std::move(terminals);
    std::vector<std::string> signal_names;
    for (SignalId i = 0; i < g.info->signals.size(); ++i)
        signal_names.push_back(g.info->signals.name(i));
    j["signals"] = signal_names;
    j["initial"] = g.initial;

    j["states"] = nlohmann::json::array();
    for (std::uint32_t s = 0; s < g.states.size(); ++s) {
        nlohmann::json js;
        js["id"] = s;
        std::vector<std::string> comps;
        for (std::size_t a = 0; a < g.states[s].components.size(); ++a)
            comps.push_back(g.info->state_names[a][g.states[s].components[a]]);
        js["components"] = comps;
        js["outputs"] = g.info->signals.names_of(g.states[s].outputs);
        j["states"].push_back(std::move(js));
    }
    j["arcs"] = nlohmann::json::array();
    for (std::uint32_t s = 0; s < g.states.size(); ++s)
        for (std::uint32_t d : g.succ[s])
            j["arcs"].push_back({s, d});

    if (labels) {
        nlohmann::json jl;
        jl["atoms"] = nlohmann::json::array();
        for (const AtomicProp& a : labels->atoms)
            jl["atoms"].push_back(a.to_string());
        jl["bits"] = nlohmann::json::array();
        for (const LabelBits& bits : labels->bits) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t i = 0; i < bits.size(); ++i)
                if (bits.test(i))
                    row.push_back(i);
            jl["bits"].push_back(std::move(row));
        }
        j["labeling"] = std::move(jl);
    }
    return j;
}

} // namespace

nlohmann::json graph_to_json(const Graph& g) { return graph_json_impl(g, nullptr); }

nlohmann::json graph_to_json(const Graph& g, const Labeling& labels) {
    return graph_json_impl(g, &labels);
}

Graph graph_from_json(const nlohmann::json& j) {
    try {
        auto info = std::make_shared<SystemInfo>();
        info->automaton_names = j.at("automata").get<std::vector<std::string>>();
        info->state_names =
            j.at("component_states").get<std::vector<std::vector<std::string>>>();
        for (const auto& row : j.at("component_terminal")) {
            std::vector<char> t;
            for (const auto& v : row)
                t.push_back(v.get<bool>() ? 1 : 0);
            info->state_terminal.push_back(std::move(t));
        }
        for (const auto& name : j.at("signals"))
            info->signals.intern(name.get<std::string>());

        Graph g;
        std::string kind = j.at("kind").get<std::string>();
        g.kind = kind == "RG" ? GraphKind::RG
                              : kind == "RG-@" ? GraphKind::RGMinusAt : GraphKind::RRG;
        g.info = info;
        for (const auto& js : j.at("states")) {
            GlobalState s;
            const auto& comps = js.at("components");
            if (comps.size() != info->automaton_names.size())
                throw ParseError("state tuple arity mismatch", 0);
            for (std::size_t a = 0; a < comps.size(); ++a) {
                auto idx = info->state_index(static_cast<std::uint32_t>(a),
                                             comps[a].get<std::string>());
                if (!idx)
                    throw ParseError("unknown component state '" +
                                         comps[a].get<std::string>() + "'",
                                     0);
                s.components.push_back(*idx);
            }
            s.outputs = info->signals.empty_set();
            for (const auto& name : js.at("outputs")) {
                auto id = info->signals.find(name.get<std::string>());
                if (!id)
                    throw ParseError("unknown signal '" + name.get<std::string>() + "'", 0);
                s.outputs.set(*id);
            }
            g.add_state(std::move(s));
        }
        for (const auto& arc : j.at("arcs"))
            g.add_arc(arc.at(0).get<std::uint32_t>(), arc.at(1).get<std::uint32_t>());
        g.initial = j.at("initial").get<std::uint32_t>();
        if (g.initial >= g.states.size())
            throw ParseError("initial state out of range", 0);
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed graph JSON: ") + e.what(), 0);
    }
}

nlohmann::json canonical_snapshot(const Graph& g) {
    std::vector<std::string> states;
    for (std::uint32_t s = 0; s < g.states.size(); ++s)
        states.push_back(g.state_name(s) + outputs_label(g, s));
    std::sort(states.begin(), states.end());

    std::vector<std::pair<std::string, std::string>> arcs;
    for (std::uint32_t s = 0; s < g.states.size(); ++s)
        for (std::uint32_t d : g.succ[s])
            arcs.emplace_back(g.state_name(s), g.state_name(d));
    std::sort(arcs.begin(), arcs.end());

    nlohmann::json j;
    j["kind"] = to_string(g.kind);
    j["initial"] = g.state_name(g.initial);
    j["states"] = states;
    j["arcs"] = nlohmann::json::array();
    for (const auto& [u, v] : arcs)
        j["arcs"].push_back({u, v});
    return j;
}

} // namespace csm
