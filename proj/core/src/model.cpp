#include "csm/model.hpp"

#include "csm/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <unordered_set>

namespace csm {

std::optional<std::uint32_t> CsmAutomaton::state_index(const std::string& state_name) const {
    for (std::uint32_t i = 0; i < states.size(); ++i)
        if (states[i].name == state_name)
            return i;
    return std::nullopt;
}

bool CsmAutomaton::state_terminal(std::uint32_t state) const {
    for (std::uint32_t a : outgoing[state])
        if (arcs[a].dst != state)
            return false;
    return true;
}

std::optional<std::uint32_t> CsmSystem::automaton_index(const std::string& automaton_name) const {
    for (std::uint32_t i = 0; i < automata.size(); ++i)
        if (automata[i].name == automaton_name)
            return i;
    return std::nullopt;
}

std::vector<SignalSet> CsmSystem::external_choices() const {
    switch (environment.mode) {
    case EnvironmentMode::Closed:
        return {SignalSet(signals.size())};
    case EnvironmentMode::Fixed:
        return {environment.fixed};
    case EnvironmentMode::AllSubsets: {
        std::vector<SignalId> ext;
        for (SignalId i = 0; i < external.size(); ++i)
            if (external.test(i))
                ext.push_back(i);
        std::vector<SignalSet> out;
        out.reserve(std::size_t{1} << ext.size());
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << ext.size()); ++mask) {
            SignalSet s(signals.size());
            for (std::size_t i = 0; i < ext.size(); ++i)
                if ((mask >> i) & 1)
                    s.set(ext[i]);
            out.push_back(std::move(s));
        }
        return out;
    }
    }
    return {SignalSet(signals.size())};
}

namespace {

// Tokenized line with its offset into the source, for error reporting.
struct Line {
    std::vector<std::string> tokens;
    std::size_t offset = 0;
};

std::vector<Line> tokenize_lines(std::string_view text) {
    std::vector<Line> lines;
    std::size_t line_start = 0;
    while (line_start <= text.size()) {
        std::size_t eol = text.find('\n', line_start);
        if (eol == std::string_view::npos)
            eol = text.size();
        std::string_view raw = text.substr(line_start, eol - line_start);
        std::size_t hash = raw.find('#');
        if (hash != std::string_view::npos)
            raw = raw.substr(0, hash);

        Line line;
        line.offset = line_start;
        std::size_t i = 0;
        while (i < raw.size()) {
            char c = raw[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
                continue;
            }
            if (c == '{' || c == '}') {
                line.tokens.emplace_back(1, c);
                ++i;
                continue;
            }
            // `arc` guards are re-parsed as formulas; grab the rest verbatim.
            if (!line.tokens.empty() && line.tokens.front() == "arc" &&
                line.tokens.size() >= 4 && line.tokens.back() == "when") {
                std::string rest(raw.substr(i));
                while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back())))
                    rest.pop_back();
                line.tokens.push_back(rest);
                break;
            }
            std::size_t start = i;
            while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i])) &&
                   raw[i] != '{' && raw[i] != '}')
                ++i;
            line.tokens.emplace_back(raw.substr(start, i - start));
        }
        if (!line.tokens.empty())
            lines.push_back(std::move(line));
        if (eol == text.size())
            break;
        line_start = eol + 1;
    }
    return lines;
}

struct RawArc {
    std::string src, dst, guard;
    std::size_t offset = 0;
};

struct RawAutomaton {
    std::string name;
    std::vector<std::pair<ComponentState, std::vector<std::string>>> states; // state + output names
    std::vector<RawArc> arcs;
    std::size_t offset = 0;
};

// Reads `{ name name ... }` starting at tokens[i]; advances i past '}'.
std::vector<std::string> read_name_block(const Line& line, std::size_t& i) {
    if (i >= line.tokens.size() || line.tokens[i] != "{")
        throw ParseError("expected '{'", line.offset);
    ++i;
    std::vector<std::string> names;
    while (i < line.tokens.size() && line.tokens[i] != "}")
        names.push_back(line.tokens[i++]);
    if (i >= line.tokens.size())
        throw ParseError("expected '}'", line.offset);
    ++i;
    return names;
}

} // namespace

CsmSystem parse_system(std::string_view text) {
    std::vector<Line> lines = tokenize_lines(text);
    CsmSystem sys;
    std::vector<std::string> external_names;
    std::vector<RawAutomaton> raw;
    RawAutomaton* current = nullptr;

    for (const Line& line : lines) {
        const auto& t = line.tokens;
        if (t[0] == "system") {
            if (t.size() != 2)
                throw ParseError("expected 'system <name>'", line.offset);
            sys.name = t[1];
        } else if (t[0] == "external") {
            std::size_t i = 1;
            external_names = read_name_block(line, i);
        } else if (t[0] == "automaton") {
            if (t.size() != 3 || t[2] != "{")
                throw ParseError("expected 'automaton <name> {'", line.offset);
            if (!is_identifier(t[1]))
                throw ParseError("invalid automaton name '" + t[1] + "'", line.offset);
            for (const auto& a : raw)
                if (a.name == t[1])
                    throw ParseError("duplicate automaton name '" + t[1] + "'", line.offset);
            raw.push_back(RawAutomaton{t[1], {}, {}, line.offset});
            current = &raw.back();
        } else if (t[0] == "state") {
            if (!current)
                throw ParseError("'state' outside automaton block", line.offset);
            if (t.size() < 2 || !is_identifier(t[1]))
                throw ParseError("expected 'state <name>'", line.offset);
            ComponentState st;
            st.name = t[1];
            std::vector<std::string> outs;
            std::size_t i = 2;
            while (i < t.size()) {
                if (t[i] == "init") {
                    st.is_initial = true;
                    ++i;
                } else if (t[i] == "outputs") {
                    ++i;
                    outs = read_name_block(line, i);
                } else {
                    throw ParseError("unexpected token '" + t[i] + "' in state line",
                                     line.offset);
                }
            }
            for (const auto& [existing, _] : current->states)
                if (existing.name == st.name)
                    throw ParseError("duplicate state name '" + st.name + "' in automaton '" +
                                         current->name + "'",
                                     line.offset);
            current->states.emplace_back(std::move(st), std::move(outs));
        } else if (t[0] == "arc") {
            if (!current)
                throw ParseError("'arc' outside automaton block", line.offset);
            // arc <src> -> <dst> when <formula>
            if (t.size() != 6 || t[2] != "->" || t[4] != "when")
                throw ParseError("expected 'arc <src> -> <dst> when <formula>'", line.offset);
            current->arcs.push_back(RawArc{t[1], t[3], t[5], line.offset});
        } else if (t[0] == "}") {
            current = nullptr;
        } else {
            throw ParseError("unexpected token '" + t[0] + "'", line.offset);
        }
    }
    if (raw.empty())
        throw ParseError("no automata declared", 0);

    // Alphabet: every output of every state, then external signals.
    for (auto& a : raw)
        for (auto& [st, outs] : a.states)
            for (const std::string& o : outs) {
                if (!is_identifier(o))
                    throw ParseError("invalid signal name '" + o + "'", a.offset);
                sys.signals.intern(o);
            }
    for (const std::string& e : external_names) {
        if (!is_identifier(e))
            throw ParseError("invalid signal name '" + e + "'", 0);
        sys.signals.intern(e);
    }
    sys.external = sys.signals.empty_set();
    for (const std::string& e : external_names)
        sys.external.set(*sys.signals.find(e));

    for (auto& a : raw) {
        CsmAutomaton out;
        out.name = a.name;
        int initials = 0;
        for (auto& [st, outs] : a.states) {
            ComponentState s = st;
            s.outputs = sys.signals.empty_set();
            for (const std::string& o : outs)
                s.outputs.set(*sys.signals.find(o));
            if (s.is_initial) {
                ++initials;
                out.initial = static_cast<std::uint32_t>(out.states.size());
            }
            out.states.push_back(std::move(s));
        }
        if (out.states.empty())
            throw ParseError("automaton '" + a.name + "' has no states", a.offset);
        if (initials != 1)
            throw ParseError("automaton '" + a.name + "' must have exactly one init state, has " +
                                 std::to_string(initials),
                             a.offset);
        out.outgoing.resize(out.states.size());
        for (const RawArc& arc : a.arcs) {
            auto src = out.state_index(arc.src);
            auto dst = out.state_index(arc.dst);
            if (!src || !dst)
                throw ParseError("arc endpoint '" + (src ? arc.dst : arc.src) +
                                     "' is not a declared state of automaton '" + a.name + "'",
                                 arc.offset);
            ComponentArc ca;
            ca.src = *src;
            ca.dst = *dst;
            try {
                ca.guard = parse_bool_formula(arc.guard, sys.signals);
            } catch (const ParseError& e) {
                throw ParseError("in guard of arc " + arc.src + " -> " + arc.dst + ": " +
                                     e.what(),
                                 arc.offset);
            }
            out.outgoing[*src].push_back(static_cast<std::uint32_t>(out.arcs.size()));
            out.arcs.push_back(std::move(ca));
        }
        sys.automata.push_back(std::move(out));
    }

    // External signals come from the environment only; a state producing one
    // would contradict the declaration.
    for (const auto& a : sys.automata)
        for (const auto& st : a.states) {
            SignalSet overlap = st.outputs & sys.external;
            if (overlap.any())
                throw ParseError("external signal '" + sys.signals.names_of(overlap)[0] +
                                     "' is produced by state '" + st.name + "' of automaton '" +
                                     a.name + "'",
                                 0);
        }

    return sys;
}

ValidationReport validate(const CsmSystem& sys) {
    ValidationReport report;
    report.pass = true;
    for (const auto& a : sys.automata) {
        AutomatonCheck check;
        check.automaton = a.name;
        for (const auto& st : a.states)
            check.initial_count += st.is_initial ? 1 : 0;
        if (check.initial_count != 1)
            report.pass = false;
        for (std::uint32_t s = 0; s < a.states.size(); ++s) {
            BoolFormula disj = BoolFormula::constant(false);
            for (std::uint32_t arc : a.outgoing[s])
                disj = BoolFormula::disjunction(std::move(disj), a.arcs[arc].guard);
            StateCheck sc;
            sc.state = a.states[s].name;
            sc.complete = is_tautology(disj, sys.signals.size());
            if (!sc.complete)
                report.pass = false;
            check.states.push_back(std::move(sc));
        }
        report.automata.push_back(std::move(check));
    }
    return report;
}

std::string ValidationReport::to_text() const {
    std::ostringstream out;
    out << (pass ? "valid" : "INVALID") << "\n";
    for (const auto& a : automata) {
        out << "automaton " << a.automaton << ": initial states " << a.initial_count << "\n";
        for (const auto& s : a.states)
            if (!s.complete)
                out << "  state " << s.state << ": incomplete guard disjunction\n";
    }
    return out.str();
}

nlohmann::json ValidationReport::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["pass"] = pass;
    j["automata"] = nlohmann::json::array();
    for (const auto& a : automata) {
        nlohmann::json ja;
        ja["name"] = a.automaton;
        ja["initial_count"] = a.initial_count;
        ja["states"] = nlohmann::json::array();
        for (const auto& s : a.states)
            ja["states"].push_back({{"name", s.state}, {"complete", s.complete}});
        j["automata"].push_back(std::move(ja));
    }
    return j;
}

} // namespace csm
