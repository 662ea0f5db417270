#pragma once

#include "csm/bool_formula.hpp"
#include "csm/signal.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace csm {

/// Moore state of a component automaton: signals are generated while the
/// automaton stays here.
struct ComponentState {
    std::string name;
    SignalSet outputs;
    bool is_initial = false;
};

/// Guarded transition between two states of one automaton. A self-loop
/// (src == dst) is an ear.
struct ComponentArc {
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    BoolFormula guard;
};

struct CsmAutomaton {
    std::string name;
    std::vector<ComponentState> states;
    std::vector<ComponentArc> arcs;
    std::vector<std::vector<std::uint32_t>> outgoing; // arc indices per state
    std::uint32_t initial = 0;

    std::optional<std::uint32_t> state_index(const std::string& state_name) const;

    /// A component state is terminal when every outgoing arc is an ear.
    bool state_terminal(std::uint32_t state) const;
};

enum class EnvironmentMode : std::uint8_t {
    Closed,     ///< no external signals are ever active
    AllSubsets, ///< every subset of the external signals is tried each step
    Fixed,      ///< a constant external assignment
};

struct EnvironmentPolicy {
    EnvironmentMode mode = EnvironmentMode::Closed;
    SignalSet fixed; // meaningful for Fixed only
};

/// A system of component automata stepping in lock-step. The alphabet is
/// the union of all state outputs and the declared external signals.
struct CsmSystem {
    std::string name;
    SignalTable signals;
    std::vector<CsmAutomaton> automata;
    SignalSet external;
    EnvironmentPolicy environment;

    std::optional<std::uint32_t> automaton_index(const std::string& automaton_name) const;

    /// The external assignments the environment policy allows per step.
    std::vector<SignalSet> external_choices() const;
};

/// Parses the line-oriented system format (`#` starts a comment):
///
///     system <name>
///     external { e1 e2 }          # optional
///     automaton <name> {
///       state <name> [init] [outputs { p q }]
///       arc <src> -> <dst> when <bool-formula>
///     }
///
/// Guards are resolved against the full alphabet, so they may reference
/// signals produced by automata declared later. Throws ParseError on
/// syntax problems, duplicate names, dangling arc endpoints, missing or
/// duplicated initial states, and external signals that some state outputs.
CsmSystem parse_system(std::string_view text);

struct StateCheck {
    std::string state;
    bool complete = false;
};

struct AutomatonCheck {
    std::string automaton;
    int initial_count = 0;
    std::vector<StateCheck> states;
};

struct ValidationReport {
    bool pass = false;
    std::vector<AutomatonCheck> automata;

    std::string to_text() const;
    nlohmann::json to_json() const;
};

/// Checks completeness: per state, the disjunction of outgoing guards must
/// be a tautology, so the lock-step successor relation is total.
ValidationReport validate(const CsmSystem& sys);

} // namespace csm
