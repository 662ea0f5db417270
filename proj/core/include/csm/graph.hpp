#pragma once

#include "csm/model.hpp"

#include <boost/container_hash/hash.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace csm {

enum class GraphKind : std::uint8_t { RG, RGMinusAt, RRG };

std::string to_string(GraphKind kind);

/// Per-automaton state index tuple identifying a global state. Tuples are
/// stable across graph transformations, so they name states where raw ids
/// would not survive.
using StateTuple = std::vector<std::uint32_t>;

using TupleHash = boost::hash<StateTuple>;

/// Naming and structure metadata a graph keeps so designators resolve and
/// states print without the originating system.
struct SystemInfo {
    std::vector<std::string> automaton_names;
    std::vector<std::vector<std::string>> state_names;  // per automaton
    std::vector<std::vector<char>> state_terminal;      // component-level terminality
    SignalTable signals;

    static std::shared_ptr<const SystemInfo> from(const CsmSystem& sys);

    std::optional<std::uint32_t> automaton_index(const std::string& name) const;
    std::optional<std::uint32_t> state_index(std::uint32_t automaton,
                                             const std::string& name) const;

    /// Renders a tuple as `(one,three)`.
    std::string tuple_name(const StateTuple& t) const;
};

struct GlobalState {
    StateTuple components;
    SignalSet outputs; // union of the component outputs
};

struct GlobalArc {
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
};

/// Explicit state graph. Arcs are deduplicated by (src, dst); `guards`
/// carries the diagnostic arc formulas where construction provides them.
struct Graph {
    GraphKind kind = GraphKind::RG;
    std::shared_ptr<const SystemInfo> info;
    std::vector<GlobalState> states;
    std::vector<std::vector<std::uint32_t>> succ; // sorted, unique
    std::vector<std::vector<std::uint32_t>> pred; // sorted, unique
    std::uint32_t initial = 0;
    std::unordered_map<StateTuple, std::uint32_t, TupleHash> index;
    std::unordered_map<std::uint64_t, BoolFormula> guards; // key src<<32|dst

    std::uint32_t add_state(GlobalState s);
    void add_arc(std::uint32_t src, std::uint32_t dst);
    bool has_arc(std::uint32_t src, std::uint32_t dst) const;
    std::size_t arc_count() const;

    std::optional<std::uint32_t> find(const StateTuple& t) const;
    std::string state_name(std::uint32_t id) const;

    /// Self-loop at `id` present?
    bool has_ear(std::uint32_t id) const { return has_arc(id, id); }

    /// All outgoing arcs of `id` are ears.
    bool terminal(std::uint32_t id) const;
};

/// Union of the component-state outputs for the given tuple.
SignalSet tuple_outputs(const CsmSystem& sys, const StateTuple& t);

/// One lock-step move: every automaton follows one enabled arc under
/// `active` = outputs(t) ∪ external. Returns the deduplicated, sorted set
/// of successor tuples; with `guards` non-null also the diagnostic formula
/// per successor (disjunction over arc combinations of the conjunction of
/// the chosen component guards). Throws std::logic_error if some automaton
/// has no enabled arc, which a validated system rules out.
std::vector<StateTuple> step(const CsmSystem& sys, const StateTuple& t,
                             const SignalSet& external,
                             std::vector<BoolFormula>* guards = nullptr);

inline constexpr std::size_t kDefaultStateCap = 1'000'000;

/// Builds the reachability graph by breadth-first closure of `step` from
/// the tuple of component initial states. Newly discovered successors are
/// numbered in lexicographic tuple order, so construction is deterministic.
/// Throws LimitError with partial statistics when `cap` is exceeded.
Graph build_rg(const CsmSystem& sys, std::size_t cap = kDefaultStateCap);

/// Removes every ear whose source has at least one non-ear arc; terminal
/// states keep their ear so the relation stays total.
Graph strip_ears(const Graph& g);

} // namespace csm
