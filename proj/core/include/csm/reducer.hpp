#pragma once

#include "csm/graph.hpp"
#include "csm/labeling.hpp"

#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <unordered_set>
#include <utility>

namespace csm {

enum class Verdict : std::uint8_t { Reduce, Keep };

/// Why a successor pair was reduced or kept. `ok` marks a plain reduce;
/// the remaining codes name the blocking rule or loop guard.
enum class Reason : std::uint8_t {
    ok,
    ear_i,
    ear_ii,
    back_edge_iii,
    protected_iv,
    exception_v,
    visible,
    cycle_guard_a,
    taken_guard_b,
};

std::string to_string(Verdict v);
std::string to_string(Reason r);

struct SuccessorVerdict {
    StateTuple target;
    Verdict verdict = Verdict::Keep;
    Reason reason = Reason::ok;
};

/// Outcome of one skip attempt on the arc from `from` to `via` (the arc
/// may be virtual: earlier skips in the same analysis create it).
struct Decision {
    StateTuple from, via;
    bool invisible = false;
    std::vector<SuccessorVerdict> verdicts;

    bool all_reduced() const;
    nlohmann::json to_json(const SystemInfo& info) const;
};

struct ReductionContext {
    LabelContext labels; // over the completed atom set
    std::unordered_set<StateTuple, TupleHash> protected_states;
    bool reduction_allowed = true;
    bool relaxed_v = false;       // sibling-group exception to restriction iv
    std::size_t max_passes = 1;   // >1 re-reduces the output until stable
    bool record_decisions = true;
};

/// Resolves a completed prop set into a ready-to-use context.
ReductionContext make_reduction_context(const PropSet& props,
                                        std::shared_ptr<const SystemInfo> info);

struct ReductionReport {
    std::shared_ptr<const SystemInfo> info;
    bool reduction_allowed = true;
    bool online = false;
    std::size_t states_before = 0, states_after = 0;
    std::size_t arcs_before = 0, arcs_after = 0;
    std::vector<StateTuple> skipped_states;
    std::vector<std::pair<StateTuple, StateTuple>> removed_arcs;
    std::vector<std::pair<StateTuple, StateTuple>> added_arcs;
    std::size_t ratio_num = 0, ratio_den = 0; // (states+arcs) before over after
    std::vector<Decision> decisions;
    std::size_t passes = 0;
    std::size_t peak_resident_states = 0; // on-line runs only

    nlohmann::json to_json(bool include_decisions = false) const;
};

/// Definition of arc invisibility: both endpoints carry identical labels
/// over the completed atom set.
bool is_invisible(const Graph& g, std::uint32_t src, std::uint32_t dst,
                  const Labeling& labels);

/// Applies the per-pair restrictions to the arc (si, sj), assuming it was
/// already found invisible: an ear cannot be reduced (i), a terminal
/// target cannot (ii), a pair looping back to si is kept while its
/// siblings may go (iii), and a protected target blocks everything (iv)
/// unless every successor of si is also one of sj (v).
Decision check_restrictions(const Graph& g, std::uint32_t si, std::uint32_t sj,
                            const ReductionContext& ctx, const Labeling& labels);

/// One-shot application of a decision: reduced pairs gain the direct arc,
/// the arc (si, sj) disappears only when every pair was reduced, and
/// states no longer reachable from the initial state are dropped. Throws
/// std::logic_error if an ear would be created.
Graph apply_reduction(const Graph& g, const Decision& d);

/// One-pass worklist reduction over a fully built graph: starting from the
/// preserved initial state, successors (and successors of successors) are
/// skipped while invisible and unrestricted; a candidate seen twice within
/// one analysis is kept (cycle guard), and an attempt to skip an already
/// preserved state ends the analysis with the remaining frontier committed
/// (trap guard). Candidates are attempted in lexicographic tuple order.
std::pair<Graph, ReductionReport> reduce_offline(const Graph& g,
                                                 const ReductionContext& ctx);

/// Successor provider for the on-line reduction; must present RG₋@
/// semantics (no ears at non-terminal states, an ear at terminal ones).
struct OnlineSource {
    std::shared_ptr<const SystemInfo> info;
    StateTuple initial;
    std::function<std::vector<StateTuple>(const StateTuple&)> successors;
    std::function<SignalSet(const StateTuple&)> outputs;
    std::size_t cap = kDefaultStateCap;
};

/// Wraps a system's lock-step stepper as an on-line successor source.
OnlineSource system_source(const CsmSystem& sys, std::size_t cap = kDefaultStateCap);

/// Same contract and traversal order as reduce_offline, but states are
/// discovered and labeled on demand instead of from a prebuilt graph; the
/// report carries the peak number of resident states. Throws LimitError
/// when the source cap is exceeded.
std::pair<Graph, ReductionReport> reduce_online(const OnlineSource& source,
                                                const ReductionContext& ctx);

} // namespace csm
