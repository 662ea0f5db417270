#pragma once

#include "csm/graph.hpp"
#include "csm/temporal.hpp"

#include <vector>

namespace csm {

struct EvalResult {
    bool at_initial = false;
    std::vector<char> sat; // satisfying set, indexed by state id
};

/// Evaluates a closed formula on a total graph by bottom-up fixpoint
/// labeling. AG/AF are greatest/least fixpoints over universal path
/// quantification, A[f W g] the greatest fixpoint of g ∨ (f ∧ AX ·), and
/// AX@a holds where every path satisfies the operand at the first change
/// of automaton a's projection (vacuously where that projection is a
/// terminal component state). Quantifiers expand over their range; `@s f`
/// is the truth of f at s, constant across states.
///
/// An `in s` atom naming a state absent from the graph is false; an `@s`
/// or quantifier-range designator that cannot be found throws ResolveError.
EvalResult evaluate(const Graph& g, const TemporalFormula& f);

/// State ids a quantifier range denotes on this graph. Future ranges are
/// the BFS closure of the designated state.
std::vector<std::uint32_t> range_states(const Graph& g, const QuantRange& r);

} // namespace csm
