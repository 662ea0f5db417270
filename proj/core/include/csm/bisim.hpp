#pragma once

#include "csm/eval.hpp"
#include "csm/graph.hpp"
#include "csm/labeling.hpp"
#include "csm/temporal.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace csm {

/// Blocks over the disjoint union of two graphs. Combined ids: states of
/// the first graph keep their id, states of the second are offset by the
/// first graph's size.
struct Partition {
    std::vector<std::uint32_t> block_of;
    std::size_t block_count = 0;
    std::size_t first_size = 0;

    std::uint32_t block(bool second_graph, std::uint32_t id) const {
        return block_of[second_graph ? first_size + id : id];
    }
};

/// Equivalence classes of mutual stuttering similarity over the two
/// graphs' disjoint union. The underlying preorder is refined iteratively
/// from label equality until stable: t covers s when every move of s is
/// matched by t after finitely many moves through states still covering
/// s (divergence-blind). Two states share a block when each covers the
/// other, which is exactly what the universal modalities cannot tell
/// apart. Both labelings must be over the same atom list.
Partition stuttering_classes(const Graph& g1, const Labeling& l1, const Graph& g2,
                             const Labeling& l2);

struct BisimCheck {
    bool ok = true;
    std::vector<std::string> offenders;
};

/// True iff the initial states share a block and every state of `reduced`
/// shares a block with its tuple namesake in `full`; offenders name any
/// state that fails.
BisimCheck check_bisimilar(const Graph& full, const Labeling& lf, const Graph& reduced,
                           const Labeling& lr);

/// Deterministic pseudo-random formulas over the prop set's atoms: free
/// boolean algebra over modal units AG/AF/A[·W·] (with propositional
/// operands, plus the always-eventually response shape), and next-step
/// operators only anchored at states whose `in s` atom the set carries
/// (and, for next-in-automaton, whose projection atom it carries), the
/// positions where the completed set licenses them.
std::vector<TemporalFormula> generate_corpus(const PropSet& props, int max_depth,
                                             std::uint64_t seed, std::size_t count);

struct FormulaVerdict {
    std::string text;
    bool full_truth = false;
    bool reduced_truth = false;
    bool match = false;
};

struct DiffReport {
    std::vector<FormulaVerdict> verdicts;
    std::size_t mismatches = 0;
    std::size_t states_compared = 0; // states the graphs share

    nlohmann::json to_json() const;
};

/// Evaluates every corpus formula on both graphs and compares truth at the
/// initial state and at every shared state (matched by tuple).
DiffReport check_theorem1(const Graph& full, const Graph& reduced, const PropSet& props,
                          const std::vector<TemporalFormula>& corpus);

} // namespace csm
