#pragma once

#include "csm/model.hpp"
#include "csm/temporal.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace csm::fixtures {

/// Single automaton whose transition relation is exactly the given arc
/// list (all guards constant true; nondeterministic choice where a state
/// has several arcs). The first state is initial. Every state needs at
/// least one outgoing arc.
CsmSystem single_automaton(
    const std::string& name,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& states,
    const std::vector<std::pair<std::string, std::string>>& arcs);

/// n states in a line, terminal ear at the end. With `mark_last` the final
/// state outputs signal `t`, every other state outputs nothing.
CsmSystem chain(std::size_t n, bool mark_last = false);

/// Four states: top fans out to two middle states and directly to the
/// bottom, both middles rejoin at the bottom (terminal). Every state
/// outputs `q`, so all arcs look alike to any formula over q.
CsmSystem rhombus();

/// `stages` rhombi chained top to bottom; uniform outputs.
CsmSystem rhombus_ladder(std::size_t stages);

/// An entry state feeding a k-cycle; uniform outputs.
CsmSystem cycle(std::size_t k);

/// n states, every ordered pair an arc (self-loops included); uniform
/// outputs.
CsmSystem near_clique(std::size_t n);

/// Deterministic pseudo-random system: 2-3 automata with 2-5 states each,
/// a small signal pool with repeated output profiles (so invisible arcs
/// are common), guards kept complete by construction, occasionally one
/// external signal under the all-subsets environment.
CsmSystem random_system(std::uint64_t seed);

/// Deterministic pseudo-random property over the system's signals;
/// occasionally anchors a next-step operator at the initial state or uses
/// next-in-automaton, so completion rules get exercised.
TemporalFormula random_base_formula(const CsmSystem& sys, std::uint64_t seed);

} // namespace csm::fixtures
