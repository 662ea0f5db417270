#pragma once

#include "csm/graph.hpp"
#include "csm/labeling.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>

namespace csm {

/// DOT rendering: states labeled with their tuple and output set, the
/// initial state double-circled, arcs labeled with their guard when known.
std::string to_dot(const Graph& g);

/// Full-graph view annotated against a reduced graph: states and arcs that
/// the reduction dropped are dashed, arcs the reduction added are drawn
/// bold between their surviving endpoints.
std::string to_dot_annotated(const Graph& full, const Graph& reduced);

nlohmann::json graph_to_json(const Graph& g);
nlohmann::json graph_to_json(const Graph& g, const Labeling& labels);

/// Rebuilds a graph, including naming metadata, from its JSON dump.
/// Throws ParseError on schema violations.
Graph graph_from_json(const nlohmann::json& j);

/// Canonical tuple-keyed form for comparing graphs independently of their
/// internal state numbering.
nlohmann::json canonical_snapshot(const Graph& g);

} // namespace csm
