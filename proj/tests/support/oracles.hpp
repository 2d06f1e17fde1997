#pragma once

#include <span>
#include <string>
#include <vector>

#include "sepskel/graph.hpp"
#include "sepskel/packing.hpp"
#include "sepskel/reeb.hpp"
#include "sepskel/separators.hpp"

namespace sepskel::testing {

/// Removing Σ from the subgraph induced by Σ and its fronts leaves the fronts
/// in at least two pieces (one for a leaf). Also checks the structural
/// invariants of a Separator. Returns an empty string on success.
std::string check_separator(const SpatialGraph& graph, const Separator& sep);

/// Every vertex of Σ touches at least two fronts.
bool minimal_by_definition(const SpatialGraph& graph, std::span<const VertexId> sigma,
                           std::span<const VertexSet> fronts);

/// Brute-force pairwise-overlap packing, written from the description only.
std::vector<std::size_t> pack_all_pairs(const SeparatorSet& set);

/// Reeb separator: connected, both sides nonempty and not adjacent to each
/// other, and the sides disconnected once Σ is removed from Σ ∪ N(Σ).
std::string check_sweep_separator(const SpatialGraph& graph, const Separator& sep);

/// Q separates frozen from unvisited within the whole graph.
bool queue_separates(const SpatialGraph& graph, std::span<const SweepState> state);

bool trees_isomorphic(const SpatialGraph& a, const SpatialGraph& b);

/// Backtracking search guided by colour refinement; fine for a few hundred vertices.
bool graphs_isomorphic(const SpatialGraph& a, const SpatialGraph& b);

/// Mean edge length.
double average_edge_length(const SpatialGraph& graph);

} // namespace sepskel::testing
