#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sepskel/graph.hpp"
#include "sepskel/separators.hpp"

namespace sepskel {

using HeightField = std::vector<double>;

inline constexpr int kDefaultHeightSmoothing = 10;

/// Projection onto `axis` (normalized here), then `smooth_iters` rounds of
/// h <- h/2 + mean(neighbour h)/2.
HeightField axis_height(const SpatialGraph& graph, const Vec3& axis,
                        int smooth_iters = kDefaultHeightSmoothing);

enum class SweepState : std::uint8_t { Unvisited, Queued, Frozen };

/// Called after initialization and after every freeze with the per-vertex state.
using SweepObserver = std::function<void(std::span<const SweepState>)>;

/// Level-set sweep from the discrete minima of `h`. Emits components of the
/// queue that share nothing with earlier emissions and are not the direct
/// successors of one, so the output is pairwise disjoint. Fronts are the
/// frozen-side and unvisited-side neighbours.
SeparatorSet sweep_separators(const SpatialGraph& graph, std::span<const double> h,
                              const SweepObserver& observer = {});

} // namespace sepskel
