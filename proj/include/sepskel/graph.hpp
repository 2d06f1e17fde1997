#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace sepskel {

using Vec3 = Eigen::Vector3d;
using VertexId = std::uint32_t;
using VertexSet = std::vector<VertexId>;

/// Undirected graph with a 3D position per vertex.
///
/// Adjacency lists are kept sorted, symmetric and free of self-loops and
/// parallel edges. Every other module treats this as the shape.
class SpatialGraph {
public:
    SpatialGraph() = default;

    /// Builds a graph from positions and an edge list. Duplicate edges are
    /// merged; self-loops and out-of-range endpoints throw
    /// std::invalid_argument.
    SpatialGraph(std::vector<Vec3> positions,
                 std::span<const std::pair<VertexId, VertexId>> edges);

    std::size_t vertex_count() const { return positions_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    bool empty() const { return positions_.empty(); }

    const Vec3& position(VertexId v) const { return positions_[v]; }
    std::span<const Vec3> positions() const { return positions_; }
    void set_positions(std::vector<Vec3> positions);

    std::span<const VertexId> neighbors(VertexId v) const { return adjacency_[v]; }
    std::size_t degree(VertexId v) const { return adjacency_[v].size(); }
    bool has_edge(VertexId u, VertexId v) const;

    /// Edges as (min, max) pairs in lexicographic order.
    std::vector<std::pair<VertexId, VertexId>> edges() const;

    double edge_length(VertexId u, VertexId v) const {
        return (positions_[u] - positions_[v]).norm();
    }

    double bounding_box_diagonal() const { return diagonal_; }

    /// Relative epsilon used wherever a distance appears in a denominator.
    double epsilon() const { return diagonal_ > 0.0 ? 1e-12 * diagonal_ : 1.0; }

private:
    std::vector<Vec3> positions_;
    std::vector<std::vector<VertexId>> adjacency_;
    std::size_t edge_count_ = 0;
    double diagonal_ = 0.0;

    void update_diagonal();
};

/// Partition of `subset` into parts connected through vertices of `subset`.
/// Each part is sorted; parts are ordered by their smallest vertex.
std::vector<VertexSet> connected_components(const SpatialGraph& graph,
                                            std::span<const VertexId> subset);

/// Components of the whole graph.
std::vector<VertexSet> connected_components(const SpatialGraph& graph);

/// Connects each vertex to every vertex within `k` hops whose Euclidean
/// distance does not exceed `radius` (when given).
SpatialGraph saturate(const SpatialGraph& graph, int k,
                      std::optional<double> radius = std::nullopt);

struct Contraction {
    SpatialGraph graph;
    /// mapping[input vertex] = output vertex.
    std::vector<VertexId> mapping;
};

/// Shortest-edge-first contraction. Merged vertices sit at the centroid of
/// all input vertices they absorbed. Stops once the vertex count reaches
/// max(1, floor(target_fraction * |V|)) or no edge is left.
Contraction simplify_contract(const SpatialGraph& graph, double target_fraction);

/// Jacobi Laplacian smoothing of `movable` with inverse-edge-length weights;
/// every other vertex stays put. Returns positions for all vertices.
std::vector<Vec3> smooth_positions(const SpatialGraph& graph,
                                   std::span<const VertexId> movable,
                                   int iterations);

/// First Betti number E - V + C.
long betti_number(const SpatialGraph& graph);

} // namespace sepskel
