#pragma once

#include <span>
#include <vector>

#include "sepskel/graph.hpp"
#include "sepskel/packing.hpp"

namespace sepskel {

enum class PositionMode {
    ClassAverage,      // mean of the maximized class
    SeparatorAverage,  // mean of the packed (minimal) separator only
};

/// Partition of the input vertices into classes. Classes
/// [0, separator_classes) are the packed separators, in packing order; the
/// rest are connected components that no separator reaches.
struct Assignment {
    std::vector<VertexId> label;  // input vertex -> class
    std::size_t separator_classes = 0;
    std::size_t class_count = 0;

    std::size_t orphan_classes() const { return class_count - separator_classes; }
};

/// Grows every packed separator along the graph (Euclidean edge lengths);
/// each vertex joins its nearest separator, ties going to the lower id.
Assignment maximize_separators(const SpatialGraph& graph, const PackedSeparators& packed);

struct WeightedGraph {
    SpatialGraph graph;
    std::vector<double> weight;
};

/// One node per class at the average of its vertices, an edge wherever an
/// input edge crosses two classes, weight = class size. With
/// PositionMode::SeparatorAverage, separator classes sit at the mean of the
/// packed separator instead.
WeightedGraph quotient_graph(const SpatialGraph& graph, const Assignment& assignment,
                             PositionMode mode = PositionMode::ClassAverage,
                             const PackedSeparators* packed = nullptr);

struct CollapsedGraph {
    SpatialGraph graph;
    std::vector<double> weight;
    std::size_t star_centers = 0;  // appended after the original nodes
};

/// Merges triangles that share an edge into complexes and replaces each
/// complex by a star around a new centre node.
CollapsedGraph collapse_clique_complexes(const SpatialGraph& graph, std::span<const double> weight);

struct Skeleton {
    SpatialGraph graph;
    std::vector<double> weight;
    std::vector<double> radius;
    std::vector<VertexId> assignment;  // input vertex -> skeleton node
    std::size_t class_nodes = 0;       // nodes at or above this index are star centres

    bool is_star_center(VertexId v) const { return v >= class_nodes; }
};

/// Weighted Laplacian smoothing where heavier, lower-valence neighbours pull
/// harder. Node count, edges, weights and assignment are unchanged.
Skeleton smooth_skeleton(Skeleton skel, int iterations);

/// Mean distance from each node to its assigned input vertices; star centres
/// take the mean radius of their leaves.
void annotate_radii(Skeleton& skel, const SpatialGraph& graph);

struct ExtractOptions {
    PositionMode position_mode = PositionMode::ClassAverage;
    int smooth_iterations = 0;
};

/// maximize -> quotient -> collapse -> smooth -> radii.
Skeleton extract_skeleton(const SpatialGraph& graph, const PackedSeparators& packed,
                          const ExtractOptions& options = {});

} // namespace sepskel
