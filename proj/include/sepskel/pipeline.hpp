#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sepskel/graph.hpp"
#include "sepskel/packing.hpp"
#include "sepskel/separators.hpp"
#include "sepskel/skeleton.hpp"

namespace sepskel {

enum class InputFormat { Graph, Mesh, Voxels, Points };

/// From --format when given ("sgraph", "obj", "vox", "xyz"), else from the
/// file extension. Throws std::invalid_argument when neither works.
InputFormat infer_format(const std::filesystem::path& path, const std::string& format = {});

struct PipelineConfig {
    double tau = kDefaultTau;
    std::uint64_t seed = 0;
    int threads = 1;
    bool optimize = false;
    bool deterministic = false;  // force the serial sampler
    int smooth_iters = 0;
    PositionMode position_mode = PositionMode::ClassAverage;

    // ingestion
    int knn = 10;
    double radius = 1.0;
    std::optional<int> sat_l;           // default: 1 for meshes, 3 for points
    std::optional<double> sat_radius;   // default: none for meshes, 2*radius for points
    double contract = 1.0;
    float vox_threshold = 0.5f;

    void validate() const;
};

struct LoadedGraph {
    SpatialGraph graph;
    std::vector<VertexId> mapping;  // input element -> graph vertex
    std::size_t skipped_faces = 0;
};

/// Reads an input of any supported format and turns it into a graph.
LoadedGraph load_graph(const std::filesystem::path& path, InputFormat format,
                       const PipelineConfig& config);

struct StageTimes {
    double ingest = 0, separators = 0, packing = 0, extraction = 0, smoothing = 0;
};

struct PipelineStats {
    std::size_t input_vertices = 0;
    std::size_t separators_found = 0;
    std::size_t separators_packed = 0;
    std::size_t skeleton_vertices = 0;
    std::size_t leaves = 0;    // degree 1
    std::size_t branches = 0;  // degree >= 3
    StageTimes seconds;
};

struct PipelineResult {
    Skeleton skeleton;
    PipelineStats stats;
    std::vector<std::string> warnings;
};

SeparatorSet find_separators(const SpatialGraph& graph, const PipelineConfig& config);

/// Sampling -> packing -> extraction -> smoothing -> radii on a loaded graph.
/// Throws InputError on an empty graph.
PipelineResult run_pipeline(const SpatialGraph& graph, const PipelineConfig& config);

/// Leaf and branch counts of a finished skeleton.
void count_topology(const SpatialGraph& skeleton, PipelineStats& stats);

void print_stats(std::ostream& out, const PipelineStats& stats);

} // namespace sepskel
