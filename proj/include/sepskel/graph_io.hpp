#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "sepskel/graph.hpp"

namespace sepskel {

/// Contents of a ".sgraph" file. `radius` and `weight` are filled only for
/// the skeleton variant (five numbers per vertex line).
struct GraphFile {
    SpatialGraph graph;
    std::vector<double> radius;
    std::vector<double> weight;

    bool is_skeleton() const { return !weight.empty(); }
};

GraphFile read_sgraph(std::istream& in);
GraphFile read_sgraph(const std::filesystem::path& path);

void write_sgraph(std::ostream& out, const SpatialGraph& graph);
void write_sgraph(std::ostream& out, const SpatialGraph& graph,
                  std::span<const double> radius, std::span<const double> weight);
void write_sgraph(const std::filesystem::path& path, const GraphFile& file);

/// ".map" companion: one `m <input_id> <skeleton_node_id>` line per input vertex.
void write_map(std::ostream& out, std::span<const VertexId> assignment);
std::vector<VertexId> read_map(std::istream& in);

} // namespace sepskel
