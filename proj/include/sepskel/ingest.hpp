#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "sepskel/graph.hpp"

namespace sepskel {

// ---------------------------------------------------------------------------
// Polygon meshes
// ---------------------------------------------------------------------------

struct PolygonMesh {
    std::vector<Vec3> vertices;
    std::vector<std::vector<VertexId>> faces;  // 0-based
};

/// Wavefront-style reader: `v x y z` and `f i j k [l ...]` with 1-based
/// (or negative, relative) indices; `i/t/n` tokens use the first field.
/// Other records are ignored.
PolygonMesh read_obj(std::istream& in);
PolygonMesh read_obj(const std::filesystem::path& path);
void write_obj(std::ostream& out, const PolygonMesh& mesh);

struct MeshGraph {
    SpatialGraph graph;
    std::size_t skipped_faces = 0;  // faces with a repeated vertex
};

/// Union of polygon boundary edges. Quads keep their four sides only.
MeshGraph mesh_to_graph(const PolygonMesh& mesh);

// ---------------------------------------------------------------------------
// Voxel grids
// ---------------------------------------------------------------------------

struct VoxelGrid {
    std::array<std::uint32_t, 3> dims{0, 0, 0};
    std::array<float, 3> spacing{1.f, 1.f, 1.f};
    std::vector<float> values;  // x fastest

    VoxelGrid() = default;
    VoxelGrid(std::array<std::uint32_t, 3> d, std::array<float, 3> s = {1.f, 1.f, 1.f})
        : dims(d), spacing(s), values(std::size_t{d[0]} * d[1] * d[2], 0.f) {}

    std::size_t index(std::uint32_t x, std::uint32_t y, std::uint32_t z) const {
        return (std::size_t{z} * dims[1] + y) * dims[0] + x;
    }
    float& at(std::uint32_t x, std::uint32_t y, std::uint32_t z) { return values[index(x, y, z)]; }
    float at(std::uint32_t x, std::uint32_t y, std::uint32_t z) const {
        return values[index(x, y, z)];
    }
};

inline constexpr char kVoxelMagic[] = "SEPSKELVOX00001\n";

VoxelGrid read_voxels(std::istream& in);
VoxelGrid read_voxels(const std::filesystem::path& path);
void write_voxels(std::ostream& out, const VoxelGrid& grid);
void write_voxels(const std::filesystem::path& path, const VoxelGrid& grid);

/// One vertex per voxel with value > threshold, 26-connected.
SpatialGraph voxels_to_graph(const VoxelGrid& grid, float threshold);

/// Inside/outside voxelization of a closed mesh by ray parity along z.
/// The longest bounding-box side gets `longest_side` voxels.
VoxelGrid voxelize_mesh(const PolygonMesh& mesh, int longest_side);

// ---------------------------------------------------------------------------
// Point clouds
// ---------------------------------------------------------------------------

struct PointCloud {
    std::vector<Vec3> points;
};

PointCloud read_points(std::istream& in);
PointCloud read_points(const std::filesystem::path& path);

/// For each point, up to `k` nearest other points within `radius`, nearest
/// first (ties by lower index). Uses a uniform hash grid with cell = radius.
std::vector<std::vector<VertexId>> knn_within_radius(std::span<const Vec3> points, int k,
                                                     double radius);

/// Brute-force reference for knn_within_radius.
std::vector<std::vector<VertexId>> knn_within_radius_serial(std::span<const Vec3> points,
                                                            int k, double radius);

struct PointGraphParams {
    int k = 10;
    double radius = 1.0;
    int l = 3;
    double l_radius = 2.0;
    double target_fraction = 1.0;
};

struct PointGraph {
    SpatialGraph graph;
    std::vector<VertexId> mapping;  // point index -> graph vertex
};

/// kNN-within-radius graph, N^l saturation, then edge contraction.
PointGraph points_to_graph(const PointCloud& cloud, const PointGraphParams& params);

} // namespace sepskel
