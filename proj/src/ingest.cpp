#include "sepskel/ingest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "sepskel/errors.hpp"

namespace sepskel {

// ---------------------------------------------------------------------------
// OBJ
// ---------------------------------------------------------------------------

PolygonMesh read_obj(std::istream& in) {
    PolygonMesh mesh;
    std::vector<std::pair<std::vector<long long>, std::size_t>> raw_faces;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z)) throw ParseError("vertex needs three coordinates", lineno);
            mesh.vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::vector<long long> idx;
            std::string tok;
            while (ls >> tok) {
                const auto slash = tok.find('/');
                const std::string head = tok.substr(0, slash);
                std::size_t used = 0;
                long long i = 0;
                try {
                    i = std::stoll(head, &used);
                } catch (const std::exception&) {
                    throw ParseError("bad face index '" + tok + "'", lineno);
                }
                if (used != head.size() || i == 0)
                    throw ParseError("bad face index '" + tok + "'", lineno);
                idx.push_back(i);
            }
            if (idx.size() < 3) throw ParseError("face needs at least three vertices", lineno);
            // Negative indices are relative to the vertices read so far.
            for (auto& i : idx)
                if (i < 0) i = static_cast<long long>(mesh.vertices.size()) + i + 1;
            raw_faces.emplace_back(std::move(idx), lineno);
        }
    }
    const auto nv = static_cast<long long>(mesh.vertices.size());
    for (auto& [idx, ln] : raw_faces) {
        std::vector<VertexId> face;
        for (long long i : idx) {
            if (i < 1 || i > nv) throw ParseError("face index out of range", ln);
            face.push_back(static_cast<VertexId>(i - 1));
        }
        mesh.faces.push_back(std::move(face));
    }
    return mesh;
}

PolygonMesh read_obj(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_obj(in);
}

void write_obj(std::ostream& out, const PolygonMesh& mesh) {
    out.precision(17);
    for (const auto& p : mesh.vertices) out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    for (const auto& f : mesh.faces) {
        out << 'f';
        for (VertexId i : f) out << ' ' << i + 1;
        out << '\n';
    }
}

MeshGraph mesh_to_graph(const PolygonMesh& mesh) {
    MeshGraph out;
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (const auto& f : mesh.faces) {
        auto sorted = f;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            ++out.skipped_faces;
            continue;
        }
        for (std::size_t i = 0; i < f.size(); ++i) {
            VertexId a = f[i], b = f[(i + 1) % f.size()];
            if (a > b) std::swap(a, b);
            edges.emplace_back(a, b);
        }
    }
    out.graph = SpatialGraph(mesh.vertices, edges);
    return out;
}

// ---------------------------------------------------------------------------
// Voxels
// ---------------------------------------------------------------------------

namespace {

template <typename T>
T read_le(std::istream& in) {
    unsigned char buf[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(buf), sizeof(T)))
        throw ParseError("truncated voxel file", 0);
    std::uint32_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= std::uint32_t{buf[i]} << (8 * i);
    return std::bit_cast<T>(bits);
}

template <typename T>
void write_le(std::ostream& out, T value) {
    const auto bits = std::bit_cast<std::uint32_t>(value);
    unsigned char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 4);
}

} // namespace

VoxelGrid read_voxels(std::istream& in) {
    char magic[16];
    if (!in.read(magic, 16) || std::memcmp(magic, kVoxelMagic, 16) != 0)
        throw ParseError("not a voxel file (bad magic)", 0);
    std::array<std::uint32_t, 3> dims;
    for (auto& d : dims) d = read_le<std::uint32_t>(in);
    std::array<float, 3> spacing;
    for (auto& s : spacing) {
        s = read_le<float>(in);
        if (!(s > 0.f)) throw ParseError("voxel spacing must be positive", 0);
    }
    VoxelGrid grid(dims, spacing);
    for (auto& v : grid.values) v = read_le<float>(in);
    return grid;
}

VoxelGrid read_voxels(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_voxels(in);
}

void write_voxels(std::ostream& out, const VoxelGrid& grid) {
    out.write(kVoxelMagic, 16);
    for (auto d : grid.dims) write_le(out, d);
    for (auto s : grid.spacing) write_le(out, s);
    for (auto v : grid.values) write_le(out, v);
}

void write_voxels(const std::filesystem::path& path, const VoxelGrid& grid) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_voxels(out, grid);
}

SpatialGraph voxels_to_graph(const VoxelGrid& grid, float threshold) {
    const auto [nx, ny, nz] = grid.dims;
    constexpr auto none = std::numeric_limits<VertexId>::max();
    std::vector<VertexId> id(grid.values.size(), none);
    std::vector<Vec3> positions;
    for (std::uint32_t z = 0; z < nz; ++z)
        for (std::uint32_t y = 0; y < ny; ++y)
            for (std::uint32_t x = 0; x < nx; ++x)
                if (grid.at(x, y, z) > threshold) {
                    id[grid.index(x, y, z)] = static_cast<VertexId>(positions.size());
                    positions.emplace_back(x * double{grid.spacing[0]}, y * double{grid.spacing[1]},
                                           z * double{grid.spacing[2]});
                }

    std::vector<std::pair<VertexId, VertexId>> edges;
    for (std::uint32_t z = 0; z < nz; ++z)
        for (std::uint32_t y = 0; y < ny; ++y)
            for (std::uint32_t x = 0; x < nx; ++x) {
                const VertexId a = id[grid.index(x, y, z)];
                if (a == none) continue;
                for (int dz = -1; dz <= 1; ++dz)
                    for (int dy = -1; dy <= 1; ++dy)
                        for (int dx = -1; dx <= 1; ++dx) {
                            const long long xx = std::int64_t{x} + dx, yy = std::int64_t{y} + dy,
                                            zz = std::int64_t{z} + dz;
                            if (xx < 0 || yy < 0 || zz < 0 || xx >= nx || yy >= ny || zz >= nz)
                                continue;
                            const VertexId b = id[grid.index(xx, yy, zz)];
                            if (b != none && b > a) edges.emplace_back(a, b);
                        }
            }
    return SpatialGraph(std::move(positions), edges);
}

VoxelGrid voxelize_mesh(const PolygonMesh& mesh, int longest_side) {
    if (longest_side < 1) throw std::invalid_argument("longest_side must be >= 1");
    if (mesh.vertices.empty()) return {};
    Vec3 lo = mesh.vertices.front(), hi = lo;
    for (const auto& p : mesh.vertices) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double h = (hi - lo).maxCoeff() / longest_side;
    std::array<std::uint32_t, 3> dims;
    for (int a = 0; a < 3; ++a)
        dims[a] = static_cast<std::uint32_t>(std::ceil((hi[a] - lo[a]) / h)) + 2;
    const Vec3 origin = lo - Vec3::Constant(h);
    VoxelGrid grid(dims, {float(h), float(h), float(h)});

    // Fan-triangulate once.
    std::vector<std::array<VertexId, 3>> tris;
    for (const auto& f : mesh.faces)
        for (std::size_t i = 1; i + 1 < f.size(); ++i) tris.push_back({f[0], f[i], f[i + 1]});

    // Slight irrational offset keeps rays off vertices and edges.
    const double jx = 0.5 + 1.3e-4, jy = 0.5 + 2.7e-4;
    std::vector<double> hits;
    for (std::uint32_t y = 0; y < dims[1]; ++y)
        for (std::uint32_t x = 0; x < dims[0]; ++x) {
            const double px = origin.x() + (x + jx) * h, py = origin.y() + (y + jy) * h;
            hits.clear();
            for (const auto& t : tris) {
                const Vec3& a = mesh.vertices[t[0]];
                const Vec3& b = mesh.vertices[t[1]];
                const Vec3& c = mesh.vertices[t[2]];
                const double d = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
                if (d == 0.0) continue;
                const double u = ((px - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (py - a.y())) / d;
                const double v = ((b.x() - a.x()) * (py - a.y()) - (px - a.x()) * (b.y() - a.y())) / d;
                if (u < 0 || v < 0 || u + v > 1) continue;
                hits.push_back(a.z() + u * (b.z() - a.z()) + v * (c.z() - a.z()));
            }
            std::sort(hits.begin(), hits.end());
            for (std::size_t k = 0; k + 1 < hits.size(); k += 2)
                for (std::uint32_t z = 0; z < dims[2]; ++z) {
                    const double pz = origin.z() + (z + 0.5) * h;
                    if (pz > hits[k] && pz < hits[k + 1]) grid.at(x, y, z) = 1.f;
                }
        }
    return grid;
}

// ---------------------------------------------------------------------------
// Points
// ---------------------------------------------------------------------------

PointCloud read_points(std::istream& in) {
    PointCloud cloud;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        std::istringstream ls(line);
        double x, y, z;
        if (!(ls >> x >> y >> z)) throw ParseError("point needs three coordinates", lineno);
        std::string rest;
        if (ls >> rest) throw ParseError("trailing tokens after point", lineno);
        cloud.points.emplace_back(x, y, z);
    }
    return cloud;
}

PointCloud read_points(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_points(in);
}

namespace {

void check_knn_args(int k, double radius) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
}

void keep_nearest(std::vector<std::pair<double, VertexId>>& cand, int k,
                  std::vector<VertexId>& out) {
    std::sort(cand.begin(), cand.end());
    out.clear();
    for (std::size_t i = 0; i < cand.size() && i < static_cast<std::size_t>(k); ++i)
        out.push_back(cand[i].second);
}

struct CellKey {
    std::int64_t x, y, z;
    bool operator==(const CellKey&) const = default;
};

struct CellHash {
    std::size_t operator()(const CellKey& c) const {
        return std::hash<std::int64_t>{}((c.x * 73856093) ^ (c.y * 19349663) ^ (c.z * 83492791));
    }
};

} // namespace

std::vector<std::vector<VertexId>> knn_within_radius_serial(std::span<const Vec3> points, int k,
                                                            double radius) {
    check_knn_args(k, radius);
    std::vector<std::vector<VertexId>> out(points.size());
    std::vector<std::pair<double, VertexId>> cand;
    for (VertexId i = 0; i < points.size(); ++i) {
        cand.clear();
        for (VertexId j = 0; j < points.size(); ++j) {
            if (j == i) continue;
            const double d = (points[i] - points[j]).norm();
            if (d <= radius) cand.emplace_back(d, j);
        }
        keep_nearest(cand, k, out[i]);
    }
    return out;
}

std::vector<std::vector<VertexId>> knn_within_radius(std::span<const Vec3> points, int k,
                                                     double radius) {
    check_knn_args(k, radius);
    auto cell_of = [radius](const Vec3& p) {
        return CellKey{static_cast<std::int64_t>(std::floor(p.x() / radius)),
                       static_cast<std::int64_t>(std::floor(p.y() / radius)),
                       static_cast<std::int64_t>(std::floor(p.z() / radius))};
    };
    std::unordered_map<CellKey, std::vector<VertexId>, CellHash> cells;
    for (VertexId i = 0; i < points.size(); ++i) cells[cell_of(points[i])].push_back(i);

    const auto n = static_cast<std::int64_t>(points.size());
    std::vector<std::vector<VertexId>> out(n);
#pragma omp parallel
    {
        std::vector<std::pair<double, VertexId>> cand;
#pragma omp for schedule(dynamic, 256)
        for (std::int64_t s = 0; s < n; ++s) {
            const auto i = static_cast<VertexId>(s);
            const CellKey c = cell_of(points[i]);
            cand.clear();
            for (std::int64_t dz = -1; dz <= 1; ++dz)
                for (std::int64_t dy = -1; dy <= 1; ++dy)
                    for (std::int64_t dx = -1; dx <= 1; ++dx) {
                        auto it = cells.find({c.x + dx, c.y + dy, c.z + dz});
                        if (it == cells.end()) continue;
                        for (VertexId j : it->second) {
                            if (j == i) continue;
                            const double d = (points[i] - points[j]).norm();
                            if (d <= radius) cand.emplace_back(d, j);
                        }
                    }
            keep_nearest(cand, k, out[i]);
        }
    }
    return out;
}

PointGraph points_to_graph(const PointCloud& cloud, const PointGraphParams& params) {
    if (cloud.points.empty()) throw std::invalid_argument("point cloud is empty");
    if (params.l < 1) throw std::invalid_argument("l must be >= 1");
    if (!(params.l_radius > 0.0)) throw std::invalid_argument("l_radius must be positive");
    const auto knn = knn_within_radius(cloud.points, params.k, params.radius);
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (VertexId i = 0; i < knn.size(); ++i)
        for (VertexId j : knn[i]) edges.emplace_back(std::min(i, j), std::max(i, j));
    SpatialGraph g(cloud.points, edges);
    g = saturate(g, params.l, params.l_radius);
    auto contracted = simplify_contract(g, params.target_fraction);
    return {std::move(contracted.graph), std::move(contracted.mapping)};
}

} // namespace sepskel
