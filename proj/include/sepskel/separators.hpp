#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "sepskel/graph.hpp"

namespace sepskel {

inline constexpr double kDefaultTau = 0.0875;

/// A connected vertex set whose removal splits its surrounding fronts.
struct Separator {
    VertexSet vertices;              // sorted
    double quality = 0.0;            // smallest / largest front at growth exit
    Vec3 center = Vec3::Zero();      // growth sphere
    double radius = 0.0;
    std::vector<VertexSet> fronts;   // non-Σ vertices adjacent to Σ, per side

    bool empty() const { return vertices.empty(); }
};

struct SeparatorSet {
    std::vector<Separator> separators;
    std::size_t source_graph_size = 0;
};

/// min |C_i| / max |C_i|. Throws std::invalid_argument on an empty list.
double front_size_ratio(std::span<const VertexSet> components);

/// Summed length of edges with both endpoints in `sigma`.
double separator_energy(const SpatialGraph& graph, std::span<const VertexId> sigma);

/// True iff every vertex of `sigma` has neighbours in at least two fronts.
bool is_minimal_separator(const SpatialGraph& graph, std::span<const VertexId> sigma,
                          std::span<const VertexSet> fronts);

struct ShrinkResult {
    VertexSet separator;
    std::vector<VertexSet> fronts;  // same count as the input fronts
};

/// Smooths Σ, then peels vertices that touch a single front, farthest from
/// `center` first, until the separator is minimal.
ShrinkResult shrink_separator(const SpatialGraph& graph, std::span<const VertexId> sigma,
                              std::span<const VertexSet> fronts, const Vec3& center);

struct OptimizedSeparator {
    VertexSet separator;
    std::vector<VertexSet> fronts;
    double energy_before = 0.0;
    double energy_after = 0.0;
};

/// Vertex swaps that lower separator_energy while keeping Σ a connected,
/// minimal separator, followed by a few seeded perturb-and-retry rounds.
/// `fronts` must cover every vertex of `original` that is not in Σ.
OptimizedSeparator optimize_separator(const SpatialGraph& graph, std::span<const VertexId> sigma,
                                      std::span<const VertexSet> fronts,
                                      std::span<const VertexId> original,
                                      std::uint64_t seed = 0);

struct SeparatorOptions {
    double tau = kDefaultTau;
    bool optimize = false;
    std::uint64_t seed = 0;
};

/// Region growing from `v0` guided by a bounding sphere until the front
/// splits into significant components, then shrinking. Returns an empty
/// separator (quality 0) if the front floods its component or the shrunk
/// set falls apart. Leaves yield themselves with quality 1.
Separator local_separator(const SpatialGraph& graph, VertexId v0,
                          const SeparatorOptions& options = {});

struct SamplingOptions {
    double tau = kDefaultTau;
    bool optimize = false;
    std::uint64_t seed = 0;
    int threads = 1;
};

/// Visits every vertex in a seeded random order and grows a separator from
/// it with probability 2^-count, count being how many found separators
/// already contain it. Results are ordered by visit position.
SeparatorSet sample_separators(const SpatialGraph& graph, const SamplingOptions& options);

/// Single-threaded reference of sample_separators.
SeparatorSet sample_separators_serial(const SpatialGraph& graph, double tau, bool optimize,
                                      std::uint64_t seed);

// ".seps" text dump: `s q= <q> c= <x y z> r= <r> : <ids...>`
void write_seps(std::ostream& out, const SeparatorSet& set);
void write_seps(const std::filesystem::path& path, const SeparatorSet& set);
SeparatorSet read_seps(std::istream& in);
SeparatorSet read_seps(const std::filesystem::path& path);

} // namespace sepskel
