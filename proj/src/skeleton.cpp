#include "sepskel/skeleton.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "sepskel/union_find.hpp"

namespace sepskel {

namespace {
constexpr VertexId kUnassigned = std::numeric_limits<VertexId>::max();
}

Assignment maximize_separators(const SpatialGraph& graph, const PackedSeparators& packed) {
    const auto n = graph.vertex_count();
    Assignment out;
    out.label.assign(n, kUnassigned);
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());

    using Entry = std::tuple<double, VertexId, VertexId>;  // dist, label, vertex
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (VertexId s = 0; s < packed.chosen.size(); ++s)
        for (VertexId v : packed.chosen[s].vertices) {
            if (v >= n) throw std::invalid_argument("separator vertex outside the graph");
            if (out.label[v] != kUnassigned)
                throw std::invalid_argument("packed separators overlap");
            out.label[v] = s;
            dist[v] = 0.0;
            heap.emplace(0.0, s, v);
        }

    while (!heap.empty()) {
        auto [d, l, v] = heap.top();
        heap.pop();
        if (d != dist[v] || l != out.label[v]) continue;
        for (VertexId w : graph.neighbors(v)) {
            const double nd = d + graph.edge_length(v, w);
            if (nd < dist[w] || (nd == dist[w] && l < out.label[w])) {
                dist[w] = nd;
                out.label[w] = l;
                heap.emplace(nd, l, w);
            }
        }
    }

    out.separator_classes = packed.chosen.size();
    out.class_count = out.separator_classes;
    // Components no separator reaches become classes of their own.
    for (VertexId s = 0; s < n; ++s) {
        if (out.label[s] != kUnassigned) continue;
        const auto id = static_cast<VertexId>(out.class_count++);
        std::vector<VertexId> stack{s};
        out.label[s] = id;
        while (!stack.empty()) {
            const VertexId v = stack.back();
            stack.pop_back();
            for (VertexId w : graph.neighbors(v))
                if (out.label[w] == kUnassigned) {
                    out.label[w] = id;
                    stack.push_back(w);
                }
        }
    }
    return out;
}

WeightedGraph quotient_graph(const SpatialGraph& graph, const Assignment& assignment,
                             PositionMode mode, const PackedSeparators* packed) {
    const auto k = assignment.class_count;
    std::vector<Vec3> sum(k, Vec3::Zero());
    std::vector<double> count(k, 0.0);
    for (VertexId v = 0; v < graph.vertex_count(); ++v) {
        const auto c = assignment.label[v];
        if (c >= k) throw std::invalid_argument("assignment is not total");
        sum[c] += graph.position(v);
        count[c] += 1.0;
    }
    std::vector<Vec3> positions(k);
    for (std::size_t c = 0; c < k; ++c) positions[c] = count[c] > 0 ? Vec3(sum[c] / count[c]) : Vec3::Zero();

    if (mode == PositionMode::SeparatorAverage) {
        if (!packed) throw std::invalid_argument("separator-average positions need the packing");
        for (std::size_t c = 0; c < assignment.separator_classes; ++c) {
            const auto& verts = packed->chosen[c].vertices;
            Vec3 s = Vec3::Zero();
            for (VertexId v : verts) s += graph.position(v);
            if (!verts.empty()) positions[c] = s / static_cast<double>(verts.size());
        }
    }

    std::vector<std::pair<VertexId, VertexId>> edges;
    for (auto [u, v] : graph.edges()) {
        VertexId a = assignment.label[u], b = assignment.label[v];
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        edges.emplace_back(a, b);
    }
    return {SpatialGraph(std::move(positions), edges), std::move(count)};
}

CollapsedGraph collapse_clique_complexes(const SpatialGraph& graph, std::span<const double> weight) {
    const auto n = graph.vertex_count();
    auto edge_key = [](VertexId a, VertexId b) {
        if (a > b) std::swap(a, b);
        return (std::uint64_t{a} << 32) | b;
    };

    std::vector<std::array<VertexId, 3>> tris;
    for (VertexId u = 0; u < n; ++u)
        for (VertexId v : graph.neighbors(u)) {
            if (v <= u) continue;
            auto a = graph.neighbors(u), b = graph.neighbors(v);
            auto ia = std::upper_bound(a.begin(), a.end(), v);
            auto ib = std::upper_bound(b.begin(), b.end(), v);
            while (ia != a.end() && ib != b.end()) {
                if (*ia < *ib) ++ia;
                else if (*ib < *ia) ++ib;
                else {
                    tris.push_back({u, v, *ia});
                    ++ia;
                    ++ib;
                }
            }
        }

    CollapsedGraph out;
    if (tris.empty()) {
        auto e = graph.edges();
        out.graph = SpatialGraph(std::vector<Vec3>(graph.positions().begin(), graph.positions().end()), e);
        out.weight.assign(weight.begin(), weight.end());
        return out;
    }

    UnionFind complexes(tris.size());
    std::unordered_map<std::uint64_t, std::uint32_t> first_tri;
    for (std::uint32_t t = 0; t < tris.size(); ++t) {
        const auto& [a, b, c] = tris[t];
        for (auto key : {edge_key(a, b), edge_key(b, c), edge_key(a, c)}) {
            auto [it, fresh] = first_tri.emplace(key, t);
            if (!fresh) complexes.unite(it->second, t);
        }
    }

    // Complex roots are the smallest triangle index, which fixes centre order.
    std::unordered_map<std::uint32_t, std::size_t> complex_id;
    std::vector<std::vector<VertexId>> members;
    for (std::uint32_t t = 0; t < tris.size(); ++t) {
        const auto root = complexes.find(t);
        auto [it, fresh] = complex_id.emplace(root, members.size());
        if (fresh) members.emplace_back();
        for (VertexId v : tris[t]) members[it->second].push_back(v);
    }
    for (auto& m : members) {
        std::sort(m.begin(), m.end());
        m.erase(std::unique(m.begin(), m.end()), m.end());
    }

    std::vector<Vec3> positions(graph.positions().begin(), graph.positions().end());
    out.weight.assign(weight.begin(), weight.end());
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (auto [u, v] : graph.edges())
        if (!first_tri.contains(edge_key(u, v))) edges.emplace_back(u, v);
    for (const auto& m : members) {
        const auto center = static_cast<VertexId>(positions.size());
        Vec3 p = Vec3::Zero();
        double w = 0.0;
        for (VertexId v : m) {
            p += graph.position(v);
            w += weight[v];
            edges.emplace_back(v, center);
        }
        positions.push_back(p / static_cast<double>(m.size()));
        out.weight.push_back(w / static_cast<double>(m.size()));
    }
    out.star_centers = members.size();
    out.graph = SpatialGraph(std::move(positions), edges);
    return out;
}

Skeleton smooth_skeleton(Skeleton skel, int iterations) {
    const auto& g = skel.graph;
    const auto n = g.vertex_count();
    std::vector<Vec3> cur(g.positions().begin(), g.positions().end()), next(n);
    for (int it = 0; it < iterations; ++it) {
        for (VertexId v = 0; v < n; ++v) {
            const auto nb = g.neighbors(v);
            if (nb.empty()) {
                next[v] = cur[v];
                continue;
            }
            Vec3 num = Vec3::Zero();
            double den = 0.0;
            for (VertexId u : nb) {
                const double w = std::sqrt(skel.weight[u]) / static_cast<double>(g.degree(u));
                num += w * cur[u];
                den += w;
            }
            const double inv = 1.0 / static_cast<double>(nb.size());
            next[v] = inv * cur[v] + (1.0 - inv) * (num / den);
        }
        cur.swap(next);
    }
    if (iterations > 0) skel.graph.set_positions(std::move(cur));
    return skel;
}

void annotate_radii(Skeleton& skel, const SpatialGraph& graph) {
    const auto n = skel.graph.vertex_count();
    std::vector<double> sum(n, 0.0), count(n, 0.0);
    for (VertexId v = 0; v < skel.assignment.size(); ++v) {
        const VertexId node = skel.assignment[v];
        sum[node] += (skel.graph.position(node) - graph.position(v)).norm();
        count[node] += 1.0;
    }
    skel.radius.assign(n, 0.0);
    for (VertexId v = 0; v < skel.class_nodes; ++v)
        if (count[v] > 0) skel.radius[v] = sum[v] / count[v];
    for (VertexId c = static_cast<VertexId>(skel.class_nodes); c < n; ++c) {
        const auto leaves = skel.graph.neighbors(c);
        double r = 0.0;
        std::size_t k = 0;
        for (VertexId l : leaves)
            if (!skel.is_star_center(l)) {
                r += skel.radius[l];
                ++k;
            }
        skel.radius[c] = k ? r / static_cast<double>(k) : 0.0;
    }
}

Skeleton extract_skeleton(const SpatialGraph& graph, const PackedSeparators& packed,
                          const ExtractOptions& options) {
    const auto assignment = maximize_separators(graph, packed);
    auto quotient = quotient_graph(graph, assignment, options.position_mode, &packed);
    auto collapsed = collapse_clique_complexes(quotient.graph, quotient.weight);

    Skeleton skel;
    skel.graph = std::move(collapsed.graph);
    skel.weight = std::move(collapsed.weight);
    skel.assignment = assignment.label;
    skel.class_nodes = assignment.class_count;
    skel = smooth_skeleton(std::move(skel), options.smooth_iterations);
    annotate_radii(skel, graph);
    return skel;
}

} // namespace sepskel
