#include "sepskel/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>

#include "sepskel/union_find.hpp"

namespace sepskel {

SpatialGraph::SpatialGraph(std::vector<Vec3> positions,
                           std::span<const std::pair<VertexId, VertexId>> edges)
    : positions_(std::move(positions)), adjacency_(positions_.size()) {
    const auto n = positions_.size();
    for (auto [u, v] : edges) {
        if (u >= n || v >= n)
            throw std::invalid_argument("edge (" + std::to_string(u) + ", " +
                                        std::to_string(v) + ") out of range");
        if (u == v)
            throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
        adjacency_[u].push_back(v);
        adjacency_[v].push_back(u);
    }
    for (auto& adj : adjacency_) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
        edge_count_ += adj.size();
    }
    edge_count_ /= 2;
    update_diagonal();
}

void SpatialGraph::set_positions(std::vector<Vec3> positions) {
    if (positions.size() != positions_.size())
        throw std::invalid_argument("position count does not match vertex count");
    positions_ = std::move(positions);
    update_diagonal();
}

bool SpatialGraph::has_edge(VertexId u, VertexId v) const {
    const auto& adj = adjacency_[u];
    return std::binary_search(adj.begin(), adj.end(), v);
}

std::vector<std::pair<VertexId, VertexId>> SpatialGraph::edges() const {
    std::vector<std::pair<VertexId, VertexId>> out;
    out.reserve(edge_count_);
    for (VertexId u = 0; u < adjacency_.size(); ++u)
        for (VertexId v : adjacency_[u])
            if (u < v) out.emplace_back(u, v);
    return out;
}

void SpatialGraph::update_diagonal() {
    diagonal_ = 0.0;
    if (positions_.empty()) return;
    Vec3 lo = positions_.front(), hi = positions_.front();
    for (const auto& p : positions_) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    diagonal_ = (hi - lo).norm();
}

std::vector<VertexSet> connected_components(const SpatialGraph& graph,
                                            std::span<const VertexId> subset) {
    std::unordered_map<VertexId, std::size_t> local;
    local.reserve(subset.size() * 2);
    for (VertexId v : subset) local.emplace(v, local.size());

    std::vector<char> seen(local.size(), 0);
    std::vector<VertexSet> parts;
    std::vector<VertexId> stack;
    for (VertexId s : subset) {
        const auto si = local.at(s);
        if (seen[si]) continue;
        seen[si] = 1;
        VertexSet part;
        stack.assign(1, s);
        while (!stack.empty()) {
            const VertexId v = stack.back();
            stack.pop_back();
            part.push_back(v);
            for (VertexId w : graph.neighbors(v)) {
                auto it = local.find(w);
                if (it != local.end() && !seen[it->second]) {
                    seen[it->second] = 1;
                    stack.push_back(w);
                }
            }
        }
        std::sort(part.begin(), part.end());
        parts.push_back(std::move(part));
    }
    std::sort(parts.begin(), parts.end(),
              [](const VertexSet& a, const VertexSet& b) { return a.front() < b.front(); });
    return parts;
}

std::vector<VertexSet> connected_components(const SpatialGraph& graph) {
    const auto n = graph.vertex_count();
    std::vector<char> seen(n, 0);
    std::vector<VertexSet> parts;
    std::vector<VertexId> stack;
    for (VertexId s = 0; s < n; ++s) {
        if (seen[s]) continue;
        seen[s] = 1;
        VertexSet part;
        stack.assign(1, s);
        while (!stack.empty()) {
            const VertexId v = stack.back();
            stack.pop_back();
            part.push_back(v);
            for (VertexId w : graph.neighbors(v))
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
        }
        std::sort(part.begin(), part.end());
        parts.push_back(std::move(part));
    }
    return parts;
}

SpatialGraph saturate(const SpatialGraph& graph, int k, std::optional<double> radius) {
    if (k < 1) throw std::invalid_argument("saturation hop count must be >= 1");
    const auto n = static_cast<std::int64_t>(graph.vertex_count());
    std::vector<Vec3> positions(graph.positions().begin(), graph.positions().end());
    if (k == 1 && !radius) {
        auto edges = graph.edges();
        return SpatialGraph(std::move(positions), edges);
    }

    std::vector<std::vector<VertexId>> reach(n);
#pragma omp parallel
    {
        std::vector<int> depth(n, -1);
        std::vector<VertexId> frontier, next, touched;
#pragma omp for schedule(dynamic, 64)
        for (std::int64_t s = 0; s < n; ++s) {
            const auto src = static_cast<VertexId>(s);
            depth[src] = 0;
            touched.assign(1, src);
            frontier.assign(1, src);
            for (int d = 1; d <= k && !frontier.empty(); ++d) {
                next.clear();
                for (VertexId v : frontier)
                    for (VertexId w : graph.neighbors(v))
                        if (depth[w] < 0) {
                            depth[w] = d;
                            touched.push_back(w);
                            next.push_back(w);
                        }
                frontier.swap(next);
            }
            auto& out = reach[src];
            for (VertexId w : touched) {
                if (w > src && (!radius || graph.edge_length(src, w) <= *radius))
                    out.push_back(w);
                depth[w] = -1;
            }
        }
    }

    std::vector<std::pair<VertexId, VertexId>> edges;
    for (VertexId u = 0; u < n; ++u)
        for (VertexId v : reach[u]) edges.emplace_back(u, v);
    return SpatialGraph(std::move(positions), edges);
}

Contraction simplify_contract(const SpatialGraph& graph, double target_fraction) {
    if (!(target_fraction > 0.0) || target_fraction > 1.0)
        throw std::invalid_argument("target_fraction must lie in (0, 1]");

    const auto n = graph.vertex_count();
    const auto target = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(target_fraction * static_cast<double>(n))));

    // Cluster state, indexed by representative (smallest absorbed input id).
    std::vector<Vec3> sum(graph.positions().begin(), graph.positions().end());
    std::vector<double> weight(n, 1.0);
    std::vector<std::vector<VertexId>> adj(n);
    for (VertexId v = 0; v < n; ++v) {
        auto nb = graph.neighbors(v);
        adj[v].assign(nb.begin(), nb.end());
    }
    std::vector<std::uint32_t> version(n, 0);
    UnionFind clusters(n);

    auto centroid = [&](VertexId r) -> Vec3 { return sum[r] / weight[r]; };

    using Entry = std::tuple<double, VertexId, VertexId, std::uint32_t, std::uint32_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    auto push = [&](VertexId a, VertexId b) {
        if (a > b) std::swap(a, b);
        queue.emplace((centroid(a) - centroid(b)).norm(), a, b, version[a], version[b]);
    };
    for (auto [u, v] : graph.edges()) push(u, v);

    std::size_t alive = n;
    while (alive > target && !queue.empty()) {
        auto [len, a, b, va, vb] = queue.top();
        queue.pop();
        if (version[a] != va || version[b] != vb) continue;
        if (clusters.find(a) != a || clusters.find(b) != b) continue;

        // a < b, so a stays the representative.
        clusters.unite_into(a, b);
        sum[a] += sum[b];
        weight[a] += weight[b];
        std::vector<VertexId> merged;
        merged.reserve(adj[a].size() + adj[b].size());
        std::set_union(adj[a].begin(), adj[a].end(), adj[b].begin(), adj[b].end(),
                       std::back_inserter(merged));
        std::erase_if(merged, [&](VertexId w) { return w == a || w == b; });
        adj[a] = std::move(merged);
        adj[b].clear();
        ++version[a];
        ++version[b];
        for (VertexId w : adj[a]) {
            auto& wa = adj[w];
            std::erase(wa, b);
            auto it = std::lower_bound(wa.begin(), wa.end(), a);
            if (it == wa.end() || *it != a) wa.insert(it, a);
            push(a, w);
        }
        --alive;
    }

    std::vector<VertexId> relabel(n, std::numeric_limits<VertexId>::max());
    std::vector<Vec3> positions;
    for (VertexId v = 0; v < n; ++v)
        if (clusters.find(v) == v) {
            relabel[v] = static_cast<VertexId>(positions.size());
            positions.push_back(centroid(v));
        }
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (VertexId v = 0; v < n; ++v)
        if (relabel[v] != std::numeric_limits<VertexId>::max())
            for (VertexId w : adj[v])
                if (v < w) edges.emplace_back(relabel[v], relabel[w]);

    Contraction out;
    out.mapping.resize(n);
    for (VertexId v = 0; v < n; ++v) out.mapping[v] = relabel[clusters.find(v)];
    out.graph = SpatialGraph(std::move(positions), edges);
    return out;
}

std::vector<Vec3> smooth_positions(const SpatialGraph& graph,
                                   std::span<const VertexId> movable, int iterations) {
    std::vector<Vec3> current(graph.positions().begin(), graph.positions().end());
    if (movable.empty() || iterations <= 0) return current;
    const double eps = graph.epsilon();
    std::vector<Vec3> next(movable.size());
    for (int it = 0; it < iterations; ++it) {
        for (std::size_t i = 0; i < movable.size(); ++i) {
            const VertexId v = movable[i];
            const auto nb = graph.neighbors(v);
            if (nb.empty()) {
                next[i] = current[v];
                continue;
            }
            Vec3 acc = Vec3::Zero();
            double wsum = 0.0;
            for (VertexId u : nb) {
                const double w = 1.0 / ((current[u] - current[v]).norm() + eps);
                acc += w * current[u];
                wsum += w;
            }
            next[i] = acc / wsum;
        }
        for (std::size_t i = 0; i < movable.size(); ++i) current[movable[i]] = next[i];
    }
    return current;
}

long betti_number(const SpatialGraph& graph) {
    return static_cast<long>(graph.edge_count()) - static_cast<long>(graph.vertex_count()) +
           static_cast<long>(connected_components(graph).size());
}

} // namespace sepskel
