#include "oracles.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace sepskel::testing {

namespace {

/// Number of components of `keep` using only edges inside `keep`.
std::size_t count_pieces(const SpatialGraph& g, const std::set<VertexId>& keep) {
    std::set<VertexId> seen;
    std::size_t pieces = 0;
    for (VertexId s : keep) {
        if (seen.contains(s)) continue;
        ++pieces;
        std::deque<VertexId> q{s};
        seen.insert(s);
        while (!q.empty()) {
            VertexId v = q.front();
            q.pop_front();
            for (VertexId w : g.neighbors(v))
                if (keep.contains(w) && seen.insert(w).second) q.push_back(w);
        }
    }
    return pieces;
}

bool connected(const SpatialGraph& g, std::span<const VertexId> set) {
    std::set<VertexId> keep(set.begin(), set.end());
    return count_pieces(g, keep) == 1;
}

} // namespace

std::string check_separator(const SpatialGraph& graph, const Separator& sep) {
    if (sep.vertices.empty()) return "empty separator";
    if (!std::is_sorted(sep.vertices.begin(), sep.vertices.end())) return "vertices not sorted";
    if (!connected(graph, sep.vertices)) return "separator is not connected";
    if (!(sep.quality > 0.0 && sep.quality <= 1.0)) return "quality outside (0, 1]";

    std::set<VertexId> sigma(sep.vertices.begin(), sep.vertices.end());
    std::set<VertexId> all_fronts;
    for (const auto& f : sep.fronts)
        for (VertexId v : f) {
            if (sigma.contains(v)) return "front overlaps separator";
            if (!all_fronts.insert(v).second) return "fronts overlap";
            const auto nb = graph.neighbors(v);
            if (std::none_of(nb.begin(), nb.end(), [&](VertexId w) { return sigma.contains(w); }))
                return "front vertex not adjacent to separator";
        }

    const bool leaf = sep.vertices.size() == 1 && sep.fronts.size() == 1;
    if (leaf) return {};
    if (sep.fronts.size() < 2) return "fewer than two fronts";
    if (count_pieces(graph, all_fronts) < 2) return "fronts stay connected without the separator";
    return {};
}

bool minimal_by_definition(const SpatialGraph& graph, std::span<const VertexId> sigma,
                           std::span<const VertexSet> fronts) {
    std::map<VertexId, std::size_t> which;
    for (std::size_t i = 0; i < fronts.size(); ++i)
        for (VertexId v : fronts[i]) which[v] = i;
    for (VertexId v : sigma) {
        std::set<std::size_t> touched;
        for (VertexId w : graph.neighbors(v))
            if (auto it = which.find(w); it != which.end()) touched.insert(it->second);
        if (touched.size() < 2) return false;
    }
    return true;
}

std::vector<std::size_t> pack_all_pairs(const SeparatorSet& set) {
    const auto& s = set.separators;
    const std::size_t l = s.size();
    std::vector<double> key(l);
    for (std::size_t i = 0; i < l; ++i) {
        std::size_t red = 0;
        for (std::size_t j = 0; j < l; ++j) {
            if (i == j) continue;
            for (VertexId a : s[i].vertices)
                for (VertexId b : s[j].vertices) red += (a == b);
        }
        if (red == 0) key[i] = 0.0;
        else if (s[i].quality <= 0.0) key[i] = std::numeric_limits<double>::infinity();
        else key[i] = static_cast<double>(red) / s[i].quality;
    }
    std::vector<std::size_t> order(l);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (key[a] != key[b]) return key[a] < key[b];
        if (s[a].vertices.size() != s[b].vertices.size())
            return s[a].vertices.size() < s[b].vertices.size();
        return a < b;
    });
    std::set<VertexId> used;
    std::vector<std::size_t> chosen;
    for (std::size_t i : order) {
        const bool clash = std::any_of(s[i].vertices.begin(), s[i].vertices.end(),
                                       [&](VertexId v) { return used.contains(v); });
        if (clash) continue;
        used.insert(s[i].vertices.begin(), s[i].vertices.end());
        chosen.push_back(i);
    }
    return chosen;
}

std::string check_sweep_separator(const SpatialGraph& graph, const Separator& sep) {
    if (sep.vertices.empty()) return "empty separator";
    if (!connected(graph, sep.vertices)) return "separator is not connected";
    if (sep.fronts.size() != 2) return "expected a frozen side and an unvisited side";
    std::set<VertexId> sigma(sep.vertices.begin(), sep.vertices.end());
    std::set<VertexId> below(sep.fronts[0].begin(), sep.fronts[0].end());
    std::set<VertexId> above(sep.fronts[1].begin(), sep.fronts[1].end());
    if (below.empty() || above.empty()) return "a side is empty";

    std::set<VertexId> ring;  // N(Σ) \ Σ
    for (VertexId v : sigma)
        for (VertexId w : graph.neighbors(v))
            if (!sigma.contains(w)) ring.insert(w);
    for (VertexId v : below)
        if (!ring.contains(v) || above.contains(v)) return "bad frozen side";
    for (VertexId v : above)
        if (!ring.contains(v)) return "bad unvisited side";

    // No path from one side to the other inside N(Σ) \ Σ.
    std::set<VertexId> seen(below.begin(), below.end());
    std::deque<VertexId> q(below.begin(), below.end());
    while (!q.empty()) {
        VertexId v = q.front();
        q.pop_front();
        if (above.contains(v)) return "sides connected around the separator";
        for (VertexId w : graph.neighbors(v))
            if (ring.contains(w) && seen.insert(w).second) q.push_back(w);
    }
    const double lo = static_cast<double>(std::min(below.size(), above.size()));
    const double hi = static_cast<double>(std::max(below.size(), above.size()));
    if (std::abs(sep.quality - lo / hi) > 1e-12) return "quality does not match the sides";
    return {};
}

bool queue_separates(const SpatialGraph& graph, std::span<const SweepState> state) {
    for (VertexId v = 0; v < graph.vertex_count(); ++v) {
        if (state[v] != SweepState::Frozen) continue;
        for (VertexId w : graph.neighbors(v))
            if (state[w] == SweepState::Unvisited) return false;
    }
    return true;
}

namespace {

std::vector<VertexId> tree_centers(const SpatialGraph& t) {
    const auto n = t.vertex_count();
    std::vector<std::size_t> deg(n);
    std::vector<VertexId> layer;
    for (VertexId v = 0; v < n; ++v) {
        deg[v] = t.degree(v);
        if (deg[v] <= 1) layer.push_back(v);
    }
    std::size_t remaining = n;
    while (remaining > 2) {
        remaining -= layer.size();
        std::vector<VertexId> next;
        for (VertexId v : layer)
            for (VertexId w : t.neighbors(v))
                if (--deg[w] == 1) next.push_back(w);
        layer.swap(next);
    }
    return layer;
}

std::string ahu(const SpatialGraph& t, VertexId v, VertexId parent) {
    std::vector<std::string> kids;
    for (VertexId w : t.neighbors(v))
        if (w != parent) kids.push_back(ahu(t, w, v));
    std::sort(kids.begin(), kids.end());
    std::string s = "(";
    for (auto& k : kids) s += k;
    return s + ")";
}

std::string tree_code(const SpatialGraph& t) {
    std::string best;
    for (VertexId c : tree_centers(t)) {
        auto code = ahu(t, c, std::numeric_limits<VertexId>::max());
        if (best.empty() || code < best) best = code;
    }
    return best;
}

bool is_tree(const SpatialGraph& g) {
    return g.edge_count() + 1 == g.vertex_count() && connected_components(g).size() == 1;
}

std::vector<std::size_t> refine_colors(const SpatialGraph& g) {
    const auto n = g.vertex_count();
    std::vector<std::size_t> color(n);
    for (VertexId v = 0; v < n; ++v) color[v] = g.degree(v);
    for (std::size_t round = 0; round < n; ++round) {
        std::map<std::pair<std::size_t, std::vector<std::size_t>>, std::size_t> ids;
        std::vector<std::pair<std::size_t, std::vector<std::size_t>>> sig(n);
        for (VertexId v = 0; v < n; ++v) {
            std::vector<std::size_t> nb;
            for (VertexId w : g.neighbors(v)) nb.push_back(color[w]);
            std::sort(nb.begin(), nb.end());
            sig[v] = {color[v], std::move(nb)};
            ids.emplace(sig[v], 0);
        }
        std::size_t next_id = 0;
        for (auto& [k, id] : ids) id = next_id++;
        std::vector<std::size_t> next(n);
        for (VertexId v = 0; v < n; ++v) next[v] = ids[sig[v]];
        const bool stable = std::set<std::size_t>(color.begin(), color.end()).size() == next_id;
        color.swap(next);
        if (stable) break;
    }
    return color;
}

} // namespace

bool trees_isomorphic(const SpatialGraph& a, const SpatialGraph& b) {
    if (a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count()) return false;
    if (a.vertex_count() == 0) return true;
    if (!is_tree(a) || !is_tree(b)) return false;
    return tree_code(a) == tree_code(b);
}

bool graphs_isomorphic(const SpatialGraph& a, const SpatialGraph& b) {
    const auto n = a.vertex_count();
    if (n != b.vertex_count() || a.edge_count() != b.edge_count()) return false;
    std::vector<std::size_t> da, db;
    for (VertexId v = 0; v < n; ++v) {
        da.push_back(a.degree(v));
        db.push_back(b.degree(v));
    }
    std::sort(da.begin(), da.end());
    std::sort(db.begin(), db.end());
    if (da != db) return false;
    if (n == 0) return true;

    // Colour both graphs jointly so colour ids are comparable.
    std::vector<Vec3> pos(2 * n, Vec3::Zero());
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (auto [u, v] : a.edges()) edges.emplace_back(u, v);
    for (auto [u, v] : b.edges()) edges.emplace_back(u + n, v + n);
    const auto joint = refine_colors(SpatialGraph(pos, edges));
    std::vector<std::size_t> ca(joint.begin(), joint.begin() + n), cb(joint.begin() + n, joint.end());
    {
        auto sa = ca, sb = cb;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        if (sa != sb) return false;
    }

    // Order a's vertices by BFS so every step is anchored to mapped neighbours.
    std::vector<VertexId> order;
    std::vector<char> seen(n, 0);
    for (VertexId s = 0; s < n; ++s) {
        if (seen[s]) continue;
        std::deque<VertexId> q{s};
        seen[s] = 1;
        while (!q.empty()) {
            VertexId v = q.front();
            q.pop_front();
            order.push_back(v);
            for (VertexId w : a.neighbors(v))
                if (!seen[w]) {
                    seen[w] = 1;
                    q.push_back(w);
                }
        }
    }

    constexpr VertexId none = std::numeric_limits<VertexId>::max();
    std::vector<VertexId> map_ab(n, none), map_ba(n, none);
    std::size_t budget = 5'000'000;
    std::function<bool(std::size_t)> extend = [&](std::size_t k) -> bool {
        if (k == n) return true;
        if (budget-- == 0) return false;
        const VertexId v = order[k];
        VertexId anchor = none;
        for (VertexId w : a.neighbors(v))
            if (map_ab[w] != none) {
                anchor = map_ab[w];
                break;
            }
        std::vector<VertexId> candidates;
        if (anchor != none) candidates.assign(b.neighbors(anchor).begin(), b.neighbors(anchor).end());
        else
            for (VertexId x = 0; x < n; ++x) candidates.push_back(x);
        for (VertexId x : candidates) {
            if (map_ba[x] != none || cb[x] != ca[v]) continue;
            bool ok = true;
            for (VertexId w : a.neighbors(v))
                if (map_ab[w] != none && !b.has_edge(map_ab[w], x)) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            std::size_t mapped_a = 0, mapped_b = 0;
            for (VertexId w : a.neighbors(v)) mapped_a += map_ab[w] != none;
            for (VertexId y : b.neighbors(x)) mapped_b += map_ba[y] != none;
            if (mapped_a != mapped_b) continue;
            map_ab[v] = x;
            map_ba[x] = v;
            if (extend(k + 1)) return true;
            map_ab[v] = none;
            map_ba[x] = none;
        }
        return false;
    };
    return extend(0);
}

double average_edge_length(const SpatialGraph& graph) {
    double s = 0.0;
    std::size_t k = 0;
    for (auto [u, v] : graph.edges()) {
        s += graph.edge_length(u, v);
        ++k;
    }
    return k ? s / static_cast<double>(k) : 0.0;
}

} // namespace sepskel::testing
