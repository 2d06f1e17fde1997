#include "sepskel/separators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include <omp.h>

#include "sepskel/rng.hpp"

namespace sepskel {

double front_size_ratio(std::span<const VertexSet> components) {
    if (components.empty()) throw std::invalid_argument("front_size_ratio of no components");
    std::size_t lo = std::numeric_limits<std::size_t>::max(), hi = 0;
    for (const auto& c : components) {
        lo = std::min(lo, c.size());
        hi = std::max(hi, c.size());
    }
    if (hi == 0) throw std::invalid_argument("front_size_ratio of empty components");
    return static_cast<double>(lo) / static_cast<double>(hi);
}

double separator_energy(const SpatialGraph& graph, std::span<const VertexId> sigma) {
    std::unordered_set<VertexId> in(sigma.begin(), sigma.end());
    double e = 0.0;
    for (VertexId u : sigma)
        for (VertexId v : graph.neighbors(u))
            if (u < v && in.contains(v)) e += graph.edge_length(u, v);
    return e;
}

namespace {

using FrontMap = std::unordered_map<VertexId, int>;

FrontMap front_map(std::span<const VertexSet> fronts) {
    FrontMap m;
    for (int i = 0; i < static_cast<int>(fronts.size()); ++i)
        for (VertexId v : fronts[i]) m.emplace(v, i);
    return m;
}

/// Distinct front ids among the neighbours of v, at most `limit` collected.
template <typename Lookup>
int count_fronts(const SpatialGraph& graph, VertexId v, Lookup&& front_of, int* first,
                 int limit = 2) {
    int n = 0, seen[2] = {-1, -1};
    for (VertexId w : graph.neighbors(v)) {
        const int f = front_of(w);
        if (f < 0 || f == seen[0] || f == seen[1]) continue;
        if (n < 2) seen[n] = f;
        if (++n >= limit) break;
    }
    if (first) *first = seen[0];
    return n;
}

/// Per-thread vertex -> int table over the whole graph, cleared sparsely.
class DenseIndex {
public:
    static DenseIndex& scratch(std::size_t n) {
        thread_local DenseIndex d;
        d.clear();
        if (d.value_.size() < n) d.value_.assign(n, -1);
        return d;
    }
    int operator[](VertexId v) const { return value_[v]; }
    void set(VertexId v, int x) {
        if (value_[v] < 0) touched_.push_back(v);
        value_[v] = x;
    }
    void clear() {
        for (VertexId v : touched_) value_[v] = -1;
        touched_.clear();
    }

private:
    std::vector<int> value_;
    std::vector<VertexId> touched_;
};

} // namespace

bool is_minimal_separator(const SpatialGraph& graph, std::span<const VertexId> sigma,
                          std::span<const VertexSet> fronts) {
    const FrontMap fm = front_map(fronts);
    auto lookup = [&](VertexId w) {
        auto it = fm.find(w);
        return it == fm.end() ? -1 : it->second;
    };
    for (VertexId v : sigma)
        if (count_fronts(graph, v, lookup, nullptr) < 2) return false;
    return true;
}

ShrinkResult shrink_separator(const SpatialGraph& graph, std::span<const VertexId> sigma,
                              std::span<const VertexSet> fronts, const Vec3& center) {
    ShrinkResult out;
    out.fronts.assign(fronts.begin(), fronts.end());
    const std::size_t s = sigma.size();
    if (s == 0) return out;

    // One table: Σ vertices map to -2 - (index in sigma), front vertices to their front id.
    DenseIndex& tab = DenseIndex::scratch(graph.vertex_count());
    for (int i = 0; i < static_cast<int>(fronts.size()); ++i)
        for (VertexId v : fronts[i]) tab.set(v, i);
    for (std::size_t i = 0; i < s; ++i) tab.set(sigma[i], -2 - static_cast<int>(i));

    // Inverse-edge-length Laplacian smoothing of Σ with everything else fixed.
    const int iterations = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(s))));
    const double eps = graph.epsilon();
    std::vector<Vec3> pos(s), next(s);
    for (std::size_t i = 0; i < s; ++i) pos[i] = graph.position(sigma[i]);
    auto current = [&](VertexId w) -> const Vec3& {
        const int t = tab[w];
        return t <= -2 ? pos[static_cast<std::size_t>(-2 - t)] : graph.position(w);
    };
    for (int it = 0; it < iterations; ++it) {
        for (std::size_t i = 0; i < s; ++i) {
            const auto nb = graph.neighbors(sigma[i]);
            if (nb.empty()) {
                next[i] = pos[i];
                continue;
            }
            Vec3 acc = Vec3::Zero();
            double wsum = 0.0;
            for (VertexId u : nb) {
                const Vec3& pu = current(u);
                const double w = 1.0 / ((pu - pos[i]).norm() + eps);
                acc += w * pu;
                wsum += w;
            }
            next[i] = acc / wsum;
        }
        pos.swap(next);
    }

    std::vector<std::size_t> order(s);
    std::vector<double> dist(s);
    for (std::size_t i = 0; i < s; ++i) {
        order[i] = i;
        dist[i] = (pos[i] - center).norm();
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dist[a] != dist[b]) return dist[a] > dist[b];
        return sigma[a] < sigma[b];
    });

    std::vector<char> alive(s, 1);
    auto lookup = [&](VertexId w) { return std::max(tab[w], -1); };
    for (;;) {
        bool progress = false;
        for (std::size_t idx : order) {
            if (!alive[idx]) continue;
            int f = -1;
            if (count_fronts(graph, sigma[idx], lookup, &f) == 1) {
                alive[idx] = 0;
                tab.set(sigma[idx], f);
                out.fronts[f].push_back(sigma[idx]);
                progress = true;
            }
        }
        bool minimal = true;
        for (std::size_t i = 0; i < s && minimal; ++i)
            if (alive[i] && count_fronts(graph, sigma[i], lookup, nullptr) < 2) minimal = false;
        if (minimal) break;
        if (!progress) {
            // Only vertices buried inside Σ (no front neighbour) remain
            // non-minimal; they separate nothing and are dropped.
            for (std::size_t i = 0; i < s; ++i)
                if (alive[i] && count_fronts(graph, sigma[i], lookup, nullptr) == 0) {
                    alive[i] = 0;
                    progress = true;
                }
            if (!progress) break;
        }
    }

    for (std::size_t i = 0; i < s; ++i)
        if (alive[i]) out.separator.push_back(sigma[i]);
    std::sort(out.separator.begin(), out.separator.end());
    for (auto& f : out.fronts) std::sort(f.begin(), f.end());
    return out;
}

// ---------------------------------------------------------------------------
// Energy-lowering swaps
// ---------------------------------------------------------------------------

namespace {

class SwapOptimizer {
public:
    SwapOptimizer(const SpatialGraph& graph, std::span<const VertexId> sigma,
                  std::span<const VertexSet> fronts, std::span<const VertexId> original)
        : graph_(graph), in_sigma_(sigma.begin(), sigma.end()),
          original_(original.begin(), original.end()), front_of_(front_map(fronts)),
          front_count_(static_cast<int>(fronts.size())) {}

    struct Swap {
        VertexId v, u;
        int target_front;  // where v goes
        double delta;
    };

    double energy() const {
        double e = 0.0;
        for (VertexId u : in_sigma_)
            for (VertexId v : graph_.neighbors(u))
                if (u < v && in_sigma_.contains(v)) e += graph_.edge_length(u, v);
        return e;
    }

    /// All swaps satisfying the three exchange conditions and preserving
    /// minimality, in (v, u) order.
    std::vector<Swap> legal_swaps() {
        std::vector<VertexId> sig(in_sigma_.begin(), in_sigma_.end());
        std::sort(sig.begin(), sig.end());
        std::vector<Swap> out;
        for (VertexId v : sig)
            for (VertexId u : graph_.neighbors(v)) {
                if (in_sigma_.contains(u) || !original_.contains(u)) continue;
                auto fu = front_of_.find(u);
                if (fu == front_of_.end()) continue;
                if (auto s = check(v, u, fu->second)) out.push_back(*s);
            }
        return out;
    }

    void apply(const Swap& s) {
        in_sigma_.erase(s.v);
        in_sigma_.insert(s.u);
        front_of_.erase(s.u);
        front_of_[s.v] = s.target_front;
    }

    VertexSet separator() const {
        VertexSet out(in_sigma_.begin(), in_sigma_.end());
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<VertexSet> fronts() const {
        std::vector<VertexSet> out(front_count_);
        for (auto [v, f] : front_of_) out[f].push_back(v);
        for (auto& f : out) std::sort(f.begin(), f.end());
        return out;
    }

    /// Steepest-first-found descent; returns true if anything changed.
    bool descend() {
        bool changed = false;
        for (;;) {
            auto swaps = legal_swaps();
            auto best = std::find_if(swaps.begin(), swaps.end(),
                                     [&](const Swap& s) { return s.delta < -tolerance(); });
            if (best == swaps.end()) return changed;
            apply(*best);
            changed = true;
        }
    }

    struct State {
        std::unordered_set<VertexId> sigma;
        FrontMap fronts;
    };
    State save() const { return {in_sigma_, front_of_}; }
    void restore(State s) {
        in_sigma_ = std::move(s.sigma);
        front_of_ = std::move(s.fronts);
    }

    double tolerance() const { return 1e-12 * graph_.bounding_box_diagonal(); }

private:
    int front_of(VertexId w) const {
        auto it = front_of_.find(w);
        return it == front_of_.end() ? -1 : it->second;
    }

    std::optional<Swap> check(VertexId v, VertexId u, int fu) const {
        // v has no neighbour other than u in u's front; the other fronts it
        // touches must be exactly one, which is where v ends up.
        int target = -1;
        for (VertexId w : graph_.neighbors(v)) {
            if (w == u) continue;
            const int f = front_of(w);
            if (f < 0) continue;
            if (f == fu) return std::nullopt;
            if (target >= 0 && f != target) return std::nullopt;
            target = f;
        }
        if (target < 0) return std::nullopt;

        // N(u) ∩ Σ \ {v} == N(v) ∩ Σ
        std::vector<VertexId> nv, nu;
        for (VertexId w : graph_.neighbors(v))
            if (in_sigma_.contains(w)) nv.push_back(w);
        for (VertexId w : graph_.neighbors(u))
            if (w != v && in_sigma_.contains(w)) nu.push_back(w);
        if (nv != nu) return std::nullopt;

        // After the swap u must still reach front fu, and every shared Σ
        // neighbour must still touch two fronts.
        auto after = [&](VertexId w) {
            if (w == v) return target;
            if (w == u) return -1;
            return front_of(w);
        };
        auto touches_two = [&](VertexId x) {
            int a = -1;
            for (VertexId w : graph_.neighbors(x)) {
                const int f = after(w);
                if (f < 0) continue;
                if (a < 0) a = f;
                else if (f != a) return true;
            }
            return false;
        };
        if (!touches_two(u)) return std::nullopt;
        for (VertexId w : nv)
            if (!touches_two(w)) return std::nullopt;

        double delta = 0.0;
        for (VertexId w : nv) delta += graph_.edge_length(u, w) - graph_.edge_length(v, w);
        return Swap{v, u, target, delta};
    }

    const SpatialGraph& graph_;
    std::unordered_set<VertexId> in_sigma_;
    std::unordered_set<VertexId> original_;
    FrontMap front_of_;
    int front_count_;
};

constexpr int kPerturbRounds = 4;
constexpr std::size_t kPerturbSwaps = 4;

} // namespace

OptimizedSeparator optimize_separator(const SpatialGraph& graph, std::span<const VertexId> sigma,
                                      std::span<const VertexSet> fronts,
                                      std::span<const VertexId> original, std::uint64_t seed) {
    SwapOptimizer opt(graph, sigma, fronts, original);
    OptimizedSeparator out;
    out.energy_before = opt.energy();

    if (opt.descend()) {
        CounterRng rng(seed, 0x5eed);
        double best = opt.energy();
        for (int round = 0; round < kPerturbRounds; ++round) {
            auto saved = opt.save();
            const std::size_t k = std::min(kPerturbSwaps, sigma.size());
            for (std::size_t i = 0; i < k; ++i) {
                auto swaps = opt.legal_swaps();
                if (swaps.empty()) break;
                opt.apply(swaps[rng.below(swaps.size())]);
            }
            opt.descend();
            const double e = opt.energy();
            if (e < best - opt.tolerance()) best = e;
            else opt.restore(std::move(saved));
        }
    }

    out.separator = opt.separator();
    out.fronts = opt.fronts();
    out.energy_after = opt.energy();
    return out;
}

// ---------------------------------------------------------------------------
// Region growing
// ---------------------------------------------------------------------------

namespace {

enum : std::uint8_t { kOutside = 0, kInSigma = 1, kInFront = 2 };

/// Per-thread scratch space, sized to the graph and reset sparsely.
struct GrowWorkspace {
    std::vector<std::uint8_t> state;
    std::vector<int> label;
    std::vector<VertexId> touched;
    std::vector<VertexId> stack;
    std::vector<std::size_t> comp_size;

    explicit GrowWorkspace(std::size_t n) : state(n, kOutside), label(n, -1) {}

    void mark(VertexId v, std::uint8_t s) {
        if (state[v] == kOutside) touched.push_back(v);
        state[v] = s;
    }
    void reset() {
        for (VertexId v : touched) {
            state[v] = kOutside;
            label[v] = -1;
        }
        touched.clear();
    }
};

/// Labels front components in front order and records their sizes.
void label_front(const SpatialGraph& graph, const std::vector<VertexId>& front, GrowWorkspace& ws) {
    for (VertexId f : front) ws.label[f] = -1;
    ws.comp_size.clear();
    for (VertexId s : front) {
        if (ws.label[s] >= 0) continue;
        const int id = static_cast<int>(ws.comp_size.size());
        std::size_t size = 0;
        ws.label[s] = id;
        ws.stack.assign(1, s);
        while (!ws.stack.empty()) {
            const VertexId v = ws.stack.back();
            ws.stack.pop_back();
            ++size;
            for (VertexId w : graph.neighbors(v))
                if (ws.state[w] == kInFront && ws.label[w] < 0) {
                    ws.label[w] = id;
                    ws.stack.push_back(w);
                }
        }
        ws.comp_size.push_back(size);
    }
}

double size_ratio(const std::vector<std::size_t>& sizes) {
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    return static_cast<double>(*lo) / static_cast<double>(*hi);
}

Separator grow_separator(const SpatialGraph& graph, VertexId v0, const SeparatorOptions& options,
                         GrowWorkspace& ws) {
    Separator result;
    ws.reset();

    std::vector<VertexId> sigma{v0};
    std::vector<VertexId> front;
    ws.mark(v0, kInSigma);
    for (VertexId w : graph.neighbors(v0)) {
        ws.mark(w, kInFront);
        front.push_back(w);
    }
    if (front.empty()) return result;
    if (front.size() == 1) {
        result.vertices = {v0};
        result.quality = 1.0;
        result.center = graph.position(v0);
        result.fronts = {{front.front()}};
        return result;
    }

    label_front(graph, front, ws);
    Vec3 c = graph.position(v0);
    double r = 0.0;
    const double eps = graph.epsilon();

    while (ws.comp_size.size() == 1 || size_ratio(ws.comp_size) < options.tau) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < front.size(); ++i) {
            const double d = (c - graph.position(front[i])).norm();
            if (d < best_d || (d == best_d && front[i] < front[best])) {
                best_d = d;
                best = i;
            }
        }
        const VertexId v = front[best];
        const Vec3& pv = graph.position(v);
        if (best_d > r) {
            r = 0.5 * (r + best_d);
            c = pv + (r / (eps + best_d)) * (c - pv);
        }
        front[best] = front.back();
        front.pop_back();
        ws.mark(v, kInSigma);
        sigma.push_back(v);
        for (VertexId w : graph.neighbors(v))
            if (ws.state[w] == kOutside) {
                ws.mark(w, kInFront);
                front.push_back(w);
            }
        if (front.empty()) return result;
        label_front(graph, front, ws);
    }

    result.quality = size_ratio(ws.comp_size);
    std::vector<VertexSet> components(ws.comp_size.size());
    for (VertexId f : front) components[ws.label[f]].push_back(f);
    for (auto& comp : components) std::sort(comp.begin(), comp.end());
    std::sort(components.begin(), components.end(),
              [](const VertexSet& a, const VertexSet& b) { return a.front() < b.front(); });

    auto shrunk = shrink_separator(graph, sigma, components, c);
    if (shrunk.separator.empty() || connected_components(graph, shrunk.separator).size() > 1)
        return Separator{};

    if (options.optimize) {
        auto opt = optimize_separator(graph, shrunk.separator, shrunk.fronts, sigma,
                                      mix64(options.seed) ^ v0);
        shrunk.separator = std::move(opt.separator);
        shrunk.fronts = std::move(opt.fronts);
    }

    // Keep only the front vertices that still border Σ.
    std::unordered_set<VertexId> in(shrunk.separator.begin(), shrunk.separator.end());
    for (auto& f : shrunk.fronts) {
        std::erase_if(f, [&](VertexId w) {
            const auto nb = graph.neighbors(w);
            return std::none_of(nb.begin(), nb.end(), [&](VertexId x) { return in.contains(x); });
        });
        if (!f.empty()) result.fronts.push_back(std::move(f));
    }
    result.vertices = std::move(shrunk.separator);
    result.center = c;
    result.radius = r;
    return result;
}

std::vector<VertexId> visit_order(std::size_t n, std::uint64_t seed) {
    std::vector<VertexId> order(n);
    for (VertexId i = 0; i < n; ++i) order[i] = i;
    CounterRng rng(seed, 0x0de5);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    return order;
}

/// Draw deciding whether v launches a search, given its current count.
bool launches(std::uint64_t seed, VertexId v, std::uint32_t count) {
    if (count == 0) return true;
    if (count >= 64) return false;
    CounterRng rng(seed, 0x1a0c);
    const double u = static_cast<double>(rng.at(v) >> 11) * 0x1.0p-53;
    return u < std::ldexp(1.0, -static_cast<int>(count));
}

} // namespace

Separator local_separator(const SpatialGraph& graph, VertexId v0, const SeparatorOptions& options) {
    if (v0 >= graph.vertex_count())
        throw std::invalid_argument("start vertex " + std::to_string(v0) + " out of range");
    GrowWorkspace ws(graph.vertex_count());
    return grow_separator(graph, v0, options, ws);
}

SeparatorSet sample_separators_serial(const SpatialGraph& graph, double tau, bool optimize,
                                      std::uint64_t seed) {
    SeparatorSet out;
    out.source_graph_size = graph.vertex_count();
    const SeparatorOptions opts{tau, optimize, seed};
    GrowWorkspace ws(graph.vertex_count());
    std::vector<std::uint32_t> count(graph.vertex_count(), 0);
    for (VertexId v : visit_order(graph.vertex_count(), seed)) {
        if (!launches(seed, v, count[v])) continue;
        auto sep = grow_separator(graph, v, opts, ws);
        if (sep.empty()) continue;
        for (VertexId w : sep.vertices) ++count[w];
        out.separators.push_back(std::move(sep));
    }
    return out;
}

SeparatorSet sample_separators(const SpatialGraph& graph, const SamplingOptions& options) {
    if (options.threads <= 1)
        return sample_separators_serial(graph, options.tau, options.optimize, options.seed);

    const auto n = graph.vertex_count();
    const auto order = visit_order(n, options.seed);
    const SeparatorOptions opts{options.tau, options.optimize, options.seed};
    // Counts are read and bumped without ordering; a stale read only makes a
    // vertex more likely to launch.
    std::vector<std::atomic<std::uint32_t>> count(n);
    for (auto& c : count) c.store(0, std::memory_order_relaxed);

    std::vector<std::pair<std::size_t, Separator>> found;
#pragma omp parallel num_threads(options.threads)
    {
        GrowWorkspace ws(n);
        std::vector<std::pair<std::size_t, Separator>> local;
#pragma omp for schedule(dynamic, 16) nowait
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
            const VertexId v = order[i];
            if (!launches(options.seed, v, count[v].load(std::memory_order_relaxed))) continue;
            auto sep = grow_separator(graph, v, opts, ws);
            if (sep.empty()) continue;
            for (VertexId w : sep.vertices) count[w].fetch_add(1, std::memory_order_relaxed);
            local.emplace_back(static_cast<std::size_t>(i), std::move(sep));
        }
#pragma omp critical(sepskel_sample_merge)
        for (auto& item : local) found.push_back(std::move(item));
    }
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    SeparatorSet out;
    out.source_graph_size = n;
    out.separators.reserve(found.size());
    for (auto& [idx, sep] : found) out.separators.push_back(std::move(sep));
    return out;
}

} // namespace sepskel
