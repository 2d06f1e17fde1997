#include "sepskel/reeb.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace sepskel {

HeightField axis_height(const SpatialGraph& graph, const Vec3& axis, int smooth_iters) {
    if (axis.norm() == 0.0) throw std::invalid_argument("axis must be nonzero");
    if (smooth_iters < 0) throw std::invalid_argument("smoothing rounds must be non-negative");
    const Vec3 a = axis.normalized();
    const auto n = graph.vertex_count();
    HeightField h(n), next(n);
    for (VertexId v = 0; v < n; ++v) h[v] = graph.position(v).dot(a);
    for (int it = 0; it < smooth_iters; ++it) {
        for (VertexId v = 0; v < n; ++v) {
            const auto nb = graph.neighbors(v);
            if (nb.empty()) {
                next[v] = h[v];
                continue;
            }
            double s = 0.0;
            for (VertexId u : nb) s += h[u];
            next[v] = 0.5 * h[v] + 0.5 * s / static_cast<double>(nb.size());
        }
        h.swap(next);
    }
    return h;
}

SeparatorSet sweep_separators(const SpatialGraph& graph, std::span<const double> h,
                              const SweepObserver& observer) {
    const auto n = graph.vertex_count();
    if (h.size() != n) throw std::invalid_argument("height field size does not match the graph");

    SeparatorSet out;
    out.source_graph_size = n;
    std::vector<SweepState> state(n, SweepState::Unvisited);
    std::vector<char> blocked(n, 0), emitted(n, 0), mark(n, 0);

    using Entry = std::tuple<double, VertexId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    auto enqueue = [&](VertexId v, bool from_separator) {
        state[v] = SweepState::Queued;
        blocked[v] = from_separator;
        heap.emplace(h[v], v);
    };

    for (VertexId v = 0; v < n; ++v) {
        const auto nb = graph.neighbors(v);
        if (std::all_of(nb.begin(), nb.end(), [&](VertexId u) { return h[v] <= h[u]; }))
            state[v] = SweepState::Frozen;
    }
    for (VertexId v = 0; v < n; ++v)
        if (state[v] == SweepState::Frozen)
            for (VertexId u : graph.neighbors(v))
                if (state[u] == SweepState::Unvisited) enqueue(u, false);

    std::vector<VertexId> seeds, component, stack, touched;
    auto try_emit = [&]() {
        for (VertexId s : seeds) {
            if (state[s] != SweepState::Queued || mark[s]) continue;
            component.clear();
            stack.assign(1, s);
            mark[s] = 1;
            touched.push_back(s);
            bool eligible = true;
            while (!stack.empty()) {
                const VertexId v = stack.back();
                stack.pop_back();
                component.push_back(v);
                if (blocked[v] || emitted[v]) eligible = false;
                for (VertexId u : graph.neighbors(v))
                    if (state[u] == SweepState::Queued && !mark[u]) {
                        mark[u] = 1;
                        touched.push_back(u);
                        stack.push_back(u);
                    }
            }
            if (!eligible) continue;

            Separator sep;
            std::sort(component.begin(), component.end());
            VertexSet below, above;
            for (VertexId v : component)
                for (VertexId u : graph.neighbors(v)) {
                    if (state[u] == SweepState::Frozen) below.push_back(u);
                    else if (state[u] == SweepState::Unvisited) above.push_back(u);
                }
            for (auto* f : {&below, &above}) {
                std::sort(f->begin(), f->end());
                f->erase(std::unique(f->begin(), f->end()), f->end());
            }
            if (above.empty() || below.empty()) continue;

            Vec3 c = Vec3::Zero();
            for (VertexId v : component) c += graph.position(v);
            c /= static_cast<double>(component.size());
            double r = 0.0;
            for (VertexId v : component) r = std::max(r, (graph.position(v) - c).norm());
            for (VertexId v : component) emitted[v] = 1;

            sep.quality = static_cast<double>(std::min(below.size(), above.size())) /
                          static_cast<double>(std::max(below.size(), above.size()));
            sep.vertices = component;
            sep.center = c;
            sep.radius = r;
            sep.fronts = {std::move(below), std::move(above)};
            out.separators.push_back(std::move(sep));
        }
        for (VertexId v : touched) mark[v] = 0;
        touched.clear();
    };

    for (VertexId v = 0; v < n; ++v)
        if (state[v] == SweepState::Queued) seeds.push_back(v);
    if (observer) observer(state);
    try_emit();

    while (!heap.empty()) {
        const auto [hv, v] = heap.top();
        heap.pop();
        if (state[v] != SweepState::Queued) continue;
        state[v] = SweepState::Frozen;
        seeds.clear();
        for (VertexId u : graph.neighbors(v)) {
            if (state[u] == SweepState::Unvisited) enqueue(u, emitted[v] != 0);
            if (state[u] == SweepState::Queued) seeds.push_back(u);
        }
        if (observer) observer(state);
        try_emit();
    }
    return out;
}

} // namespace sepskel
