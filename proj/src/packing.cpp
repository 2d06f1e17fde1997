#include "sepskel/packing.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace sepskel {

namespace {

std::size_t universe_size(const SeparatorSet& set) {
    std::size_t n = set.source_graph_size;
    for (const auto& s : set.separators)
        if (!s.vertices.empty()) n = std::max<std::size_t>(n, s.vertices.back() + 1);
    return n;
}

PackedSeparators greedy_pack(const SeparatorSet& set, const std::vector<double>& redundancy) {
    const auto& seps = set.separators;
    std::vector<double> key(seps.size());
    for (std::size_t i = 0; i < seps.size(); ++i) {
        if (redundancy[i] == 0.0) key[i] = 0.0;
        else if (seps[i].quality > 0.0) key[i] = redundancy[i] / seps[i].quality;
        else key[i] = std::numeric_limits<double>::infinity();
    }
    std::vector<std::size_t> order(seps.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (key[a] != key[b]) return key[a] < key[b];
        if (seps[a].vertices.size() != seps[b].vertices.size())
            return seps[a].vertices.size() < seps[b].vertices.size();
        return a < b;
    });

    PackedSeparators out;
    out.source_graph_size = universe_size(set);
    std::vector<char> taken(out.source_graph_size, 0);
    for (std::size_t i : order) {
        const auto& s = seps[i];
        if (s.vertices.empty()) {
            ++out.rejected_count;
            continue;
        }
        const bool free = std::none_of(s.vertices.begin(), s.vertices.end(),
                                       [&](VertexId v) { return taken[v] != 0; });
        if (!free) {
            ++out.rejected_count;
            continue;
        }
        for (VertexId v : s.vertices) taken[v] = 1;
        out.chosen.push_back(s);
        out.chosen_index.push_back(i);
    }
    return out;
}

} // namespace

std::vector<double> redundancy_counts(const SeparatorSet& set) {
    const auto& seps = set.separators;
    std::vector<std::uint32_t> cover(universe_size(set), 0);
    for (const auto& s : seps)
        for (VertexId v : s.vertices) ++cover[v];
    std::vector<double> red(seps.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(seps.size()); ++i) {
        double r = 0.0;
        for (VertexId v : seps[i].vertices) r += cover[v] - 1;
        red[i] = r;
    }
    return red;
}

PackedSeparators pack_separators(const SeparatorSet& set) {
    return greedy_pack(set, redundancy_counts(set));
}

PackedSeparators pack_separators_serial(const SeparatorSet& set) {
    const auto& seps = set.separators;
    std::vector<double> red(seps.size(), 0.0);
    for (std::size_t i = 0; i < seps.size(); ++i)
        for (std::size_t j = 0; j < seps.size(); ++j) {
            if (i == j) continue;
            std::size_t common = 0;
            auto a = seps[i].vertices.begin(), b = seps[j].vertices.begin();
            while (a != seps[i].vertices.end() && b != seps[j].vertices.end()) {
                if (*a < *b) ++a;
                else if (*b < *a) ++b;
                else {
                    ++common;
                    ++a;
                    ++b;
                }
            }
            red[i] += static_cast<double>(common);
        }
    return greedy_pack(set, red);
}

} // namespace sepskel
