#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace sepskel {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
    }

    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    /// Attaches the root of `child` below the root of `root`.
    void unite_into(std::uint32_t root, std::uint32_t child) {
        root = find(root);
        child = find(child);
        if (root != child) parent_[child] = root;
    }

    /// Union keeping the smaller root id as representative.
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) parent_[b] = a;
        else parent_[a] = b;
    }

private:
    std::vector<std::uint32_t> parent_;
};

} // namespace sepskel
