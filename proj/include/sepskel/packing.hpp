#pragma once

#include <vector>

#include "sepskel/separators.hpp"

namespace sepskel {

struct PackedSeparators {
    std::vector<Separator> chosen;  // pairwise disjoint, in acceptance order
    std::vector<std::size_t> chosen_index;  // position of each in the input set
    std::size_t rejected_count = 0;
    std::size_t source_graph_size = 0;
};

/// redundancy(i) = sum over j != i of |S_i ∩ S_j|.
std::vector<double> redundancy_counts(const SeparatorSet& set);

/// Greedy weighted packing: ascending redundancy / quality (ties: smaller
/// separator, then lower index); each accepted separator claims its vertices.
PackedSeparators pack_separators(const SeparatorSet& set);

/// Same packing with pairwise intersection counting; O(l^2 S).
PackedSeparators pack_separators_serial(const SeparatorSet& set);

} // namespace sepskel
