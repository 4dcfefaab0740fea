#pragma once

#include "classpulse/dissimilarity.hpp"
#include "classpulse/hierarchy.hpp"

#include <cstddef>
#include <vector>

namespace classpulse {

/// Flat clustering. Cluster indices are ordered by each cluster's smallest
/// observation index, so equal partitions always get equal labels.
struct ClusterAssignment {
    std::size_t k = 0;
    std::vector<std::size_t> member_of;

    std::vector<std::vector<std::size_t>> members() const;

    friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;
};

/// Relabels an arbitrary labelling into canonical form.
ClusterAssignment canonicalize(const std::vector<std::size_t>& labels);

/// Undoes the last k - 1 merges. Throws InvalidKError unless 1 <= k <= n.
ClusterAssignment cut_tree(const MergeTrace& trace, std::size_t k);

/// Mean silhouette width; members of singleton clusters score 0.
/// Throws InvalidKError unless 2 <= k <= n - 1.
double silhouette_width(const DissimilarityMatrix& d, const ClusterAssignment& assignment);

struct KRange {
    std::size_t min = 2;
    std::size_t max = 8;
};

struct KChoice {
    std::size_t k = 0;
    /// Set when n < 3 and no silhouette search was possible.
    bool insufficient = false;
    /// Mean silhouette for each evaluated k, starting at the range minimum.
    std::vector<double> silhouettes;
};

/// k in [range.min, min(range.max, n - 1)] maximising mean silhouette; ties
/// go to the smaller k. For n < 3 returns k = min(n, 2) with `insufficient`.
KChoice choose_k(const MergeTrace& trace, const DissimilarityMatrix& d, KRange range = {});

}  // namespace classpulse
