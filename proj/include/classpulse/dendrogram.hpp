#pragma once

#include "classpulse/hierarchy.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace classpulse {

/// Leaf when `children` is empty; otherwise exactly two children, the one
/// holding the smallest original index first.
struct DendrogramNode {
    std::size_t id = 0;  // cluster reference, same convention as Merge
    double height = 0.0;
    std::size_t size = 1;
    std::size_t min_index = 0;
    std::string label;  // leaves only
    std::vector<DendrogramNode> children;

    bool is_leaf() const noexcept { return children.empty(); }
};

struct Dendrogram {
    MergeTrace trace;
    DendrogramNode root;

    std::size_t leaf_count() const noexcept { return trace.n; }
};

Dendrogram build_dendrogram(const MergeTrace& trace, const std::vector<std::string>& labels);

/// Leaf ids in left-to-right drawing order.
std::vector<std::size_t> leaf_order(const DendrogramNode& node);

}  // namespace classpulse
