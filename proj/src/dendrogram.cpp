#include "classpulse/dendrogram.hpp"

#include "classpulse/error.hpp"

#include <utility>

namespace classpulse {

Dendrogram build_dendrogram(const MergeTrace& trace, const std::vector<std::string>& labels) {
    if (trace.n == 0) throw StructuralError("dendrogram needs at least one observation");
    if (labels.size() != trace.n) throw StructuralError("label count does not match trace");
    if (trace.steps.size() + 1 != trace.n) throw StructuralError("trace must hold n - 1 merges");

    std::vector<DendrogramNode> nodes(trace.n + trace.steps.size());
    std::vector<bool> consumed(nodes.size(), false);
    for (std::size_t i = 0; i < trace.n; ++i) {
        nodes[i].id = i;
        nodes[i].min_index = i;
        nodes[i].label = labels[i];
    }
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
        const auto& m = trace.steps[t];
        const std::size_t id = trace.n + t;
        if (m.left >= id || m.right >= id || m.left == m.right || consumed[m.left] || consumed[m.right]) {
            throw StructuralError("merge trace references an unavailable cluster");
        }
        consumed[m.left] = consumed[m.right] = true;

        DendrogramNode node;
        node.id = id;
        node.height = m.height;
        node.size = nodes[m.left].size + nodes[m.right].size;
        auto first = std::move(nodes[m.left]);
        auto second = std::move(nodes[m.right]);
        if (second.min_index < first.min_index) std::swap(first, second);
        node.min_index = first.min_index;
        node.children.push_back(std::move(first));
        node.children.push_back(std::move(second));
        nodes[id] = std::move(node);
    }
    return {trace, std::move(nodes.back())};
}

namespace {

void collect_leaves(const DendrogramNode& node, std::vector<std::size_t>& out) {
    if (node.is_leaf()) {
        out.push_back(node.id);
        return;
    }
    for (const auto& c : node.children) collect_leaves(c, out);
}

}  // namespace

std::vector<std::size_t> leaf_order(const DendrogramNode& node) {
    std::vector<std::size_t> out;
    collect_leaves(node, out);
    return out;
}

}  // namespace classpulse
