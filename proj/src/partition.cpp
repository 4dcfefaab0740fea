#include "classpulse/partition.hpp"

#include "classpulse/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace classpulse {

std::vector<std::vector<std::size_t>> ClusterAssignment::members() const {
    std::vector<std::vector<std::size_t>> out(k);
    for (std::size_t i = 0; i < member_of.size(); ++i) out[member_of[i]].push_back(i);
    return out;
}

ClusterAssignment canonicalize(const std::vector<std::size_t>& labels) {
    ClusterAssignment out;
    out.member_of.resize(labels.size());
    std::vector<std::pair<std::size_t, std::size_t>> seen;  // (raw label, canonical)
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& p) { return p.first == labels[i]; });
        if (it == seen.end()) {
            seen.emplace_back(labels[i], seen.size());
            out.member_of[i] = seen.back().second;
        } else {
            out.member_of[i] = it->second;
        }
    }
    out.k = seen.size();
    return out;
}

ClusterAssignment cut_tree(const MergeTrace& trace, std::size_t k) {
    const std::size_t n = trace.n;
    if (k < 1 || k > n) throw InvalidKError("k must lie in [1, n]");
    if (trace.steps.size() + 1 != n) throw StructuralError("trace must hold n - 1 merges");

    // Union-find over cluster references; applying the first n - k merges
    // leaves exactly k components.
    std::vector<std::size_t> parent(2 * n - 1);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::size_t t = 0; t < n - k; ++t) {
        const auto& m = trace.steps[t];
        parent[find(m.left)] = n + t;
        parent[find(m.right)] = n + t;
    }
    std::vector<std::size_t> raw(n);
    for (std::size_t i = 0; i < n; ++i) raw[i] = find(i);
    return canonicalize(raw);
}

double silhouette_width(const DissimilarityMatrix& d, const ClusterAssignment& assignment) {
    const std::size_t n = d.size();
    const std::size_t k = assignment.k;
    if (assignment.member_of.size() != n) throw StructuralError("assignment does not match matrix");
    if (k < 2 || k + 1 > n) throw InvalidKError("silhouette needs 2 <= k <= n - 1");

    std::vector<std::size_t> cluster_size(k, 0);
    for (auto c : assignment.member_of) ++cluster_size[c];

    double total = 0.0;
    std::vector<double> sums(k);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t own = assignment.member_of[i];
        if (cluster_size[own] == 1) continue;
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) sums[assignment.member_of[j]] += d(i, j);
        }
        const double a = sums[own] / static_cast<double>(cluster_size[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c != own) b = std::min(b, sums[c] / static_cast<double>(cluster_size[c]));
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(n);
}

KChoice choose_k(const MergeTrace& trace, const DissimilarityMatrix& d, KRange range) {
    const std::size_t n = trace.n;
    if (d.size() != n) throw StructuralError("trace and matrix sizes differ");
    KChoice choice;
    if (n < 3) {
        choice.k = std::min<std::size_t>(n, 2);
        choice.insufficient = true;
        return choice;
    }
    const std::size_t lo = std::max<std::size_t>(range.min, 2);
    const std::size_t hi = std::min(range.max, n - 1);
    if (lo > hi) throw InvalidKError("empty k range");

    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = lo; k <= hi; ++k) {
        const double s = silhouette_width(d, cut_tree(trace, k));
        choice.silhouettes.push_back(s);
        if (s > best) {
            best = s;
            choice.k = k;
        }
    }
    return choice;
}

}  // namespace classpulse
