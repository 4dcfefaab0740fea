#include "classpulse/hierarchy.hpp"

#include "classpulse/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace classpulse {

namespace {

constexpr double kTieRelativeTolerance = 1e-12;

bool within_tie(double value, double minimum) noexcept {
    return value <= minimum + kTieRelativeTolerance * minimum;
}

// Lance-Williams update for the distance between (i u j) and k. Single and
// complete use the closed form of their recurrence (min / max) so the heights
// stay exact input values.
double lance_williams(Linkage linkage, double d_ik, double d_jk, double d_ij, double n_i, double n_j,
                      double n_k) {
    switch (linkage) {
        case Linkage::Single: return std::min(d_ik, d_jk);
        case Linkage::Complete: return std::max(d_ik, d_jk);
        case Linkage::Average: return (n_i * d_ik + n_j * d_jk) / (n_i + n_j);
        case Linkage::Ward: {
            const double total = n_i + n_j + n_k;
            return ((n_i + n_k) * d_ik + (n_j + n_k) * d_jk - n_k * d_ij) / total;
        }
    }
    return 0.0;
}

int preference(Linkage linkage) {
    switch (linkage) {
        case Linkage::Ward: return 3;
        case Linkage::Complete: return 2;
        case Linkage::Average: return 1;
        case Linkage::Single: return 0;
    }
    return -1;
}

}  // namespace

const char* to_string(Linkage linkage) {
    switch (linkage) {
        case Linkage::Single: return "single";
        case Linkage::Complete: return "complete";
        case Linkage::Average: return "average";
        case Linkage::Ward: return "ward";
    }
    return "unknown";
}

std::optional<Linkage> parse_linkage(std::string_view name) {
    for (auto l : kAllLinkages) {
        if (name == to_string(l)) return l;
    }
    return std::nullopt;
}

ClusteringModel agnes(const DissimilarityMatrix& d, Linkage linkage) {
    const std::size_t n = d.size();
    if (n < 2) throw InsufficientObservationsError("agglomerative clustering needs at least two observations");

    // Working distances between active slots. A slot keeps the position of the
    // cluster's smallest member, so the slot index is the canonical id.
    std::vector<double> work(d.values());
    if (linkage == Linkage::Ward) {
        for (auto& v : work) v *= v;
    }
    auto at = [&](std::size_t i, std::size_t j) -> double& { return work[i * n + j]; };

    std::vector<bool> active(n, true);
    std::vector<std::size_t> ref(n);
    std::vector<std::size_t> size(n, 1);
    for (std::size_t i = 0; i < n; ++i) ref[i] = i;

    ClusteringModel model;
    model.linkage = linkage;
    model.trace.n = n;
    model.trace.steps.reserve(n - 1);

    for (std::size_t step = 0; step + 1 < n; ++step) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (active[j]) best = std::min(best, at(i, j));
            }
        }
        // Row-major scan over slots with i < j visits pairs in lexicographic
        // canonical order, so the first tied pair is the tie-break winner.
        std::size_t a = n;
        std::size_t b = n;
        for (std::size_t i = 0; i < n && a == n; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (active[j] && within_tie(at(i, j), best)) {
                    a = i;
                    b = j;
                    break;
                }
            }
        }

        const double d_ab = at(a, b);
        const double height = linkage == Linkage::Ward ? std::sqrt(std::max(d_ab, 0.0)) : d_ab;
        const std::size_t merged_size = size[a] + size[b];
        model.trace.steps.push_back({ref[a], ref[b], height, merged_size});

        const auto n_a = static_cast<double>(size[a]);
        const auto n_b = static_cast<double>(size[b]);
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == a || k == b) continue;
            const double updated =
                lance_williams(linkage, at(a, k), at(b, k), d_ab, n_a, n_b, static_cast<double>(size[k]));
            at(a, k) = at(k, a) = updated;
        }
        active[b] = false;
        size[a] = merged_size;
        ref[a] = n + step;
    }

    model.ac = agglomerative_coefficient(model.trace);
    return model;
}

std::array<ClusteringModel, 4> agnes_all(const DissimilarityMatrix& d) {
    return {agnes(d, kAllLinkages[0]), agnes(d, kAllLinkages[1]), agnes(d, kAllLinkages[2]),
            agnes(d, kAllLinkages[3])};
}

AgglomerativeCoefficient agglomerative_coefficient(const MergeTrace& trace) {
    if (trace.n < 2 || trace.steps.size() != trace.n - 1) {
        throw StructuralError("merge trace must hold n - 1 merges for n >= 2");
    }
    std::vector<bool> used(2 * trace.n - 1, false);
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
        const auto& m = trace.steps[t];
        if (m.left == m.right || m.left >= trace.n + t || m.right >= trace.n + t || used[m.left] || used[m.right]) {
            throw StructuralError("merge " + std::to_string(t) + " references an unavailable cluster");
        }
        used[m.left] = used[m.right] = true;
    }
    const double final_height = trace.steps.back().height;
    if (!(final_height > 0.0)) return {0.0, true};

    std::vector<double> first_height(trace.n, -1.0);
    for (const auto& m : trace.steps) {
        for (auto r : {m.left, m.right}) {
            if (r < trace.n && first_height[r] < 0.0) first_height[r] = m.height;
        }
    }
    double sum = 0.0;
    for (double h : first_height) sum += 1.0 - h / final_height;
    const double ac = sum / static_cast<double>(trace.n);
    return {std::clamp(ac, 0.0, 1.0), false};
}

const ClusteringModel& select_model(std::span<const ClusteringModel> models) {
    if (models.empty()) throw StructuralError("no clustering models to select from");
    const ClusteringModel* best = &models.front();
    for (const auto& m : models.subspan(1)) {
        if (m.ac.value > best->ac.value ||
            (m.ac.value == best->ac.value && preference(m.linkage) > preference(best->linkage))) {
            best = &m;
        }
    }
    return *best;
}

}  // namespace classpulse
