#pragma once

#include "classpulse/dissimilarity.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace classpulse {

enum class Linkage { Single, Complete, Average, Ward };

inline constexpr std::array<Linkage, 4> kAllLinkages{Linkage::Single, Linkage::Complete,
                                                     Linkage::Average, Linkage::Ward};

const char* to_string(Linkage linkage);
std::optional<Linkage> parse_linkage(std::string_view name);

/// One agglomeration step. Cluster references 0..n-1 are the original
/// observations; n + t is the cluster created at step t. `left` is the
/// cluster whose smallest member index is lower.
struct Merge {
    std::size_t left = 0;
    std::size_t right = 0;
    double height = 0.0;
    std::size_t size = 0;

    friend bool operator==(const Merge&, const Merge&) = default;
};

struct MergeTrace {
    std::size_t n = 0;
    std::vector<Merge> steps;

    friend bool operator==(const MergeTrace&, const MergeTrace&) = default;
};

struct AgglomerativeCoefficient {
    double value = 0.0;
    /// Set when the final merge height is zero (all observations coincide).
    bool degenerate = false;
};

struct ClusteringModel {
    Linkage linkage = Linkage::Single;
    MergeTrace trace;
    AgglomerativeCoefficient ac;
};

/// Agglomerative nesting over `d` with the Lance-Williams update for the
/// given linkage. Ward runs on squared dissimilarities and reports
/// square-rooted heights.
///
/// Pairs whose distance is within a relative 1e-12 of the step minimum are
/// treated as tied; ties go to the lexicographically least
/// (smaller canonical id, larger canonical id) pair, where a cluster's
/// canonical id is its smallest member index.
///
/// Throws InsufficientObservationsError for n < 2.
ClusteringModel agnes(const DissimilarityMatrix& d, Linkage linkage);

/// All four linkages on the same matrix, in kAllLinkages order.
std::array<ClusteringModel, 4> agnes_all(const DissimilarityMatrix& d);

/// Mean over observations of 1 - (height of the observation's first merge /
/// height of the final merge).
AgglomerativeCoefficient agglomerative_coefficient(const MergeTrace& trace);

/// Highest agglomerative coefficient wins; exact ties prefer
/// Ward > Complete > Average > Single.
const ClusteringModel& select_model(std::span<const ClusteringModel> models);

}  // namespace classpulse
