#pragma once

#include "classpulse/analytics.hpp"
#include "classpulse/config.hpp"
#include "classpulse/dendrogram.hpp"
#include "classpulse/domain.hpp"
#include "classpulse/hierarchy.hpp"
#include "classpulse/partition.hpp"
#include "classpulse/recommend.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace classpulse {

struct ClusterBreakdown {
    std::size_t cluster = 0;
    std::vector<std::string> members;
    /// Indexed like the activity's KC list.
    std::vector<KcTotals> per_kc;
};

struct ClusteringResult {
    std::vector<std::string> students;  // row labels, dendrogram leaf ids index into this
    std::array<ClusteringModel, 4> models;
    Linkage selected = Linkage::Ward;
    Dendrogram dendrogram;
    ClusterAssignment assignment;
    std::size_t k = 0;
    bool k_fixed = false;
    std::vector<double> silhouettes;
    std::vector<ClusterBreakdown> breakdowns;

    const ClusteringModel& selected_model() const;
};

/// Machine-readable reasons for a snapshot without clustering.
namespace absent_reason {
inline constexpr const char* kInsufficientObservations = "insufficient_observations";
inline constexpr const char* kDegenerateFeatures = "degenerate_features";
}  // namespace absent_reason

/// Everything the dashboard shows for one event-log prefix.
struct AnalyticsSnapshot {
    std::uint64_t version = 0;
    std::size_t events_seen = 0;
    std::int64_t computed_at_ms = 0;
    KpiSnapshot kpis;
    std::vector<StudentProgress> progress;
    std::vector<std::optional<double>> scores;  // roster order
    ScoreHistogram histogram;
    KcSummary kc_summary;
    std::optional<ClusteringResult> clustering;
    std::optional<std::string> clustering_absent_reason;
    std::vector<Alert> alerts;
    std::vector<ClusterRecommendation> recommendations;
    bool degraded = false;
    std::optional<std::string> error;
};

/// Features -> Gower -> four linkages -> selection -> flat cut, over the
/// students selected by `config.clustering_rows`. Throws the clustering
/// engine's errors unchanged.
ClusteringResult cluster_students(EventLog log, const ActivitySpec& spec, const ServerConfig& config);

/// Builds a full snapshot for the given prefix. Clustering failures other
/// than the expected absent cases mark the snapshot degraded and carry the
/// previous snapshot's clustering forward.
AnalyticsSnapshot recompute(EventLog log, const ActivitySpec& spec, const ServerConfig& config,
                            std::uint64_t version, std::int64_t computed_at_ms,
                            const AnalyticsSnapshot* previous = nullptr);

}  // namespace classpulse
