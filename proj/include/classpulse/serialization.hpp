#pragma once

#include "classpulse/analytics.hpp"
#include "classpulse/dendrogram.hpp"
#include "classpulse/domain.hpp"
#include "classpulse/recommend.hpp"
#include "classpulse/snapshot.hpp"

#include <json.hpp>

namespace classpulse {

using json = nlohmann::json;

/// Dendrogram wire form:
///   {"n", "merges": [[left, right, height, size], ...], "tree", "linkage", "ac"}
/// Tree nodes are {"id", "label"} for leaves and
/// {"id", "height", "size", "children": [a, b]} for merges.
json dendrogram_to_json(const Dendrogram& dendrogram, Linkage linkage, double ac);
json dendrogram_node_to_json(const DendrogramNode& node);

json kpis_to_json(const KpiSnapshot& kpis);
json alerts_to_json(std::span<const Alert> alerts);
json recommendations_to_json(std::span<const ClusterRecommendation> recs);
json clustering_to_json(const AnalyticsSnapshot& snapshot);
json snapshot_to_json(const AnalyticsSnapshot& snapshot);

json activity_to_json(const ActivitySpec& spec);
/// Expects {"kcs": [{"id", "name"}], "questions": [{"id", "kc"}],
/// "roster": [{"id", "name"}]}. Throws ValidationError on bad input.
ActivitySpec activity_from_json(const json& j);

/// Generic-format event: {"student_id", "question_id", "event_type":
/// "response"|"hint", "correct": 0|1|bool, "kc"?, "timestamp_ms"?,
/// "hint_ordinal"?}. A supplied "kc" must match the question's KC.
/// Throws ValidationError on bad input.
ActivityEvent event_from_json(const json& j, const ActivitySpec& spec, std::int64_t default_timestamp_ms);

}  // namespace classpulse
