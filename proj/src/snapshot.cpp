#include "classpulse/snapshot.hpp"

#include "classpulse/dissimilarity.hpp"
#include "classpulse/error.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>

namespace classpulse {

const ClusteringModel& ClusteringResult::selected_model() const {
    for (const auto& m : models) {
        if (m.linkage == selected) return m;
    }
    return models.back();
}

ClusteringResult cluster_students(EventLog log, const ActivitySpec& spec, const ServerConfig& config) {
    const auto fm = extract_features(log, spec, config.clustering_rows);
    if (fm.rows() < 2) throw InsufficientObservationsError("fewer than two students to cluster");
    const auto d = gower_dissimilarity(fm);

    ClusteringResult r;
    r.students = fm.students;
    r.models = agnes_all(d);
    const auto& best = select_model(r.models);
    r.selected = best.linkage;
    r.dendrogram = build_dendrogram(best.trace, fm.students);

    if (config.k.fixed) {
        r.k = std::clamp<std::size_t>(*config.k.fixed, 1, fm.rows());
        r.k_fixed = true;
    } else {
        auto choice = choose_k(best.trace, d, config.k.range);
        r.k = choice.k;
        r.silhouettes = std::move(choice.silhouettes);
    }
    r.assignment = cut_tree(best.trace, r.k);

    const auto members = r.assignment.members();
    for (std::size_t c = 0; c < r.assignment.k; ++c) {
        ClusterBreakdown b;
        b.cluster = c;
        for (const auto& kc : spec.kcs()) b.per_kc.push_back({kc.id, kc.name, 0, 0});
        for (auto row : members[c]) {
            b.members.push_back(fm.students[row]);
            for (std::size_t col = 0; col < fm.cols(); ++col) {
                auto kc = spec.kc_index(fm.feature_kcs[col]);
                if (!kc) continue;
                const auto v = static_cast<long>(fm.at(row, col));
                if (fm.feature_families[col] == FeatureFamily::Incorrect) b.per_kc[*kc].incorrect_total += v;
                if (fm.feature_families[col] == FeatureFamily::Hints) b.per_kc[*kc].hints_total += v;
            }
        }
        r.breakdowns.push_back(std::move(b));
    }
    return r;
}

AnalyticsSnapshot recompute(EventLog log, const ActivitySpec& spec, const ServerConfig& config,
                            std::uint64_t version, std::int64_t computed_at_ms,
                            const AnalyticsSnapshot* previous) {
    AnalyticsSnapshot s;
    s.version = version;
    s.events_seen = log.size();
    s.computed_at_ms = computed_at_ms;

    s.progress = progress_matrix(log, spec);
    s.kpis = compute_kpis(s.progress, spec.questions().size(), log.size());
    s.kpis.version = version;
    s.scores.reserve(s.progress.size());
    for (const auto& p : s.progress) s.scores.push_back(student_score(p));
    s.histogram = score_histogram(s.scores, config.histogram_bin_width);
    if (!spec.roster().empty()) {
        s.kc_summary = kc_summary(extract_features(log, spec, InclusionPolicy::FullRoster), spec);
    }

    const std::span<const Alert> prior = previous ? std::span<const Alert>(previous->alerts) : std::span<const Alert>{};
    s.alerts = evaluate_alerts(log, spec, config.alert_rules, prior);

    try {
        s.clustering = cluster_students(log, spec, config);
    } catch (const InsufficientObservationsError&) {
        s.clustering_absent_reason = absent_reason::kInsufficientObservations;
    } catch (const StructuralError&) {
        // Empty roster: nothing to cluster.
        s.clustering_absent_reason = absent_reason::kInsufficientObservations;
    } catch (const DegenerateFeaturesError&) {
        s.clustering_absent_reason = absent_reason::kDegenerateFeatures;
    } catch (const std::exception& e) {
        spdlog::error("clustering failed at version {}: {}", version, e.what());
        s.degraded = true;
        s.error = e.what();
        if (previous) {
            s.clustering = previous->clustering;
            s.clustering_absent_reason = previous->clustering_absent_reason;
        }
    }

    if (s.clustering) {
        const auto fm = extract_features(log, spec, config.clustering_rows);
        // A carried-forward clustering may not align with the current rows.
        if (fm.rows() == s.clustering->assignment.member_of.size() && fm.students == s.clustering->students) {
            s.recommendations = describe_clusters(s.clustering->assignment, fm, spec, config.templates);
        }
    }
    return s;
}

}  // namespace classpulse
