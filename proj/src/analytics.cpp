#include "classpulse/analytics.hpp"

#include "classpulse/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace classpulse {

std::optional<double> student_score(const StudentProgress& progress) {
    const auto answered = progress.answered();
    if (answered == 0) return std::nullopt;
    return 100.0 * static_cast<double>(progress.answered_correct()) / static_cast<double>(answered);
}

std::optional<double> median(std::vector<double> values) {
    if (values.empty()) return std::nullopt;
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return (values[mid - 1] + values[mid]) / 2.0;
}

KpiSnapshot compute_kpis(std::span<const StudentProgress> progress, std::size_t question_count,
                         std::size_t events_seen) {
    KpiSnapshot k;
    k.events_seen = events_seen;
    std::vector<double> scores;
    for (const auto& p : progress) {
        if (p.events > 0) ++k.active_students;
        if (auto s = student_score(p)) scores.push_back(*s);
        if (question_count > 0 && p.answered() == question_count) ++k.completed_count;
    }
    if (!scores.empty()) {
        auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
        k.min_score = *lo;
        k.max_score = *hi;
        k.mean_score = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
        k.median_score = median(scores);
    }
    return k;
}

KpiSnapshot compute_kpis(EventLog log, const ActivitySpec& spec) {
    const auto progress = progress_matrix(log, spec);
    return compute_kpis(progress, spec.questions().size(), log.size());
}

KcSummary kc_summary(const FeatureMatrix& fm, const ActivitySpec& spec) {
    KcSummary summary;
    for (const auto& kc : spec.kcs()) summary.per_kc.push_back({kc.id, kc.name, 0, 0});
    for (std::size_t col = 0; col < fm.cols(); ++col) {
        if (fm.feature_families[col] == FeatureFamily::Other) continue;
        auto kc = spec.kc_index(fm.feature_kcs[col]);
        if (!kc) throw StructuralError("feature column references unknown knowledge component");
        long total = 0;
        for (std::size_t row = 0; row < fm.rows(); ++row) total += std::lround(fm.at(row, col));
        auto& slot = summary.per_kc[*kc];
        (fm.feature_families[col] == FeatureFamily::Incorrect ? slot.incorrect_total : slot.hints_total) += total;
    }
    return summary;
}

ScoreHistogram score_histogram(std::span<const std::optional<double>> scores, int bin_width) {
    if (bin_width <= 0 || bin_width > 100 || 100 % bin_width != 0) {
        throw InvalidBinWidthError("bin width must divide 100");
    }
    ScoreHistogram h;
    h.bin_width = bin_width;
    const auto bins = static_cast<std::size_t>(100 / bin_width);
    h.bins.assign(bins, 0);
    for (const auto& s : scores) {
        if (!s) continue;
        const double v = std::clamp(*s, 0.0, 100.0);
        auto b = static_cast<std::size_t>(std::floor(v / bin_width));
        ++h.bins[std::min(b, bins - 1)];
    }
    return h;
}

}  // namespace classpulse
