#pragma once

#include "classpulse/domain.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace classpulse {

/// Class-level dashboard statistics. Score statistics are absent until at
/// least one student has answered a question.
struct KpiSnapshot {
    std::optional<double> min_score;
    std::optional<double> max_score;
    std::optional<double> median_score;
    std::optional<double> mean_score;
    std::size_t completed_count = 0;
    std::size_t active_students = 0;
    std::size_t events_seen = 0;
    std::uint64_t version = 0;
};

struct KcTotals {
    std::string kc_id;
    std::string kc_name;
    long incorrect_total = 0;
    long hints_total = 0;
};

struct KcSummary {
    std::vector<KcTotals> per_kc;
};

struct ScoreHistogram {
    int bin_width = 10;
    std::vector<std::size_t> bins;
};

/// Percentage of answered questions whose first response was correct.
std::optional<double> student_score(const StudentProgress& progress);

/// Median of the two central values for even counts. Empty input gives nullopt.
std::optional<double> median(std::vector<double> values);

KpiSnapshot compute_kpis(std::span<const StudentProgress> progress, std::size_t question_count,
                         std::size_t events_seen);
KpiSnapshot compute_kpis(EventLog log, const ActivitySpec& spec);

/// Column sums of the per-KC incorrect and hint families.
KcSummary kc_summary(const FeatureMatrix& fm, const ActivitySpec& spec);

/// Bin b covers [b*w, (b+1)*w); the last bin also includes 100.
/// Throws InvalidBinWidthError unless `bin_width` divides 100.
ScoreHistogram score_histogram(std::span<const std::optional<double>> scores, int bin_width = 10);

}  // namespace classpulse
