#pragma once

#include "classpulse/domain.hpp"
#include "classpulse/partition.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace classpulse {

enum class AlertKind { WrongStreak, HintHeavy, ClassStruggle, LowMedian };
enum class Severity { Info, Warning };
enum class SubjectKind { Student, Question, Class };

const char* to_string(AlertKind kind);
const char* to_string(Severity severity);
const char* to_string(SubjectKind kind);
std::optional<AlertKind> parse_alert_kind(const std::string& name);

/// One alert rule. Only the thresholds relevant to `kind` are consulted:
///   WrongStreak   - last `streak_length` first responses of a student incorrect
///   HintHeavy     - a student's total hints >= `hint_count`
///   ClassStruggle - more than `fraction` of a question's answerers wrong, with
///                   at least `min_answers` answers
///   LowMedian     - class median below `percentage`, with at least
///                   `min_scores` scored students
struct AlertRule {
    std::string id;
    AlertKind kind = AlertKind::WrongStreak;
    int streak_length = 3;
    int hint_count = 5;
    double fraction = 0.5;
    int min_answers = 3;
    double percentage = 60.0;
    int min_scores = 5;
    bool enabled = true;
    /// fmt-style template; empty means the built-in message for `kind`.
    std::string message_template;
};

/// Throws ValidationError when a threshold is not strictly positive or the
/// fraction lies outside (0, 1].
void validate_rule(const AlertRule& rule);

std::vector<AlertRule> default_alert_rules();

struct AlertSubject {
    SubjectKind kind = SubjectKind::Class;
    std::string id;

    friend bool operator==(const AlertSubject&, const AlertSubject&) = default;
};

struct Alert {
    std::string rule_id;
    AlertKind kind = AlertKind::WrongStreak;
    Severity severity = Severity::Info;
    AlertSubject subject;
    std::string message;
    std::uint64_t first_seen = 0;
    std::uint64_t last_seen = 0;
};

/// Evaluates every enabled rule over the log prefix. Alerts are keyed on
/// (rule id, subject): an alert present in `previous` keeps its first_seen and
/// gets last_seen advanced to the prefix high-water mark (the log length).
std::vector<Alert> evaluate_alerts(EventLog log, const ActivitySpec& spec, std::span<const AlertRule> rules,
                                   std::span<const Alert> previous = {});

/// Message templates for per-cluster recommendations. Placeholders: {g}
/// (1-based group number), {members}, {kc_i}, {kc_h}.
struct RecommendationTemplates {
    std::string full =
        "Group {g} ({members}): most incorrect answers in {kc_i}; most hints used in {kc_h}. "
        "Consider targeted review of {kc_i}.";
    std::string incorrect_only =
        "Group {g} ({members}): most incorrect answers in {kc_i}; no hints used so far. "
        "Consider targeted review of {kc_i}.";
    std::string hints_only = "Group {g} ({members}): no incorrect answers so far; most hints used in {kc_h}.";
    std::string no_difficulty = "Group {g} ({members}) shows no difficulties so far.";
};

struct ClusterRecommendation {
    std::size_t cluster = 0;
    std::vector<std::string> member_ids;
    std::vector<std::string> member_names;
    std::optional<std::string> dominant_incorrect_kc;
    std::optional<std::string> dominant_hint_kc;
    std::string message;
};

/// One recommendation per cluster. Dominant KCs are the argmax of summed
/// counts with ties resolved by KC name; absent when the family sums to zero.
/// Throws StructuralError when the assignment and feature rows disagree.
std::vector<ClusterRecommendation> describe_clusters(const ClusterAssignment& assignment,
                                                     const FeatureMatrix& fm, const ActivitySpec& spec,
                                                     const RecommendationTemplates& templates = {});

}  // namespace classpulse
