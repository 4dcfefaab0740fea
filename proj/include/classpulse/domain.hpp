#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace classpulse {

struct KnowledgeComponent {
    std::string id;
    std::string name;
};

struct Question {
    std::string id;
    std::string kc_id;
};

struct Student {
    std::string id;
    std::string display_name;
};

/// Questions, knowledge components and roster of one in-class activity.
///
/// Construction validates the invariants (unique ids, every question tagged
/// with a declared KC, non-empty KC names) and builds the id indexes, so a
/// live ActivitySpec is always consistent.
class ActivitySpec {
public:
    ActivitySpec() = default;
    ActivitySpec(std::vector<KnowledgeComponent> kcs, std::vector<Question> questions,
                 std::vector<Student> roster);

    const std::vector<KnowledgeComponent>& kcs() const noexcept { return kcs_; }
    const std::vector<Question>& questions() const noexcept { return questions_; }
    const std::vector<Student>& roster() const noexcept { return roster_; }

    std::optional<std::size_t> kc_index(const std::string& id) const;
    std::optional<std::size_t> question_index(const std::string& id) const;
    std::optional<std::size_t> student_index(const std::string& id) const;

    /// KC position of the question at `question_pos`.
    std::size_t question_kc(std::size_t question_pos) const { return question_kc_[question_pos]; }

    const std::string& display_name(const std::string& student_id) const;

private:
    std::vector<KnowledgeComponent> kcs_;
    std::vector<Question> questions_;
    std::vector<Student> roster_;
    std::vector<std::size_t> question_kc_;
    std::unordered_map<std::string, std::size_t> kc_by_id_;
    std::unordered_map<std::string, std::size_t> question_by_id_;
    std::unordered_map<std::string, std::size_t> student_by_id_;
};

enum class EventKind { Response, Hint };

/// One student action. Response events carry `correct`, hint events carry
/// `hint_ordinal`; never both.
struct ActivityEvent {
    std::uint64_t seq = 0;
    std::int64_t timestamp_ms = 0;
    std::string student_id;
    std::string question_id;
    EventKind kind = EventKind::Response;
    std::optional<bool> correct;
    std::optional<int> hint_ordinal;

    static ActivityEvent response(std::string student, std::string question, bool is_correct,
                                  std::int64_t timestamp_ms = 0);
    static ActivityEvent hint(std::string student, std::string question, int ordinal,
                              std::int64_t timestamp_ms = 0);
};

/// Throws ValidationError if the event is malformed or references unknown ids.
void validate_event(const ActivityEvent& event, const ActivitySpec& spec);

using EventLog = std::span<const ActivityEvent>;

struct StudentFeatureVector {
    std::string student_id;
    std::map<std::string, int> incorrect_per_kc;
    std::map<std::string, int> hints_per_kc;
};

enum class FeatureKind { Numeric, Categorical };
enum class FeatureFamily { Incorrect, Hints, Other };

/// n students x p features, row-major.
struct FeatureMatrix {
    std::vector<std::string> students;
    std::vector<std::string> feature_names;
    std::vector<FeatureKind> feature_kinds;
    std::vector<FeatureFamily> feature_families;
    /// KC id per column; empty for columns that are not per-KC counts.
    std::vector<std::string> feature_kcs;
    std::vector<double> values;

    std::size_t rows() const noexcept { return students.size(); }
    std::size_t cols() const noexcept { return feature_names.size(); }
    double at(std::size_t row, std::size_t col) const { return values[row * cols() + col]; }
    double& at(std::size_t row, std::size_t col) { return values[row * cols() + col]; }

    /// Builds an all-numeric matrix from rows of equal length. Column names
    /// default to "f0", "f1", ...
    static FeatureMatrix numeric(const std::vector<std::vector<double>>& rows);
};

enum class InclusionPolicy { ActiveOnly, FullRoster };

/// Per-student counts in roster order (every roster student, every KC present).
std::vector<StudentFeatureVector> feature_vectors(EventLog log, const ActivitySpec& spec);

/// Incorrect-response and hint counts per KC, one row per included student.
/// Columns are (incorrect, hints) for each KC in declaration order.
FeatureMatrix extract_features(EventLog log, const ActivitySpec& spec,
                               InclusionPolicy policy = InclusionPolicy::ActiveOnly);

enum class QuestionStatus { Unattempted, AnsweredCorrect, AnsweredIncorrect };

struct QuestionProgress {
    std::string question_id;
    QuestionStatus status = QuestionStatus::Unattempted;
    int hints = 0;
};

struct StudentProgress {
    std::string student_id;
    /// One entry per question, in activity order.
    std::vector<QuestionProgress> questions;
    /// Question positions in the order their first response arrived.
    std::vector<std::size_t> first_response_order;
    /// Event count attributed to this student.
    std::size_t events = 0;

    std::size_t answered() const;
    std::size_t answered_correct() const;
    int total_hints() const;
};

/// Status is fixed by the first response to each question; hints count all
/// hint events.
StudentProgress student_progress(EventLog log, const ActivitySpec& spec,
                                 const std::string& student_id);

/// student_progress for every roster student, in roster order, in one pass.
std::vector<StudentProgress> progress_matrix(EventLog log, const ActivitySpec& spec);

const char* to_string(EventKind kind);
const char* to_string(QuestionStatus status);

}  // namespace classpulse
