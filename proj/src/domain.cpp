#include "classpulse/domain.hpp"

#include "classpulse/error.hpp"

#include <algorithm>
#include <utility>

namespace classpulse {

namespace {

template <typename T>
std::unordered_map<std::string, std::size_t> index_ids(const std::vector<T>& items,
                                                       const char* what) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (!index.emplace(items[i].id, i).second) {
            throw ValidationError(std::string("duplicate ") + what + " id '" + items[i].id + "'");
        }
    }
    return index;
}

std::optional<std::size_t> find_in(const std::unordered_map<std::string, std::size_t>& index,
                                   const std::string& id) {
    auto it = index.find(id);
    if (it == index.end()) return std::nullopt;
    return it->second;
}

}  // namespace

ActivitySpec::ActivitySpec(std::vector<KnowledgeComponent> kcs, std::vector<Question> questions,
                           std::vector<Student> roster)
    : kcs_(std::move(kcs)), questions_(std::move(questions)), roster_(std::move(roster)) {
    for (const auto& kc : kcs_) {
        if (kc.name.empty()) throw ValidationError("knowledge component '" + kc.id + "' has no name");
    }
    kc_by_id_ = index_ids(kcs_, "knowledge component");
    question_by_id_ = index_ids(questions_, "question");
    student_by_id_ = index_ids(roster_, "student");

    question_kc_.reserve(questions_.size());
    for (const auto& q : questions_) {
        auto kc = find_in(kc_by_id_, q.kc_id);
        if (!kc) {
            throw ValidationError("question '" + q.id + "' references unknown knowledge component '" +
                                  q.kc_id + "'");
        }
        question_kc_.push_back(*kc);
    }
}

std::optional<std::size_t> ActivitySpec::kc_index(const std::string& id) const {
    return find_in(kc_by_id_, id);
}

std::optional<std::size_t> ActivitySpec::question_index(const std::string& id) const {
    return find_in(question_by_id_, id);
}

std::optional<std::size_t> ActivitySpec::student_index(const std::string& id) const {
    return find_in(student_by_id_, id);
}

const std::string& ActivitySpec::display_name(const std::string& student_id) const {
    auto idx = student_index(student_id);
    if (!idx) throw LookupError("unknown student '" + student_id + "'");
    return roster_[*idx].display_name;
}

ActivityEvent ActivityEvent::response(std::string student, std::string question, bool is_correct,
                                      std::int64_t timestamp_ms) {
    ActivityEvent e;
    e.timestamp_ms = timestamp_ms;
    e.student_id = std::move(student);
    e.question_id = std::move(question);
    e.kind = EventKind::Response;
    e.correct = is_correct;
    return e;
}

ActivityEvent ActivityEvent::hint(std::string student, std::string question, int ordinal,
                                  std::int64_t timestamp_ms) {
    ActivityEvent e;
    e.timestamp_ms = timestamp_ms;
    e.student_id = std::move(student);
    e.question_id = std::move(question);
    e.kind = EventKind::Hint;
    e.hint_ordinal = ordinal;
    return e;
}

void validate_event(const ActivityEvent& event, const ActivitySpec& spec) {
    if (!spec.student_index(event.student_id)) {
        throw ValidationError("unknown student '" + event.student_id + "'");
    }
    if (!spec.question_index(event.question_id)) {
        throw ValidationError("unknown question '" + event.question_id + "'");
    }
    if (event.kind == EventKind::Response) {
        if (!event.correct || event.hint_ordinal) {
            throw ValidationError("response event must carry correctness and no hint ordinal");
        }
    } else {
        if (!event.hint_ordinal || event.correct) {
            throw ValidationError("hint event must carry a hint ordinal and no correctness");
        }
        if (*event.hint_ordinal < 1) throw ValidationError("hint ordinal must be positive");
    }
    if (event.timestamp_ms < 0) throw ValidationError("timestamp must be non-negative");
}

FeatureMatrix FeatureMatrix::numeric(const std::vector<std::vector<double>>& rows) {
    FeatureMatrix fm;
    const std::size_t p = rows.empty() ? 0 : rows.front().size();
    for (std::size_t j = 0; j < p; ++j) {
        fm.feature_names.push_back("f" + std::to_string(j));
        fm.feature_kinds.push_back(FeatureKind::Numeric);
        fm.feature_families.push_back(FeatureFamily::Other);
        fm.feature_kcs.emplace_back();
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != p) throw StructuralError("ragged feature rows");
        fm.students.push_back("s" + std::to_string(i));
        fm.values.insert(fm.values.end(), rows[i].begin(), rows[i].end());
    }
    return fm;
}

std::vector<StudentFeatureVector> feature_vectors(EventLog log, const ActivitySpec& spec) {
    std::vector<StudentFeatureVector> out;
    out.reserve(spec.roster().size());
    for (const auto& s : spec.roster()) {
        StudentFeatureVector v;
        v.student_id = s.id;
        for (const auto& kc : spec.kcs()) {
            v.incorrect_per_kc[kc.id] = 0;
            v.hints_per_kc[kc.id] = 0;
        }
        out.push_back(std::move(v));
    }
    for (const auto& e : log) {
        auto si = spec.student_index(e.student_id);
        auto qi = spec.question_index(e.question_id);
        if (!si || !qi) throw ValidationError("event references unknown ids");
        const auto& kc = spec.kcs()[spec.question_kc(*qi)].id;
        if (e.kind == EventKind::Hint) {
            ++out[*si].hints_per_kc[kc];
        } else if (!e.correct.value_or(false)) {
            ++out[*si].incorrect_per_kc[kc];
        }
    }
    return out;
}

FeatureMatrix extract_features(EventLog log, const ActivitySpec& spec, InclusionPolicy policy) {
    if (spec.roster().empty()) throw StructuralError("activity roster is empty");

    const std::size_t num_kcs = spec.kcs().size();
    const std::size_t p = 2 * num_kcs;

    // Per-student counts indexed by roster position, columns (incorrect, hints) per KC.
    std::vector<std::vector<double>> counts(spec.roster().size(), std::vector<double>(p, 0.0));
    std::vector<std::size_t> first_event_order;
    std::vector<bool> active(spec.roster().size(), false);

    for (const auto& e : log) {
        auto si = spec.student_index(e.student_id);
        auto qi = spec.question_index(e.question_id);
        if (!si || !qi) throw ValidationError("event references unknown ids");
        if (!active[*si]) {
            active[*si] = true;
            first_event_order.push_back(*si);
        }
        const std::size_t kc = spec.question_kc(*qi);
        if (e.kind == EventKind::Hint) {
            counts[*si][2 * kc + 1] += 1.0;
        } else if (!e.correct.value_or(false)) {
            counts[*si][2 * kc] += 1.0;
        }
    }

    FeatureMatrix fm;
    for (const auto& kc : spec.kcs()) {
        fm.feature_names.push_back("incorrect:" + kc.name);
        fm.feature_kinds.push_back(FeatureKind::Numeric);
        fm.feature_families.push_back(FeatureFamily::Incorrect);
        fm.feature_kcs.push_back(kc.id);
        fm.feature_names.push_back("hints:" + kc.name);
        fm.feature_kinds.push_back(FeatureKind::Numeric);
        fm.feature_families.push_back(FeatureFamily::Hints);
        fm.feature_kcs.push_back(kc.id);
    }

    std::vector<std::size_t> rows;
    if (policy == InclusionPolicy::FullRoster) {
        rows.resize(spec.roster().size());
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    } else {
        rows = first_event_order;
    }
    fm.values.reserve(rows.size() * p);
    for (auto r : rows) {
        fm.students.push_back(spec.roster()[r].id);
        fm.values.insert(fm.values.end(), counts[r].begin(), counts[r].end());
    }
    return fm;
}

std::size_t StudentProgress::answered() const {
    return static_cast<std::size_t>(std::count_if(questions.begin(), questions.end(), [](const auto& q) {
        return q.status != QuestionStatus::Unattempted;
    }));
}

std::size_t StudentProgress::answered_correct() const {
    return static_cast<std::size_t>(std::count_if(questions.begin(), questions.end(), [](const auto& q) {
        return q.status == QuestionStatus::AnsweredCorrect;
    }));
}

int StudentProgress::total_hints() const {
    int total = 0;
    for (const auto& q : questions) total += q.hints;
    return total;
}

namespace {

StudentProgress empty_progress(const ActivitySpec& spec, const std::string& student_id) {
    StudentProgress p;
    p.student_id = student_id;
    p.questions.reserve(spec.questions().size());
    for (const auto& q : spec.questions()) p.questions.push_back({q.id, QuestionStatus::Unattempted, 0});
    return p;
}

void apply_event(StudentProgress& p, std::size_t question_pos, const ActivityEvent& e) {
    auto& q = p.questions[question_pos];
    ++p.events;
    if (e.kind == EventKind::Hint) {
        ++q.hints;
        return;
    }
    if (q.status == QuestionStatus::Unattempted) {
        q.status = e.correct.value_or(false) ? QuestionStatus::AnsweredCorrect
                                             : QuestionStatus::AnsweredIncorrect;
        p.first_response_order.push_back(question_pos);
    }
}

}  // namespace

StudentProgress student_progress(EventLog log, const ActivitySpec& spec, const std::string& student_id) {
    if (!spec.student_index(student_id)) throw LookupError("unknown student '" + student_id + "'");
    auto p = empty_progress(spec, student_id);
    for (const auto& e : log) {
        if (e.student_id != student_id) continue;
        auto qi = spec.question_index(e.question_id);
        if (!qi) throw ValidationError("unknown question '" + e.question_id + "'");
        apply_event(p, *qi, e);
    }
    return p;
}

std::vector<StudentProgress> progress_matrix(EventLog log, const ActivitySpec& spec) {
    std::vector<StudentProgress> out;
    out.reserve(spec.roster().size());
    for (const auto& s : spec.roster()) out.push_back(empty_progress(spec, s.id));
    for (const auto& e : log) {
        auto si = spec.student_index(e.student_id);
        auto qi = spec.question_index(e.question_id);
        if (!si || !qi) throw ValidationError("event references unknown ids");
        apply_event(out[*si], *qi, e);
    }
    return out;
}

const char* to_string(EventKind kind) {
    return kind == EventKind::Response ? "response" : "hint";
}

const char* to_string(QuestionStatus status) {
    switch (status) {
        case QuestionStatus::Unattempted: return "unattempted";
        case QuestionStatus::AnsweredCorrect: return "correct";
        case QuestionStatus::AnsweredIncorrect: return "incorrect";
    }
    return "unknown";
}

}  // namespace classpulse
