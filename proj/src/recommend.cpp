#include "classpulse/recommend.hpp"

#include "classpulse/analytics.hpp"
#include "classpulse/error.hpp"

#include <fmt/args.h>
#include <fmt/format.h>

#include <algorithm>
#include <map>

namespace classpulse {

const char* to_string(AlertKind kind) {
    switch (kind) {
        case AlertKind::WrongStreak: return "wrong_streak";
        case AlertKind::HintHeavy: return "hint_heavy";
        case AlertKind::ClassStruggle: return "class_struggle";
        case AlertKind::LowMedian: return "low_median";
    }
    return "unknown";
}

const char* to_string(Severity severity) {
    return severity == Severity::Warning ? "warning" : "info";
}

const char* to_string(SubjectKind kind) {
    switch (kind) {
        case SubjectKind::Student: return "student";
        case SubjectKind::Question: return "question";
        case SubjectKind::Class: return "class";
    }
    return "unknown";
}

std::optional<AlertKind> parse_alert_kind(const std::string& name) {
    for (auto k : {AlertKind::WrongStreak, AlertKind::HintHeavy, AlertKind::ClassStruggle, AlertKind::LowMedian}) {
        if (name == to_string(k)) return k;
    }
    return std::nullopt;
}

void validate_rule(const AlertRule& rule) {
    if (rule.id.empty()) throw ValidationError("alert rule needs an id");
    if (rule.streak_length <= 0 || rule.hint_count <= 0 || rule.min_answers <= 0 || rule.percentage <= 0.0 ||
        rule.min_scores <= 0) {
        throw ValidationError("alert rule '" + rule.id + "' has a non-positive threshold");
    }
    if (!(rule.fraction > 0.0 && rule.fraction <= 1.0)) {
        throw ValidationError("alert rule '" + rule.id + "' fraction must lie in (0, 1]");
    }
}

std::vector<AlertRule> default_alert_rules() {
    std::vector<AlertRule> rules(4);
    rules[0].id = "wrong_streak";
    rules[0].kind = AlertKind::WrongStreak;
    rules[1].id = "hint_heavy";
    rules[1].kind = AlertKind::HintHeavy;
    rules[2].id = "class_struggle";
    rules[2].kind = AlertKind::ClassStruggle;
    rules[3].id = "low_median";
    rules[3].kind = AlertKind::LowMedian;
    return rules;
}

namespace {

const char* default_template(AlertKind kind) {
    switch (kind) {
        case AlertKind::WrongStreak:
            return "{student} answered the last {streak} questions incorrectly on the first attempt.";
        case AlertKind::HintHeavy: return "{student} has used {hints} hints so far.";
        case AlertKind::ClassStruggle:
            return "{incorrect} of {answered} students answered question {question} ({kc}) incorrectly. "
                   "Consider reviewing {kc} with the class.";
        case AlertKind::LowMedian: return "The class median score is {median:.1f}% across {scored} students.";
    }
    return "";
}

Severity severity_of(AlertKind kind) {
    return kind == AlertKind::HintHeavy ? Severity::Info : Severity::Warning;
}

struct Detection {
    AlertSubject subject;
    std::string message;
};

std::string render(const AlertRule& rule, const fmt::dynamic_format_arg_store<fmt::format_context>& args) {
    const std::string tmpl = rule.message_template.empty() ? default_template(rule.kind) : rule.message_template;
    return fmt::vformat(tmpl, args);
}

std::vector<Detection> detect(const AlertRule& rule, const ActivitySpec& spec,
                              const std::vector<StudentProgress>& progress) {
    std::vector<Detection> out;
    switch (rule.kind) {
        case AlertKind::WrongStreak:
            for (const auto& p : progress) {
                const auto n = static_cast<std::size_t>(rule.streak_length);
                const auto& order = p.first_response_order;
                if (order.size() < n) continue;
                const bool all_wrong = std::all_of(order.end() - static_cast<std::ptrdiff_t>(n), order.end(),
                                                   [&](std::size_t q) {
                                                       return p.questions[q].status ==
                                                              QuestionStatus::AnsweredIncorrect;
                                                   });
                if (!all_wrong) continue;
                fmt::dynamic_format_arg_store<fmt::format_context> args;
                args.push_back(fmt::arg("student", spec.display_name(p.student_id)));
                args.push_back(fmt::arg("streak", rule.streak_length));
                out.push_back({{SubjectKind::Student, p.student_id}, render(rule, args)});
            }
            break;
        case AlertKind::HintHeavy:
            for (const auto& p : progress) {
                const int hints = p.total_hints();
                if (hints < rule.hint_count) continue;
                fmt::dynamic_format_arg_store<fmt::format_context> args;
                args.push_back(fmt::arg("student", spec.display_name(p.student_id)));
                args.push_back(fmt::arg("hints", hints));
                out.push_back({{SubjectKind::Student, p.student_id}, render(rule, args)});
            }
            break;
        case AlertKind::ClassStruggle:
            for (std::size_t q = 0; q < spec.questions().size(); ++q) {
                int answered = 0;
                int incorrect = 0;
                for (const auto& p : progress) {
                    const auto status = p.questions[q].status;
                    if (status == QuestionStatus::Unattempted) continue;
                    ++answered;
                    if (status == QuestionStatus::AnsweredIncorrect) ++incorrect;
                }
                if (answered < rule.min_answers || !(incorrect > rule.fraction * answered)) continue;
                const auto& question = spec.questions()[q];
                fmt::dynamic_format_arg_store<fmt::format_context> args;
                args.push_back(fmt::arg("question", question.id));
                args.push_back(fmt::arg("kc", spec.kcs()[spec.question_kc(q)].name));
                args.push_back(fmt::arg("incorrect", incorrect));
                args.push_back(fmt::arg("answered", answered));
                out.push_back({{SubjectKind::Question, question.id}, render(rule, args)});
            }
            break;
        case AlertKind::LowMedian: {
            std::vector<double> scores;
            for (const auto& p : progress) {
                if (auto s = student_score(p)) scores.push_back(*s);
            }
            if (scores.size() < static_cast<std::size_t>(rule.min_scores)) break;
            const double med = *median(scores);
            if (!(med < rule.percentage)) break;
            fmt::dynamic_format_arg_store<fmt::format_context> args;
            args.push_back(fmt::arg("median", med));
            args.push_back(fmt::arg("scored", scores.size()));
            out.push_back({{SubjectKind::Class, ""}, render(rule, args)});
            break;
        }
    }
    return out;
}

}  // namespace

std::vector<Alert> evaluate_alerts(EventLog log, const ActivitySpec& spec, std::span<const AlertRule> rules,
                                   std::span<const Alert> previous) {
    const auto progress = progress_matrix(log, spec);
    const auto high_water = static_cast<std::uint64_t>(log.size());

    std::vector<Alert> out;
    for (const auto& rule : rules) {
        if (!rule.enabled) continue;
        validate_rule(rule);
        for (auto& d : detect(rule, spec, progress)) {
            Alert a;
            a.rule_id = rule.id;
            a.kind = rule.kind;
            a.severity = severity_of(rule.kind);
            a.subject = std::move(d.subject);
            a.message = std::move(d.message);
            a.first_seen = high_water;
            a.last_seen = high_water;
            auto prev = std::find_if(previous.begin(), previous.end(), [&](const Alert& p) {
                return p.rule_id == a.rule_id && p.subject == a.subject;
            });
            if (prev != previous.end()) a.first_seen = prev->first_seen;
            out.push_back(std::move(a));
        }
    }
    return out;
}

namespace {

// Argmax over KC totals; ties resolved by ascending KC name.
std::optional<std::size_t> dominant(const std::vector<double>& totals, const ActivitySpec& spec) {
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < totals.size(); ++k) {
        if (totals[k] <= 0.0) continue;
        if (!best || totals[k] > totals[*best] ||
            (totals[k] == totals[*best] && spec.kcs()[k].name < spec.kcs()[*best].name)) {
            best = k;
        }
    }
    return best;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace

std::vector<ClusterRecommendation> describe_clusters(const ClusterAssignment& assignment,
                                                     const FeatureMatrix& fm, const ActivitySpec& spec,
                                                     const RecommendationTemplates& templates) {
    if (assignment.member_of.size() != fm.rows()) {
        throw StructuralError("cluster assignment does not align with feature rows");
    }
    const std::size_t num_kcs = spec.kcs().size();
    std::vector<std::vector<double>> incorrect(assignment.k, std::vector<double>(num_kcs, 0.0));
    std::vector<std::vector<double>> hints(assignment.k, std::vector<double>(num_kcs, 0.0));

    std::vector<ClusterRecommendation> out(assignment.k);
    for (std::size_t c = 0; c < assignment.k; ++c) out[c].cluster = c;

    for (std::size_t row = 0; row < fm.rows(); ++row) {
        const std::size_t c = assignment.member_of[row];
        if (c >= assignment.k) throw StructuralError("cluster index out of range");
        out[c].member_ids.push_back(fm.students[row]);
        out[c].member_names.push_back(spec.display_name(fm.students[row]));
        for (std::size_t col = 0; col < fm.cols(); ++col) {
            if (fm.feature_families[col] == FeatureFamily::Other) continue;
            auto kc = spec.kc_index(fm.feature_kcs[col]);
            if (!kc) throw StructuralError("feature column references unknown knowledge component");
            auto& target = fm.feature_families[col] == FeatureFamily::Incorrect ? incorrect : hints;
            target[c][*kc] += fm.at(row, col);
        }
    }

    for (std::size_t c = 0; c < assignment.k; ++c) {
        auto& rec = out[c];
        const auto kc_i = dominant(incorrect[c], spec);
        const auto kc_h = dominant(hints[c], spec);
        if (kc_i) rec.dominant_incorrect_kc = spec.kcs()[*kc_i].id;
        if (kc_h) rec.dominant_hint_kc = spec.kcs()[*kc_h].id;

        const std::string& tmpl = kc_i && kc_h ? templates.full
                                  : kc_i        ? templates.incorrect_only
                                  : kc_h        ? templates.hints_only
                                                : templates.no_difficulty;
        fmt::dynamic_format_arg_store<fmt::format_context> args;
        args.push_back(fmt::arg("g", c + 1));
        args.push_back(fmt::arg("members", join(rec.member_names, ", ")));
        args.push_back(fmt::arg("kc_i", kc_i ? spec.kcs()[*kc_i].name : std::string("none")));
        args.push_back(fmt::arg("kc_h", kc_h ? spec.kcs()[*kc_h].name : std::string("none")));
        rec.message = fmt::vformat(tmpl, args);
    }
    return out;
}

}  // namespace classpulse
