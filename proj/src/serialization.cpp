#include "classpulse/serialization.hpp"

#include "classpulse/error.hpp"

namespace classpulse {

namespace {

json optional_number(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

json optional_string(const std::optional<std::string>& v) {
    return v ? json(*v) : json(nullptr);
}

json kc_totals_to_json(const std::vector<KcTotals>& totals) {
    json out = json::array();
    for (const auto& t : totals) {
        out.push_back({{"kc_id", t.kc_id}, {"kc_name", t.kc_name}, {"incorrect", t.incorrect_total},
                       {"hints", t.hints_total}});
    }
    return out;
}

}  // namespace

json recommendations_to_json(std::span<const ClusterRecommendation> recs) {
    json out = json::array();
    for (const auto& r : recs) {
        out.push_back({{"cluster", r.cluster},
                       {"member_ids", r.member_ids},
                       {"member_names", r.member_names},
                       {"dominant_incorrect_kc", optional_string(r.dominant_incorrect_kc)},
                       {"dominant_hint_kc", optional_string(r.dominant_hint_kc)},
                       {"message", r.message}});
    }
    return out;
}

json dendrogram_node_to_json(const DendrogramNode& node) {
    if (node.is_leaf()) return {{"id", node.id}, {"label", node.label}};
    json children = json::array();
    for (const auto& c : node.children) children.push_back(dendrogram_node_to_json(c));
    return {{"id", node.id}, {"height", node.height}, {"size", node.size}, {"children", std::move(children)}};
}

json dendrogram_to_json(const Dendrogram& dendrogram, Linkage linkage, double ac) {
    json merges = json::array();
    for (const auto& m : dendrogram.trace.steps) merges.push_back(json::array({m.left, m.right, m.height, m.size}));
    return {{"n", dendrogram.trace.n},
            {"merges", std::move(merges)},
            {"tree", dendrogram_node_to_json(dendrogram.root)},
            {"linkage", to_string(linkage)},
            {"ac", ac}};
}

json kpis_to_json(const KpiSnapshot& k) {
    return {{"version", k.version},
            {"min_score", optional_number(k.min_score)},
            {"max_score", optional_number(k.max_score)},
            {"median_score", optional_number(k.median_score)},
            {"mean_score", optional_number(k.mean_score)},
            {"completed_count", k.completed_count},
            {"active_students", k.active_students},
            {"events_seen", k.events_seen}};
}

json alerts_to_json(std::span<const Alert> alerts) {
    json out = json::array();
    for (const auto& a : alerts) {
        out.push_back({{"rule_id", a.rule_id},
                       {"kind", to_string(a.kind)},
                       {"severity", to_string(a.severity)},
                       {"subject", {{"kind", to_string(a.subject.kind)}, {"id", a.subject.id}}},
                       {"message", a.message},
                       {"first_seen", a.first_seen},
                       {"last_seen", a.last_seen}});
    }
    return out;
}

json clustering_to_json(const AnalyticsSnapshot& s) {
    if (!s.clustering) {
        return {{"available", false}, {"reason", optional_string(s.clustering_absent_reason)}};
    }
    const auto& c = *s.clustering;
    json acs = json::object();
    for (const auto& m : c.models) acs[to_string(m.linkage)] = m.ac.value;
    const auto& selected = c.selected_model();

    json clusters = json::array();
    for (const auto& b : c.breakdowns) {
        clusters.push_back({{"cluster", b.cluster}, {"members", b.members}, {"per_kc", kc_totals_to_json(b.per_kc)}});
    }
    return {{"available", true},
            {"students", c.students},
            {"acs", std::move(acs)},
            {"selected_linkage", to_string(c.selected)},
            {"dendrogram", dendrogram_to_json(c.dendrogram, c.selected, selected.ac.value)},
            {"k", c.k},
            {"k_policy", c.k_fixed ? "fixed" : "auto"},
            {"silhouettes", c.silhouettes},
            {"assignment", c.assignment.member_of},
            {"clusters", std::move(clusters)},
            {"recommendations", recommendations_to_json(s.recommendations)}};
}

json snapshot_to_json(const AnalyticsSnapshot& s) {
    json progress = json::array();
    for (std::size_t i = 0; i < s.progress.size(); ++i) {
        const auto& p = s.progress[i];
        json questions = json::array();
        for (const auto& q : p.questions) {
            questions.push_back({{"question_id", q.question_id}, {"status", to_string(q.status)}, {"hints", q.hints}});
        }
        progress.push_back({{"student_id", p.student_id},
                            {"score", optional_number(i < s.scores.size() ? s.scores[i] : std::nullopt)},
                            {"answered", p.answered()},
                            {"completed", !p.questions.empty() && p.answered() == p.questions.size()},
                            {"hints", p.total_hints()},
                            {"questions", std::move(questions)}});
    }
    return {{"version", s.version},
            {"events_seen", s.events_seen},
            {"computed_at", s.computed_at_ms},
            {"degraded", s.degraded},
            {"error", optional_string(s.error)},
            {"kpis", kpis_to_json(s.kpis)},
            {"progress", std::move(progress)},
            {"histogram", {{"bin_width", s.histogram.bin_width}, {"bins", s.histogram.bins}}},
            {"kc_summary", kc_totals_to_json(s.kc_summary.per_kc)},
            {"clustering", clustering_to_json(s)},
            {"alerts", alerts_to_json(s.alerts)},
            {"recommendations", recommendations_to_json(s.recommendations)}};
}

json activity_to_json(const ActivitySpec& spec) {
    json kcs = json::array();
    for (const auto& kc : spec.kcs()) kcs.push_back({{"id", kc.id}, {"name", kc.name}});
    json questions = json::array();
    for (const auto& q : spec.questions()) questions.push_back({{"id", q.id}, {"kc", q.kc_id}});
    json roster = json::array();
    for (const auto& s : spec.roster()) roster.push_back({{"id", s.id}, {"name", s.display_name}});
    return {{"kcs", std::move(kcs)}, {"questions", std::move(questions)}, {"roster", std::move(roster)}};
}

ActivitySpec activity_from_json(const json& j) {
    try {
        std::vector<KnowledgeComponent> kcs;
        for (const auto& k : j.at("kcs")) {
            const auto id = k.at("id").get<std::string>();
            kcs.push_back({id, k.value("name", id)});
        }
        std::vector<Question> questions;
        for (const auto& q : j.at("questions")) questions.push_back({q.at("id").get<std::string>(), q.at("kc").get<std::string>()});
        std::vector<Student> roster;
        for (const auto& s : j.at("roster")) {
            const auto id = s.at("id").get<std::string>();
            roster.push_back({id, s.value("name", id)});
        }
        return ActivitySpec(std::move(kcs), std::move(questions), std::move(roster));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid activity: ") + e.what());
    }
}

ActivityEvent event_from_json(const json& j, const ActivitySpec& spec, std::int64_t default_timestamp_ms) {
    if (!j.is_object()) throw ValidationError("event must be a JSON object");
    try {
        const auto student = j.at("student_id").get<std::string>();
        const auto question = j.at("question_id").get<std::string>();
        const auto type = j.at("event_type").get<std::string>();
        const auto timestamp = j.value("timestamp_ms", default_timestamp_ms);

        if (j.contains("kc")) {
            auto qi = spec.question_index(question);
            const auto kc = j.at("kc").get<std::string>();
            if (qi) {
                const auto& declared = spec.kcs()[spec.question_kc(*qi)];
                if (kc != declared.id && kc != declared.name) {
                    throw ValidationError("question '" + question + "' is tagged '" + declared.name + "', not '" + kc + "'");
                }
            }
        }

        ActivityEvent e;
        if (type == "response") {
            const auto& c = j.at("correct");
            bool correct = false;
            if (c.is_boolean()) {
                correct = c.get<bool>();
            } else if (c.is_number_integer() && (c.get<int>() == 0 || c.get<int>() == 1)) {
                correct = c.get<int>() == 1;
            } else {
                throw ValidationError("correct must be 0, 1, true or false");
            }
            e = ActivityEvent::response(student, question, correct, timestamp);
        } else if (type == "hint") {
            e = ActivityEvent::hint(student, question, 1, timestamp);
            if (j.contains("hint_ordinal")) {
                e.hint_ordinal = j.at("hint_ordinal").get<int>();
            } else {
                e.hint_ordinal.reset();  // assigned at ingestion
            }
        } else {
            throw ValidationError("event_type must be 'response' or 'hint'");
        }
        return e;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid event: ") + e.what());
    }
}

}  // namespace classpulse
