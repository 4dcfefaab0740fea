#include "classpulse/config.hpp"

#include "classpulse/error.hpp"
#include "classpulse/serialization.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace classpulse {

void validate(const ServerConfig& c) {
    if (c.port < 0 || c.port > 65535) throw ValidationError("port must lie in [0, 65535]");
    if (c.debounce_ms < 0) throw ValidationError("debounce_ms must be non-negative");
    if (c.k.fixed && *c.k.fixed < 1) throw ValidationError("fixed k must be at least 1");
    if (c.k.range.min < 2 || c.k.range.max < c.k.range.min) throw ValidationError("k range must satisfy 2 <= min <= max");
    if (c.histogram_bin_width <= 0 || 100 % c.histogram_bin_width != 0) {
        throw ValidationError("histogram_bin_width must divide 100");
    }
    if (c.replay) {
        if (!(c.replay->speed > 0.0)) throw ValidationError("replay speed must be positive");
        if (c.replay->gap_ms < 0) throw ValidationError("replay gap must be non-negative");
    }
    for (const auto& rule : c.alert_rules) validate_rule(rule);
}

KPolicy parse_k_policy(const std::string& text, KRange range) {
    KPolicy policy;
    policy.range = range;
    if (text == "auto") return policy;
    std::size_t k = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
    if (ec != std::errc() || ptr != text.data() + text.size() || k < 1) {
        throw ValidationError("k must be 'auto' or a positive integer");
    }
    policy.fixed = k;
    return policy;
}

namespace {

void apply_rule_overrides(AlertRule& rule, const json& j) {
    rule.streak_length = j.value("streak_length", rule.streak_length);
    rule.hint_count = j.value("hint_count", rule.hint_count);
    rule.fraction = j.value("fraction", rule.fraction);
    rule.min_answers = j.value("min_answers", rule.min_answers);
    rule.percentage = j.value("percentage", rule.percentage);
    rule.min_scores = j.value("min_scores", rule.min_scores);
    rule.enabled = j.value("enabled", rule.enabled);
    rule.message_template = j.value("message", rule.message_template);
}

ServerConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
    ServerConfig c;
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    c.debounce_ms = j.value("debounce_ms", c.debounce_ms);
    c.histogram_bin_width = j.value("histogram_bin_width", c.histogram_bin_width);
    c.history = j.value("history", c.history);
    c.subscriber_buffer = j.value("subscriber_buffer", c.subscriber_buffer);

    if (j.contains("k_range")) {
        const auto& r = j.at("k_range");
        c.k.range = {r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>()};
    }
    if (j.contains("k")) {
        const auto& k = j.at("k");
        c.k = parse_k_policy(k.is_string() ? k.get<std::string>() : std::to_string(k.get<long long>()), c.k.range);
    }
    if (j.contains("clustering_rows")) {
        const auto rows = j.at("clustering_rows").get<std::string>();
        if (rows == "active_only") c.clustering_rows = InclusionPolicy::ActiveOnly;
        else if (rows == "full_roster") c.clustering_rows = InclusionPolicy::FullRoster;
        else throw ValidationError("clustering_rows must be 'active_only' or 'full_roster'");
    }
    if (j.contains("replay")) {
        const auto& r = j.at("replay");
        ReplayConfig rc;
        rc.path = r.at("path").get<std::string>();
        if (rc.path.is_relative()) rc.path = base_dir / rc.path;
        const auto format = r.value("format", std::string("generic"));
        auto parsed = parse_input_format(format);
        if (!parsed) throw ValidationError("unknown replay format '" + format + "'");
        rc.format = *parsed;
        rc.speed = r.value("speed", rc.speed);
        rc.gap_ms = r.value("gap_ms", rc.gap_ms);
        c.replay = rc;
    }
    if (j.contains("activity")) c.activity = activity_from_json(j.at("activity"));

    if (j.contains("alerts")) {
        for (const auto& [id, body] : j.at("alerts").items()) {
            auto it = std::find_if(c.alert_rules.begin(), c.alert_rules.end(),
                                   [&](const AlertRule& r) { return r.id == id; });
            if (it == c.alert_rules.end()) {
                AlertRule rule;
                rule.id = id;
                const auto kind_name = body.at("kind").get<std::string>();
                auto kind = parse_alert_kind(kind_name);
                if (!kind) throw ValidationError("unknown alert kind '" + kind_name + "'");
                rule.kind = *kind;
                apply_rule_overrides(rule, body);
                c.alert_rules.push_back(std::move(rule));
            } else {
                apply_rule_overrides(*it, body);
            }
        }
    }
    if (j.contains("templates")) {
        const auto& t = j.at("templates");
        c.templates.full = t.value("full", c.templates.full);
        c.templates.incorrect_only = t.value("incorrect_only", c.templates.incorrect_only);
        c.templates.hints_only = t.value("hints_only", c.templates.hints_only);
        c.templates.no_difficulty = t.value("no_difficulty", c.templates.no_difficulty);
    }
    validate(c);
    return c;
}

ServerConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
    try {
        return config_from_json(json::parse(text), base_dir);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid configuration: ") + e.what());
    }
}

}  // namespace

ServerConfig config_from_json_text(const std::string& text) {
    return parse_config_text(text, std::filesystem::current_path());
}

ServerConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open configuration '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path.parent_path());
}

}  // namespace classpulse
