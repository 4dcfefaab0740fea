#pragma once

#include "classpulse/domain.hpp"
#include "classpulse/ingestion.hpp"
#include "classpulse/partition.hpp"
#include "classpulse/recommend.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace classpulse {

struct ReplayConfig {
    std::filesystem::path path;
    InputFormat format = InputFormat::Generic;
    double speed = 1.0;
    std::int64_t gap_ms = 1000;
};

/// Flat-cluster count: silhouette search over `range` when `fixed` is empty.
struct KPolicy {
    std::optional<std::size_t> fixed;
    KRange range;
};

struct ServerConfig {
    std::string host = "0.0.0.0";
    int port = 8080;
    std::optional<ReplayConfig> replay;
    /// Activity declared inline; used when there is no replay file.
    std::optional<ActivitySpec> activity;
    std::int64_t debounce_ms = 2000;
    KPolicy k;
    InclusionPolicy clustering_rows = InclusionPolicy::ActiveOnly;
    std::vector<AlertRule> alert_rules = default_alert_rules();
    RecommendationTemplates templates;
    int histogram_bin_width = 10;
    std::size_t history = 50;
    std::size_t subscriber_buffer = 64;
};

/// Throws ValidationError on out-of-range values.
void validate(const ServerConfig& config);

/// Reads the JSON configuration file. Unknown keys are ignored; missing keys
/// keep their defaults.
ServerConfig load_config(const std::filesystem::path& path);
ServerConfig config_from_json_text(const std::string& text);

/// Parses "auto" or a positive integer.
KPolicy parse_k_policy(const std::string& text, KRange range = {});

}  // namespace classpulse
