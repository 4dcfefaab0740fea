#include "classpulse/config.hpp"
#include "classpulse/error.hpp"
#include "classpulse/http_api.hpp"
#include "classpulse/ingestion.hpp"
#include "classpulse/serialization.hpp"
#include "classpulse/session.hpp"
#include "classpulse/snapshot.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <atomic>
#include <csignal>
#include <iostream>

namespace {

std::atomic<classpulse::ApiServer*> g_server{nullptr};

void handle_signal(int) {
    if (auto* s = g_server.load()) s->stop();
}

struct ServeOptions {
    int port = -1;
    std::string host;
    std::string config;
    std::string replay;
    std::string format = "generic";
    double speed = 1.0;
    std::string k;
    long long debounce_ms = -1;
};

classpulse::ServerConfig build_config(const ServeOptions& o) {
    using namespace classpulse;
    ServerConfig c = o.config.empty() ? ServerConfig{} : load_config(o.config);
    if (o.port >= 0) c.port = o.port;
    if (!o.host.empty()) c.host = o.host;
    if (!o.replay.empty()) {
        ReplayConfig r = c.replay.value_or(ReplayConfig{});
        r.path = o.replay;
        auto format = parse_input_format(o.format);
        if (!format) throw ValidationError("unknown format '" + o.format + "'");
        r.format = *format;
        r.speed = o.speed;
        c.replay = r;
    }
    if (!o.k.empty()) c.k = parse_k_policy(o.k, c.k.range);
    if (o.debounce_ms >= 0) c.debounce_ms = o.debounce_ms;
    validate(c);
    return c;
}

int run_serve(const ServeOptions& o) {
    using namespace classpulse;
    Session session(build_config(o));
    ApiServer api(session.engine());
    const int port = api.bind(session.config().host, session.config().port);
    if (port < 0) {
        spdlog::error("cannot bind {}:{}", session.config().host, session.config().port);
        return 1;
    }
    g_server = &api;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    spdlog::info("serving on http://{}:{}", session.config().host, port);
    session.start_replay();
    api.listen();
    g_server = nullptr;
    session.stop();
    return 0;
}

int run_analyze(const std::string& file, const std::string& format_name, const std::string& k, bool pretty) {
    using namespace classpulse;
    auto format = parse_input_format(format_name);
    if (!format) throw ValidationError("unknown format '" + format_name + "'");
    auto parsed = parse_events_file(file, ColumnMapping::for_format(*format));
    ServerConfig config;
    if (!k.empty()) config.k = parse_k_policy(k);
    const auto snapshot = recompute(parsed.events, parsed.spec, config, 1, 0);
    std::cout << snapshot_to_json(snapshot).dump(pretty ? 2 : -1) << '\n';
    return parsed.row_errors.empty() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Live classroom analytics engine"};
    app.require_subcommand(1);

    ServeOptions serve;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP/SSE server");
    serve_cmd->add_option("--port", serve.port, "Listen port (overrides config)");
    serve_cmd->add_option("--host", serve.host, "Listen address (overrides config)");
    serve_cmd->add_option("--config", serve.config, "JSON configuration file")->check(CLI::ExistingFile);
    serve_cmd->add_option("--replay", serve.replay, "Activity file to replay")->check(CLI::ExistingFile);
    serve_cmd->add_option("--format", serve.format, "Replay file format")
        ->check(CLI::IsMember({"generic", "assistments"}));
    serve_cmd->add_option("--speed", serve.speed, "Replay speed multiplier")->check(CLI::PositiveNumber);
    serve_cmd->add_option("--k", serve.k, "Flat cluster count: auto or N");
    serve_cmd->add_option("--debounce-ms", serve.debounce_ms, "Recompute debounce interval")
        ->check(CLI::NonNegativeNumber);

    std::string file;
    std::string format = "generic";
    std::string k;
    bool pretty = false;
    auto* analyze_cmd = app.add_subcommand("analyze", "Compute the final snapshot for an activity file and print it");
    analyze_cmd->add_option("file", file, "Activity file")->required()->check(CLI::ExistingFile);
    analyze_cmd->add_option("--format", format, "File format")->check(CLI::IsMember({"generic", "assistments"}));
    analyze_cmd->add_option("--k", k, "Flat cluster count: auto or N");
    analyze_cmd->add_flag("--pretty", pretty, "Indent the JSON output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve_cmd) return run_serve(serve);
        if (*analyze_cmd) return run_analyze(file, format, k, pretty);
    } catch (const classpulse::Error& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
