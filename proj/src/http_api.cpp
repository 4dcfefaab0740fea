#include "classpulse/http_api.hpp"

#include "classpulse/error.hpp"
#include "classpulse/serialization.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <charconv>

namespace classpulse {

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, {{"error", message}}, status);
}

std::optional<std::uint64_t> parse_version(const std::string& text) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

}  // namespace

ApiServer::ApiServer(LiveEngine& engine, std::chrono::milliseconds keepalive)
    : engine_(engine), keepalive_(keepalive), server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

ApiServer::~ApiServer() {
    stop();
}

int ApiServer::bind(const std::string& host, int port) {
    if (port == 0) return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

bool ApiServer::listen() {
    return server_->listen_after_bind();
}

void ApiServer::stop() {
    if (server_ && server_->is_running()) server_->stop();
}

bool ApiServer::running() const {
    return server_->is_running();
}

void ApiServer::install_routes() {
    auto& svr = *server_;
    auto& core = engine_.orchestrator();

    svr.Post("/api/events", [this](const httplib::Request& req, httplib::Response& res) {
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::exception& e) {
            send_error(res, 400, std::string("malformed JSON: ") + e.what());
            return;
        }
        try {
            auto event = event_from_json(body, engine_.orchestrator().store().spec(), engine_.now_ms());
            const auto seq = engine_.ingest(std::move(event));
            send_json(res, {{"seq", seq}}, 202);
        } catch (const ValidationError& e) {
            send_error(res, 422, e.what());
        }
    });

    svr.Get("/api/snapshot", [&core](const httplib::Request&, httplib::Response& res) {
        auto snap = core.publisher().current();
        if (!snap) return send_error(res, 503, "no snapshot published yet");
        send_json(res, snapshot_to_json(*snap));
    });

    svr.Get(R"(/api/snapshot/(\d+))", [&core](const httplib::Request& req, httplib::Response& res) {
        auto version = parse_version(req.matches[1]);
        auto snap = version ? core.publisher().at_version(*version) : nullptr;
        if (!snap) return send_error(res, 404, "snapshot version not retained");
        send_json(res, snapshot_to_json(*snap));
    });

    auto sub_view = [&core](auto render) {
        return [&core, render](const httplib::Request&, httplib::Response& res) {
            auto snap = core.publisher().current();
            if (!snap) return send_error(res, 503, "no snapshot published yet");
            json body = render(*snap);
            body["version"] = snap->version;
            send_json(res, body);
        };
    };
    svr.Get("/api/clustering", sub_view([](const AnalyticsSnapshot& s) { return clustering_to_json(s); }));
    svr.Get("/api/kpis", sub_view([](const AnalyticsSnapshot& s) { return kpis_to_json(s.kpis); }));
    svr.Get("/api/alerts",
            sub_view([](const AnalyticsSnapshot& s) { return json{{"alerts", alerts_to_json(s.alerts)}}; }));

    svr.Get("/api/spec", [&core](const httplib::Request&, httplib::Response& res) {
        send_json(res, activity_to_json(core.store().spec()));
    });

    svr.Get("/api/stream", [this, &core](const httplib::Request& req, httplib::Response& res) {
        std::optional<std::uint64_t> last_seen;
        if (req.has_param("last_version")) {
            last_seen = parse_version(req.get_param_value("last_version"));
        } else if (req.has_header("Last-Event-ID")) {
            last_seen = parse_version(req.get_header_value("Last-Event-ID"));
        }
        auto sub = core.publisher().subscribe(last_seen);
        auto* server = server_.get();
        const auto keepalive = keepalive_;
        auto last_write = std::make_shared<std::chrono::steady_clock::time_point>(std::chrono::steady_clock::now());

        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider(
            "text/event-stream",
            [sub, server, keepalive, last_write](std::size_t, httplib::DataSink& sink) {
                if (!server->is_running()) return false;
                auto write = [&](const std::string& chunk) {
                    *last_write = std::chrono::steady_clock::now();
                    return sink.write(chunk.data(), chunk.size());
                };
                if (auto v = sub->wait_next(std::chrono::milliseconds(200))) {
                    return write("id: " + std::to_string(*v) + "\ndata: {\"version\": " + std::to_string(*v) + "}\n\n");
                }
                if (sub->disconnected()) {
                    // Buffer overflow: tell the client where to resume, then end the stream.
                    write("event: resync\ndata: {\"last_seen\": " + std::to_string(sub->last_seen()) + "}\n\n");
                    sink.done();
                    return true;
                }
                if (std::chrono::steady_clock::now() - *last_write >= keepalive) return write(": keepalive\n\n");
                return sink.is_writable();
            },
            [sub](bool) { sub->close(); });
    });

    svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            spdlog::error("request failed: {}", e.what());
            send_error(res, 500, e.what());
        } catch (...) {
            send_error(res, 500, "unknown error");
        }
    });
}

}  // namespace classpulse
