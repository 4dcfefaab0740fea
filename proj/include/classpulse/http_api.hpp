#pragma once

#include "classpulse/realtime.hpp"

#include <chrono>
#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace classpulse {

/// HTTP + server-sent-events front end over a LiveEngine.
///
///   POST /api/events              one generic-format event (202 / 422)
///   GET  /api/snapshot            latest snapshot
///   GET  /api/snapshot/{version}  snapshot from the retained history
///   GET  /api/clustering | /api/kpis | /api/alerts | /api/spec
///   GET  /api/stream              SSE, one `data: {"version": v}` per publish;
///                                 resume with ?last_version=v or Last-Event-ID
class ApiServer {
public:
    explicit ApiServer(LiveEngine& engine,
                       std::chrono::milliseconds keepalive = std::chrono::milliseconds(15000));
    ~ApiServer();

    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Binds to `port` (0 picks a free port) and returns the bound port, or -1.
    int bind(const std::string& host, int port);
    /// Serves until stop() is called.
    bool listen();
    void stop();
    bool running() const;

private:
    void install_routes();

    LiveEngine& engine_;
    std::chrono::milliseconds keepalive_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace classpulse
