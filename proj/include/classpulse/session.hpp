#pragma once

#include "classpulse/config.hpp"
#include "classpulse/ingestion.hpp"
#include "classpulse/realtime.hpp"

#include <future>
#include <memory>
#include <optional>
#include <thread>

namespace classpulse {

/// A running classroom session: the live engine plus, when configured, a
/// replay producer feeding it from a file.
class Session {
public:
    /// The activity comes from the replay file when one is configured,
    /// otherwise from the inline activity. Throws ValidationError when
    /// neither is present.
    explicit Session(ServerConfig config);
    ~Session();

    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    /// Starts the replay producer. No-op without a replay file.
    void start_replay();
    /// Blocks until the replay finishes; empty when no replay was started.
    std::optional<ReplayReport> wait_replay();

    LiveEngine& engine() noexcept { return *engine_; }
    const ServerConfig& config() const noexcept { return config_; }
    /// Events parsed from the replay file (empty without one).
    const std::vector<ActivityEvent>& replay_events() const noexcept { return replay_events_; }
    const std::vector<RowError>& replay_row_errors() const noexcept { return row_errors_; }

    void stop();

private:
    ServerConfig config_;
    std::vector<ActivityEvent> replay_events_;
    std::vector<RowError> row_errors_;
    std::unique_ptr<LiveEngine> engine_;
    std::jthread replay_thread_;
    std::optional<std::shared_future<ReplayReport>> replay_result_;
};

}  // namespace classpulse
