#pragma once

#include "classpulse/config.hpp"
#include "classpulse/ingestion.hpp"
#include "classpulse/snapshot.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace classpulse {

/// Recompute throttle. The first event after an idle period fires at once;
/// further events within the interval are coalesced into one trailing fire
/// at last_fire + interval. Times are milliseconds on any monotone clock.
class Debouncer {
public:
    explicit Debouncer(std::int64_t interval_ms);

    void on_event(std::int64_t now_ms);
    /// When the pending recompute becomes due, if any.
    std::optional<std::int64_t> next_due() const;
    /// True when a recompute should run now; clears the pending state.
    bool poll(std::int64_t now_ms);
    bool pending() const noexcept { return pending_; }

private:
    std::int64_t interval_ms_;
    bool pending_ = false;
    std::int64_t pending_since_ = 0;
    std::optional<std::int64_t> last_fire_;
};

/// Push channel for one client: a bounded queue of published versions.
///
/// Overflowing the queue disconnects the subscription; the client resumes by
/// subscribing again with `last_seen()`.
class Subscription {
public:
    explicit Subscription(std::size_t capacity) : capacity_(capacity) {}

    /// Next version, waiting up to `timeout`. Empty on timeout or disconnect.
    std::optional<std::uint64_t> wait_next(std::chrono::milliseconds timeout);
    std::optional<std::uint64_t> try_next();

    bool disconnected() const;
    /// Highest version handed to the client so far (0 if none).
    std::uint64_t last_seen() const;
    void close();

private:
    friend class SnapshotPublisher;
    /// Returns false when the queue overflowed and the subscription dropped.
    bool offer(std::uint64_t version);

    const std::size_t capacity_;
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<std::uint64_t> queue_;
    std::uint64_t last_seen_ = 0;
    bool disconnected_ = false;
};

using SnapshotPtr = std::shared_ptr<const AnalyticsSnapshot>;

/// Holds the current snapshot and a ring of recent ones, and fans version
/// notifications out to subscribers. Readers only ever see whole, published
/// snapshots.
class SnapshotPublisher {
public:
    explicit SnapshotPublisher(std::size_t history = 50, std::size_t subscriber_buffer = 64);

    /// Throws ValidationError unless the version exceeds the last published one.
    void publish(SnapshotPtr snapshot);

    SnapshotPtr current() const;
    SnapshotPtr at_version(std::uint64_t version) const;
    std::uint64_t current_version() const;

    /// Queues the current version straight away when it is newer than
    /// `last_seen` (or when `last_seen` is empty and anything is published).
    std::shared_ptr<Subscription> subscribe(std::optional<std::uint64_t> last_seen = std::nullopt);
    std::size_t subscriber_count() const;

private:
    const std::size_t history_;
    const std::size_t subscriber_buffer_;
    mutable std::mutex mutex_;
    SnapshotPtr current_;
    std::deque<SnapshotPtr> ring_;
    std::vector<std::shared_ptr<Subscription>> subscribers_;
};

/// Clock-agnostic core of the live server: funnels events into the store,
/// asks the debouncer when to recompute, and publishes snapshots. Every call
/// takes the current time so tests can drive it from a simulated clock.
class Orchestrator {
public:
    Orchestrator(ActivitySpec spec, ServerConfig config);

    /// Throws ValidationError for events that do not match the activity.
    std::uint64_t ingest(ActivityEvent event, std::int64_t now_ms);

    /// Recomputes and publishes when the debouncer says so; returns the new
    /// snapshot version.
    std::optional<std::uint64_t> tick(std::int64_t now_ms);
    /// Recomputes unconditionally.
    std::uint64_t recompute_now(std::int64_t now_ms);

    std::optional<std::int64_t> next_due() const;
    bool recompute_pending() const;

    const EventStore& store() const noexcept { return store_; }
    SnapshotPublisher& publisher() noexcept { return publisher_; }
    const SnapshotPublisher& publisher() const noexcept { return publisher_; }
    const ServerConfig& config() const noexcept { return config_; }
    std::size_t recompute_count() const;

private:
    EventStore store_;
    ServerConfig config_;
    SnapshotPublisher publisher_;
    mutable std::mutex debounce_mutex_;
    Debouncer debouncer_;
    mutable std::mutex recompute_mutex_;
    std::uint64_t next_version_ = 1;
    std::size_t recomputes_ = 0;
};

/// Runs an Orchestrator against the steady clock with a background worker
/// that fires recomputes as they fall due.
class LiveEngine {
public:
    LiveEngine(ActivitySpec spec, ServerConfig config);
    ~LiveEngine();

    LiveEngine(const LiveEngine&) = delete;
    LiveEngine& operator=(const LiveEngine&) = delete;

    std::uint64_t ingest(ActivityEvent event);
    /// Milliseconds since the engine started.
    std::int64_t now_ms() const;
    /// Blocks until the published snapshot covers every ingested event or
    /// the timeout expires.
    bool wait_until_covered(std::chrono::milliseconds timeout);

    Orchestrator& orchestrator() noexcept { return core_; }
    void stop();

private:
    void run(std::stop_token stop);

    Orchestrator core_;
    const std::chrono::steady_clock::time_point start_;
    std::mutex wake_mutex_;
    std::condition_variable_any wake_;
    bool kicked_ = false;
    std::jthread worker_;
};

}  // namespace classpulse
