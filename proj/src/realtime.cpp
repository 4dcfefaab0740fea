#include "classpulse/realtime.hpp"

#include "classpulse/error.hpp"

#include <algorithm>

namespace classpulse {

Debouncer::Debouncer(std::int64_t interval_ms) : interval_ms_(interval_ms) {
    if (interval_ms < 0) throw ValidationError("debounce interval must be non-negative");
}

void Debouncer::on_event(std::int64_t now_ms) {
    if (!pending_) pending_since_ = now_ms;
    pending_ = true;
}

std::optional<std::int64_t> Debouncer::next_due() const {
    if (!pending_) return std::nullopt;
    if (!last_fire_) return pending_since_;
    return std::max(pending_since_, *last_fire_ + interval_ms_);
}

bool Debouncer::poll(std::int64_t now_ms) {
    auto due = next_due();
    if (!due || now_ms < *due) return false;
    pending_ = false;
    last_fire_ = now_ms;
    return true;
}

std::optional<std::uint64_t> Subscription::wait_next(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    cv_.wait_for(lock, timeout, [&] { return !queue_.empty() || disconnected_; });
    if (queue_.empty()) return std::nullopt;
    const auto v = queue_.front();
    queue_.pop_front();
    last_seen_ = v;
    return v;
}

std::optional<std::uint64_t> Subscription::try_next() {
    std::lock_guard lock(mutex_);
    if (queue_.empty()) return std::nullopt;
    const auto v = queue_.front();
    queue_.pop_front();
    last_seen_ = v;
    return v;
}

bool Subscription::disconnected() const {
    std::lock_guard lock(mutex_);
    return disconnected_;
}

std::uint64_t Subscription::last_seen() const {
    std::lock_guard lock(mutex_);
    return last_seen_;
}

void Subscription::close() {
    {
        std::lock_guard lock(mutex_);
        disconnected_ = true;
    }
    cv_.notify_all();
}

bool Subscription::offer(std::uint64_t version) {
    bool accepted = false;
    {
        std::lock_guard lock(mutex_);
        if (disconnected_) return false;
        if (queue_.size() >= capacity_) {
            disconnected_ = true;
        } else {
            queue_.push_back(version);
            accepted = true;
        }
    }
    cv_.notify_all();
    return accepted;
}

SnapshotPublisher::SnapshotPublisher(std::size_t history, std::size_t subscriber_buffer)
    : history_(std::max<std::size_t>(history, 1)), subscriber_buffer_(std::max<std::size_t>(subscriber_buffer, 1)) {}

void SnapshotPublisher::publish(SnapshotPtr snapshot) {
    if (!snapshot) throw ValidationError("cannot publish an empty snapshot");
    std::lock_guard lock(mutex_);
    if (current_ && snapshot->version <= current_->version) {
        throw ValidationError("snapshot version must increase");
    }
    current_ = snapshot;
    ring_.push_back(snapshot);
    while (ring_.size() > history_) ring_.pop_front();
    std::erase_if(subscribers_, [&](const auto& sub) { return !sub->offer(snapshot->version); });
}

SnapshotPtr SnapshotPublisher::current() const {
    std::lock_guard lock(mutex_);
    return current_;
}

SnapshotPtr SnapshotPublisher::at_version(std::uint64_t version) const {
    std::lock_guard lock(mutex_);
    auto it = std::find_if(ring_.begin(), ring_.end(), [&](const auto& s) { return s->version == version; });
    return it == ring_.end() ? nullptr : *it;
}

std::uint64_t SnapshotPublisher::current_version() const {
    std::lock_guard lock(mutex_);
    return current_ ? current_->version : 0;
}

std::shared_ptr<Subscription> SnapshotPublisher::subscribe(std::optional<std::uint64_t> last_seen) {
    auto sub = std::make_shared<Subscription>(subscriber_buffer_);
    std::lock_guard lock(mutex_);
    if (last_seen) sub->last_seen_ = *last_seen;
    if (current_ && (!last_seen || current_->version > *last_seen)) sub->offer(current_->version);
    subscribers_.push_back(sub);
    return sub;
}

std::size_t SnapshotPublisher::subscriber_count() const {
    std::lock_guard lock(mutex_);
    return subscribers_.size();
}

Orchestrator::Orchestrator(ActivitySpec spec, ServerConfig config)
    : store_(std::move(spec)),
      config_(std::move(config)),
      publisher_(config_.history, config_.subscriber_buffer),
      debouncer_(config_.debounce_ms) {
    validate(config_);
}

std::uint64_t Orchestrator::ingest(ActivityEvent event, std::int64_t now_ms) {
    const auto seq = store_.ingest(std::move(event));
    std::lock_guard lock(debounce_mutex_);
    debouncer_.on_event(now_ms);
    return seq;
}

std::optional<std::uint64_t> Orchestrator::tick(std::int64_t now_ms) {
    {
        std::lock_guard lock(debounce_mutex_);
        if (!debouncer_.poll(now_ms)) return std::nullopt;
    }
    return recompute_now(now_ms);
}

std::uint64_t Orchestrator::recompute_now(std::int64_t now_ms) {
    std::lock_guard lock(recompute_mutex_);
    const auto events = store_.events();
    const auto previous = publisher_.current();
    const auto version = next_version_++;
    auto snapshot = std::make_shared<const AnalyticsSnapshot>(
        recompute(events, store_.spec(), config_, version, now_ms, previous.get()));
    publisher_.publish(std::move(snapshot));
    ++recomputes_;
    return version;
}

std::optional<std::int64_t> Orchestrator::next_due() const {
    std::lock_guard lock(debounce_mutex_);
    return debouncer_.next_due();
}

bool Orchestrator::recompute_pending() const {
    std::lock_guard lock(debounce_mutex_);
    return debouncer_.pending();
}

std::size_t Orchestrator::recompute_count() const {
    std::lock_guard lock(recompute_mutex_);
    return recomputes_;
}

LiveEngine::LiveEngine(ActivitySpec spec, ServerConfig config)
    : core_(std::move(spec), std::move(config)), start_(std::chrono::steady_clock::now()) {
    core_.recompute_now(now_ms());
    worker_ = std::jthread([this](std::stop_token stop) { run(stop); });
}

LiveEngine::~LiveEngine() {
    stop();
}

void LiveEngine::stop() {
    if (worker_.joinable()) {
        worker_.request_stop();
        wake_.notify_all();
        worker_.join();
    }
}

std::int64_t LiveEngine::now_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_).count();
}

std::uint64_t LiveEngine::ingest(ActivityEvent event) {
    const auto seq = core_.ingest(std::move(event), now_ms());
    {
        std::lock_guard lock(wake_mutex_);
        kicked_ = true;
    }
    wake_.notify_all();
    return seq;
}

void LiveEngine::run(std::stop_token stop) {
    while (!stop.stop_requested()) {
        core_.tick(now_ms());
        std::unique_lock lock(wake_mutex_);
        if (auto due = core_.next_due()) {
            wake_.wait_until(lock, stop, start_ + std::chrono::milliseconds(*due), [&] { return kicked_; });
        } else {
            wake_.wait(lock, stop, [&] { return kicked_; });
        }
        kicked_ = false;
    }
}

bool LiveEngine::wait_until_covered(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (std::chrono::steady_clock::now() < deadline) {
        auto snap = core_.publisher().current();
        if (snap && snap->events_seen == core_.store().size() && !core_.recompute_pending()) return true;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    return false;
}

}  // namespace classpulse
