#include "classpulse/session.hpp"

#include "classpulse/error.hpp"

#include <spdlog/spdlog.h>

namespace classpulse {

namespace {

ActivitySpec resolve_activity(const ServerConfig& config, std::vector<ActivityEvent>& events,
                              std::vector<RowError>& errors) {
    if (config.replay) {
        auto parsed = parse_events_file(config.replay->path, ColumnMapping::for_format(config.replay->format));
        spdlog::info("loaded {} events for {} students from {} ({} rows skipped)", parsed.events.size(),
                     parsed.spec.roster().size(), config.replay->path.string(), parsed.row_errors.size());
        events = std::move(parsed.events);
        errors = std::move(parsed.row_errors);
        return std::move(parsed.spec);
    }
    if (config.activity) return *config.activity;
    throw ValidationError("configuration needs either a replay file or an inline activity");
}

}  // namespace

Session::Session(ServerConfig config) : config_(std::move(config)) {
    validate(config_);
    auto spec = resolve_activity(config_, replay_events_, row_errors_);
    engine_ = std::make_unique<LiveEngine>(std::move(spec), config_);
}

Session::~Session() {
    stop();
}

void Session::start_replay() {
    if (!config_.replay || replay_result_) return;
    ReplayPlan plan;
    plan.events = replay_events_;
    plan.inter_event_gap = std::chrono::milliseconds(config_.replay->gap_ms);
    plan.speed = config_.replay->speed;

    std::promise<ReplayReport> promise;
    replay_result_ = promise.get_future().share();
    replay_thread_ = std::jthread([this, plan = std::move(plan), promise = std::move(promise)](
                                      std::stop_token stop) mutable {
        try {
            auto report = replay(
                plan,
                [this](const ActivityEvent& e) {
                    try {
                        engine_->ingest(e);
                        return true;
                    } catch (const ValidationError& err) {
                        spdlog::error("replay event rejected: {}", err.what());
                        return false;
                    }
                },
                stop);
            spdlog::info("replay finished: {} events delivered in {:.0f} ms (max drift {:.1f} ms)", report.delivered,
                         report.elapsed_ms, report.max_drift_ms);
            promise.set_value(report);
        } catch (...) {
            promise.set_exception(std::current_exception());
        }
    });
}

std::optional<ReplayReport> Session::wait_replay() {
    if (!replay_result_) return std::nullopt;
    return replay_result_->get();
}

void Session::stop() {
    if (replay_thread_.joinable()) {
        replay_thread_.request_stop();
        replay_thread_.join();
    }
    if (engine_) engine_->stop();
}

}  // namespace classpulse
