#pragma once

#include "classpulse/domain.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

namespace classpulse {

enum class InputFormat { Generic, Assistments };

const char* to_string(InputFormat format);
std::optional<InputFormat> parse_input_format(const std::string& name);

/// Header names bound to each role. `timestamp` is optional for the generic
/// format; rows keep file order when it is absent from the header.
struct ColumnMapping {
    InputFormat format = InputFormat::Generic;
    std::string student = "student_id";
    std::string question = "question_id";
    std::string kc = "kc";
    std::string event_type = "event_type";
    std::string correct = "correct";
    std::string hint_count = "hint_count";
    std::string ordering = "order_id";
    std::string timestamp = "timestamp_ms";

    static ColumnMapping generic();
    static ColumnMapping assistments();
    static ColumnMapping for_format(InputFormat format);
};

struct RowError {
    std::size_t line = 0;  // 1-based line in the file, header is line 1
    std::string message;
};

struct ParsedActivity {
    ActivitySpec spec;
    std::vector<ActivityEvent> events;
    std::vector<RowError> row_errors;
};

/// Nominal spacing of events that carry no timestamp of their own.
inline constexpr std::int64_t kSyntheticGapMs = 1000;

/// Reads a comma-delimited file with header. Generic rows map to one event
/// each; a skill-builder row expands to one response followed by hint_count
/// hint events with ordinals 1..hint_count. Rows are ordered by the ordering
/// key and the activity is synthesised from the ids in first-seen order.
///
/// Throws SchemaError for a missing mapped column. Bad rows are skipped and
/// reported in `row_errors`.
ParsedActivity parse_events(std::istream& in, const ColumnMapping& mapping);
ParsedActivity parse_events_file(const std::filesystem::path& path, const ColumnMapping& mapping);

struct ReplayPlan {
    std::vector<ActivityEvent> events;
    std::chrono::milliseconds inter_event_gap{1000};
    double speed = 1.0;

    /// Offset of event `index` from the start of the replay.
    std::chrono::nanoseconds offset(std::size_t index) const;
    std::chrono::nanoseconds nominal_duration() const;
};

/// Accepts an event; returning false rejects it and aborts the replay.
using EventSink = std::function<bool(const ActivityEvent&)>;

struct ReplayReport {
    std::size_t delivered = 0;
    bool aborted = false;
    bool cancelled = false;
    /// Plan index of the rejected event when aborted.
    std::optional<std::size_t> failed_at;
    double nominal_duration_ms = 0.0;
    double elapsed_ms = 0.0;
    double mean_drift_ms = 0.0;
    double max_drift_ms = 0.0;
};

/// Delivers event i at start + i * gap / speed, in plan order.
/// Throws ValidationError when speed <= 0 or the gap is negative.
ReplayReport replay(const ReplayPlan& plan, const EventSink& sink, std::stop_token stop = {});

/// Append-only event log; the single serialisation point for all producers.
///
/// Accepted events get the next seq (starting at 1). Timestamps are rebased so
/// the first accepted event sits at 0. A hint without an ordinal receives the
/// next ordinal for its (student, question) pair.
class EventStore {
public:
    explicit EventStore(ActivitySpec spec);

    const ActivitySpec& spec() const noexcept { return spec_; }

    /// Returns the assigned seq. Throws ValidationError and leaves the log
    /// untouched when the event does not validate.
    std::uint64_t ingest(ActivityEvent event);

    std::size_t size() const;
    /// Copy of the first `count` events (all of them when count exceeds size).
    std::vector<ActivityEvent> prefix(std::size_t count) const;
    std::vector<ActivityEvent> events() const;

private:
    ActivitySpec spec_;
    mutable std::mutex mutex_;
    std::vector<ActivityEvent> events_;
    std::optional<std::int64_t> epoch_;
    std::vector<int> hint_counts_;  // per (student, question) cell
};

}  // namespace classpulse
