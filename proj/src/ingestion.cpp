#include "classpulse/ingestion.hpp"

#include "classpulse/error.hpp"

#include <boost/tokenizer.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <thread>
#include <unordered_map>

namespace classpulse {

const char* to_string(InputFormat format) {
    return format == InputFormat::Assistments ? "assistments" : "generic";
}

std::optional<InputFormat> parse_input_format(const std::string& name) {
    if (name == "generic") return InputFormat::Generic;
    if (name == "assistments") return InputFormat::Assistments;
    return std::nullopt;
}

ColumnMapping ColumnMapping::generic() {
    return ColumnMapping{};
}

ColumnMapping ColumnMapping::assistments() {
    ColumnMapping m;
    m.format = InputFormat::Assistments;
    m.student = "user_id";
    m.question = "problem_id";
    m.kc = "skill_name";
    m.correct = "correct";
    m.hint_count = "hint_count";
    m.ordering = "order_id";
    return m;
}

ColumnMapping ColumnMapping::for_format(InputFormat format) {
    return format == InputFormat::Assistments ? assistments() : generic();
}

namespace {

using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    Tokenizer tok(line, boost::escaped_list_separator<char>('\\', ',', '"'));
    for (const auto& f : tok) fields.push_back(trim(f));
    return fields;
}

template <typename T>
std::optional<T> parse_number(const std::string& s) {
    T value{};
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return value;
}

std::optional<bool> parse_flag(const std::string& s) {
    if (s == "1" || s == "true" || s == "TRUE" || s == "True") return true;
    if (s == "0" || s == "false" || s == "FALSE" || s == "False") return false;
    return std::nullopt;
}

struct Record {
    std::size_t line = 0;
    std::int64_t order = 0;
    std::optional<std::int64_t> timestamp;
    std::string student;
    std::string question;
    std::string kc;
    EventKind kind = EventKind::Response;
    bool correct = false;
    int hints = 0;
};

class RowFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Columns {
    std::size_t student = 0, question = 0, kc = 0, correct = 0;
    std::size_t event_type = 0, hint_count = 0, ordering = 0;
    std::optional<std::size_t> timestamp;
};

Columns bind_columns(const std::vector<std::string>& header, const ColumnMapping& m) {
    auto find = [&](const std::string& name) -> std::optional<std::size_t> {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    };
    auto require = [&](const std::string& name) {
        auto idx = find(name);
        if (!idx) throw SchemaError(name);
        return *idx;
    };
    Columns c;
    c.student = require(m.student);
    c.question = require(m.question);
    c.kc = require(m.kc);
    c.correct = require(m.correct);
    if (m.format == InputFormat::Generic) {
        c.event_type = require(m.event_type);
        c.timestamp = find(m.timestamp);
    } else {
        c.hint_count = require(m.hint_count);
        c.ordering = require(m.ordering);
    }
    return c;
}

Record parse_row(const std::vector<std::string>& f, const Columns& c, const ColumnMapping& m,
                 std::size_t line, std::size_t row_index) {
    Record r;
    r.line = line;
    r.student = f[c.student];
    r.question = f[c.question];
    r.kc = f[c.kc];
    if (r.student.empty() || r.question.empty() || r.kc.empty()) {
        throw RowFailure("empty student, question or knowledge component");
    }
    if (m.format == InputFormat::Generic) {
        const auto& type = f[c.event_type];
        if (type == "response") {
            auto flag = parse_flag(f[c.correct]);
            if (!flag) throw RowFailure("unparseable correct value '" + f[c.correct] + "'");
            r.kind = EventKind::Response;
            r.correct = *flag;
        } else if (type == "hint") {
            r.kind = EventKind::Hint;
        } else {
            throw RowFailure("unknown event_type '" + type + "'");
        }
        if (c.timestamp) {
            auto ts = parse_number<std::int64_t>(f[*c.timestamp]);
            if (!ts || *ts < 0) throw RowFailure("unparseable timestamp '" + f[*c.timestamp] + "'");
            r.timestamp = *ts;
            r.order = *ts;
        } else {
            r.order = static_cast<std::int64_t>(row_index);
        }
    } else {
        auto correct = parse_number<double>(f[c.correct]);
        if (!correct) throw RowFailure("unparseable correct value '" + f[c.correct] + "'");
        auto hints = parse_number<int>(f[c.hint_count]);
        if (!hints || *hints < 0) throw RowFailure("unparseable hint_count '" + f[c.hint_count] + "'");
        auto order = parse_number<std::int64_t>(f[c.ordering]);
        if (!order) throw RowFailure("unparseable ordering key '" + f[c.ordering] + "'");
        r.kind = EventKind::Response;
        r.correct = *correct == 1.0;
        r.hints = *hints;
        r.order = *order;
    }
    return r;
}

}  // namespace

ParsedActivity parse_events(std::istream& in, const ColumnMapping& mapping) {
    ParsedActivity out;
    std::string line;
    if (!std::getline(in, line)) return out;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_line(line);
    const Columns cols = bind_columns(header, mapping);

    auto report = [&](std::size_t line_no, const std::string& message) {
        spdlog::warn("line {}: {} (row skipped)", line_no, message);
        out.row_errors.push_back({line_no, message});
    };

    std::vector<Record> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        try {
            const auto fields = split_line(line);
            if (fields.size() < header.size()) throw RowFailure("expected " + std::to_string(header.size()) +
                                                                " fields, found " + std::to_string(fields.size()));
            records.push_back(parse_row(fields, cols, mapping, line_no, records.size()));
        } catch (const RowFailure& e) {
            report(line_no, e.what());
        } catch (const boost::escaped_list_error& e) {
            report(line_no, std::string("malformed field: ") + e.what());
        }
    }

    std::stable_sort(records.begin(), records.end(),
                     [](const Record& a, const Record& b) { return a.order < b.order; });

    std::vector<KnowledgeComponent> kcs;
    std::vector<Question> questions;
    std::vector<Student> roster;
    std::unordered_map<std::string, std::string> kc_of_question;
    std::unordered_map<std::string, bool> seen_kc;
    std::unordered_map<std::string, bool> seen_student;
    std::unordered_map<std::string, int> hint_ordinals;  // student \x1f question

    const std::int64_t epoch = records.empty() || !records.front().timestamp ? 0 : *records.front().timestamp;
    for (const auto& r : records) {
        auto [it, inserted] = kc_of_question.emplace(r.question, r.kc);
        if (!inserted && it->second != r.kc) {
            report(r.line, "question '" + r.question + "' already tagged with '" + it->second + "'");
            continue;
        }
        if (inserted) questions.push_back({r.question, r.kc});
        if (seen_kc.emplace(r.kc, true).second) kcs.push_back({r.kc, r.kc});
        if (seen_student.emplace(r.student, true).second) roster.push_back({r.student, r.student});

        auto next_timestamp = [&] {
            if (r.timestamp) return *r.timestamp - epoch;
            return static_cast<std::int64_t>(out.events.size()) * kSyntheticGapMs;
        };
        const std::string cell = r.student + '\x1f' + r.question;
        if (r.kind == EventKind::Hint) {
            out.events.push_back(ActivityEvent::hint(r.student, r.question, ++hint_ordinals[cell], next_timestamp()));
        } else {
            out.events.push_back(ActivityEvent::response(r.student, r.question, r.correct, next_timestamp()));
            for (int h = 0; h < r.hints; ++h) {
                out.events.push_back(
                    ActivityEvent::hint(r.student, r.question, ++hint_ordinals[cell], next_timestamp()));
            }
        }
    }
    for (std::size_t i = 0; i < out.events.size(); ++i) out.events[i].seq = i + 1;
    out.spec = ActivitySpec(std::move(kcs), std::move(questions), std::move(roster));
    return out;
}

ParsedActivity parse_events_file(const std::filesystem::path& path, const ColumnMapping& mapping) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    return parse_events(in, mapping);
}

std::chrono::nanoseconds ReplayPlan::offset(std::size_t index) const {
    const double ns = static_cast<double>(index) *
                      static_cast<double>(std::chrono::nanoseconds(inter_event_gap).count()) / speed;
    return std::chrono::nanoseconds(static_cast<std::int64_t>(std::llround(ns)));
}

std::chrono::nanoseconds ReplayPlan::nominal_duration() const {
    return events.empty() ? std::chrono::nanoseconds(0) : offset(events.size() - 1);
}

ReplayReport replay(const ReplayPlan& plan, const EventSink& sink, std::stop_token stop) {
    if (!(plan.speed > 0.0) || !std::isfinite(plan.speed)) throw ValidationError("replay speed must be positive");
    if (plan.inter_event_gap.count() < 0) throw ValidationError("replay gap must be non-negative");

    using Clock = std::chrono::steady_clock;
    using FloatMs = std::chrono::duration<double, std::milli>;

    ReplayReport report;
    report.nominal_duration_ms = FloatMs(plan.nominal_duration()).count();
    const auto start = Clock::now();
    double drift_sum = 0.0;

    for (std::size_t i = 0; i < plan.events.size(); ++i) {
        const auto due = start + plan.offset(i);
        // Sleep in short slices so a stop request is honoured promptly.
        while (Clock::now() < due) {
            if (stop.stop_requested()) break;
            std::this_thread::sleep_until(std::min(due, Clock::now() + std::chrono::milliseconds(50)));
        }
        if (stop.stop_requested()) {
            report.cancelled = true;
            break;
        }
        const double drift = FloatMs(Clock::now() - due).count();
        drift_sum += drift;
        report.max_drift_ms = std::max(report.max_drift_ms, drift);
        if (!sink(plan.events[i])) {
            report.aborted = true;
            report.failed_at = i;
            spdlog::error("replay aborted: sink rejected event {} of {}", i, plan.events.size());
            break;
        }
        ++report.delivered;
    }
    report.elapsed_ms = FloatMs(Clock::now() - start).count();
    if (report.delivered > 0) report.mean_drift_ms = drift_sum / static_cast<double>(report.delivered);
    return report;
}

EventStore::EventStore(ActivitySpec spec) : spec_(std::move(spec)) {
    hint_counts_.assign(spec_.roster().size() * spec_.questions().size(), 0);
}

std::uint64_t EventStore::ingest(ActivityEvent event) {
    std::lock_guard lock(mutex_);
    auto si = spec_.student_index(event.student_id);
    auto qi = spec_.question_index(event.question_id);
    const std::size_t cell = si && qi ? *si * spec_.questions().size() + *qi : 0;
    if (si && qi && event.kind == EventKind::Hint && !event.hint_ordinal && !event.correct) {
        event.hint_ordinal = hint_counts_[cell] + 1;
    }
    validate_event(event, spec_);

    if (!epoch_) epoch_ = event.timestamp_ms;
    event.timestamp_ms = std::max<std::int64_t>(0, event.timestamp_ms - *epoch_);
    event.seq = events_.size() + 1;
    if (event.kind == EventKind::Hint) ++hint_counts_[cell];
    events_.push_back(std::move(event));
    return events_.back().seq;
}

std::size_t EventStore::size() const {
    std::lock_guard lock(mutex_);
    return events_.size();
}

std::vector<ActivityEvent> EventStore::prefix(std::size_t count) const {
    std::lock_guard lock(mutex_);
    const auto n = std::min(count, events_.size());
    return {events_.begin(), events_.begin() + static_cast<std::ptrdiff_t>(n)};
}

std::vector<ActivityEvent> EventStore::events() const {
    std::lock_guard lock(mutex_);
    return events_;
}

}  // namespace classpulse
