#include "classpulse/error.hpp"
#include "classpulse/ingestion.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace classpulse;

namespace {

const std::string kDemo = std::string(CLASSPULSE_DATA_DIR) + "/statistics_demo_assistments.csv";

ParsedActivity parse_text(const std::string& text, const ColumnMapping& m) {
    std::istringstream in(text);
    return parse_events(in, m);
}

ActivitySpec tiny_spec() {
    return ActivitySpec({{"mean", "Mean"}}, {{"q1", "mean"}, {"q2", "mean"}}, {{"s1", "Ana"}, {"s2", "Ben"}});
}

}  // namespace

TEST_CASE("header-only files") {
    auto g = parse_text("student_id,question_id,kc,event_type,correct\n", ColumnMapping::generic());
    CHECK(g.events.empty());
    CHECK(g.spec.roster().empty());
    CHECK(g.spec.kcs().empty());
    auto a = parse_text("order_id,user_id,problem_id,correct,skill_name,hint_count\n", ColumnMapping::assistments());
    CHECK(a.events.empty());
}

TEST_CASE("missing mapped column names the column") {
    try {
        parse_text("student_id,question_id,event_type,correct\n", ColumnMapping::generic());
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(e.column() == "kc");
    }
}

TEST_CASE("skill-builder row expansion") {
    auto p = parse_text("order_id,user_id,problem_id,correct,skill_name,hint_count\n"
                        "20,u1,p2,0,Mean,0\n"
                        "10,u1,p1,1,Mean,2\n",
                        ColumnMapping::assistments());
    REQUIRE(p.events.size() == 4);
    CHECK(p.events[0].kind == EventKind::Response);
    CHECK(p.events[0].question_id == "p1");
    CHECK(p.events[0].correct == true);
    CHECK(p.events[1].hint_ordinal == 1);
    CHECK(p.events[2].hint_ordinal == 2);
    CHECK(p.events[3].correct == false);
    for (std::size_t i = 0; i < p.events.size(); ++i) {
        CHECK(p.events[i].seq == i + 1);
        CHECK(p.events[i].timestamp_ms == static_cast<std::int64_t>(i) * kSyntheticGapMs);
    }
    CHECK(p.spec.kcs().size() == 1);
    CHECK(p.spec.questions().size() == 2);
}

TEST_CASE("generic rows and row errors") {
    auto p = parse_text("student_id,question_id,kc,event_type,correct,timestamp_ms\n"
                        "s1,q1,Mean,response,1,5000\n"
                        "s1,q1,Mean,hint,,4000\n"
                        "s2,q1,Mean,guess,1,4500\n"
                        "s2,q1,Mean,response,maybe,4600\n"
                        "s2,q1,Median,response,1,4700\n"
                        "s2,q2,Mean,hint,,6000\n",
                        ColumnMapping::generic());
    REQUIRE(p.events.size() == 3);
    CHECK(p.events[0].kind == EventKind::Hint);
    CHECK(p.events[0].timestamp_ms == 0);
    CHECK(p.events[1].timestamp_ms == 1000);
    CHECK(p.events[2].hint_ordinal == 1);
    REQUIRE(p.row_errors.size() == 3);
    CHECK(p.row_errors[0].line == 4);
    CHECK(p.row_errors[1].line == 5);
    CHECK(p.row_errors[2].line == 6);
}

TEST_CASE("demo fixture") {
    auto p = parse_events_file(kDemo, ColumnMapping::assistments());
    CHECK(p.row_errors.empty());
    CHECK(p.spec.roster().size() == 20);
    CHECK(p.spec.questions().size() == 10);
    CHECK(p.spec.kcs().size() == 5);
    for (const auto& q : p.spec.questions()) {
        auto n = std::count_if(p.spec.questions().begin(), p.spec.questions().end(),
                               [&](const Question& o) { return o.kc_id == q.kc_id; });
        CHECK(n == 2);
    }
    auto again = parse_events_file(kDemo, ColumnMapping::assistments());
    REQUIRE(again.events.size() == p.events.size());
    for (std::size_t i = 0; i < p.events.size(); ++i) {
        CHECK(again.events[i].student_id == p.events[i].student_id);
        CHECK(again.events[i].question_id == p.events[i].question_id);
        CHECK(again.events[i].kind == p.events[i].kind);
        CHECK(again.events[i].timestamp_ms == p.events[i].timestamp_ms);
    }
    CHECK_THROWS_AS(parse_events_file("/nonexistent.csv", ColumnMapping::generic()), Error);
}

TEST_CASE("replay schedule") {
    ReplayPlan plan;
    plan.events.resize(10);
    plan.speed = 10.0;
    CHECK(plan.nominal_duration() == std::chrono::milliseconds(900));
    CHECK(plan.offset(3) == std::chrono::milliseconds(300));

    plan.speed = 0.0;
    CHECK_THROWS_AS(replay(plan, [](const ActivityEvent&) { return true; }), ValidationError);
    plan.speed = -1.0;
    CHECK_THROWS_AS(replay(plan, [](const ActivityEvent&) { return true; }), ValidationError);
}

TEST_CASE("replay delivers every event in order") {
    auto parsed = parse_events_file(kDemo, ColumnMapping::assistments());
    ReplayPlan plan;
    plan.events.assign(parsed.events.begin(), parsed.events.begin() + 200);
    plan.inter_event_gap = std::chrono::milliseconds(0);
    std::vector<std::uint64_t> seen;
    auto report = replay(plan, [&](const ActivityEvent& e) {
        seen.push_back(e.seq);
        return true;
    });
    CHECK(report.delivered == 200);
    REQUIRE(seen.size() == 200);
    for (std::size_t i = 0; i < seen.size(); ++i) CHECK(seen[i] == i + 1);

    EventStore store(parsed.spec);
    for (const auto& e : plan.events) store.ingest(e);
    CHECK(store.size() == 200);
}

TEST_CASE("replay abort and cancel") {
    ReplayPlan plan;
    plan.events.resize(5, ActivityEvent::response("s", "q", true));
    plan.inter_event_gap = std::chrono::milliseconds(0);
    std::size_t calls = 0;
    auto report = replay(plan, [&](const ActivityEvent&) { return ++calls < 3; });
    CHECK(report.aborted);
    CHECK(report.failed_at == 2u);
    CHECK(report.delivered == 2);

    std::stop_source src;
    src.request_stop();
    auto cancelled = replay(plan, [](const ActivityEvent&) { return true; }, src.get_token());
    CHECK(cancelled.cancelled);
    CHECK(cancelled.delivered == 0);
}

TEST_CASE("replay pacing") {
    ReplayPlan plan;
    plan.events.resize(6, ActivityEvent::response("s", "q", true));
    plan.inter_event_gap = std::chrono::milliseconds(100);
    plan.speed = 5.0;
    auto report = replay(plan, [](const ActivityEvent&) { return true; });
    CHECK(report.nominal_duration_ms == doctest::Approx(100.0));
    CHECK(report.elapsed_ms >= 100.0);
    CHECK(report.elapsed_ms < 1000.0);
}

TEST_CASE("event store") {
    EventStore store(tiny_spec());
    auto first = ActivityEvent::response("s1", "q1", true, 5000);
    CHECK(store.ingest(first) == 1);
    CHECK_THROWS_AS(store.ingest(ActivityEvent::response("zz", "q1", true)), ValidationError);
    CHECK(store.size() == 1);
    ActivityEvent hint = ActivityEvent::hint("s1", "q2", 1, 6500);
    hint.hint_ordinal.reset();
    CHECK(store.ingest(hint) == 2);
    CHECK(store.ingest(ActivityEvent::hint("s1", "q2", 2, 7000)) == 3);
    auto events = store.events();
    CHECK(events[0].timestamp_ms == 0);
    CHECK(events[1].timestamp_ms == 1500);
    CHECK(events[1].hint_ordinal == 1);
    CHECK(store.prefix(1).size() == 1);
    CHECK(store.prefix(99).size() == 3);
}
