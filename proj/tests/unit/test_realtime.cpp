#include "classpulse/error.hpp"
#include "classpulse/ingestion.hpp"
#include "classpulse/realtime.hpp"

#include "support/random_activity.hpp"

#include <doctest.h>

using namespace classpulse;

namespace {

// Advances a simulated clock in 1 ms steps, ticking the orchestrator each step.
std::size_t run_until(Orchestrator& core, std::int64_t& now, std::int64_t until) {
    std::size_t fired = 0;
    for (; now <= until; ++now)
        if (core.tick(now)) ++fired;
    return fired;
}

ServerConfig quick_config(std::int64_t debounce_ms) {
    ServerConfig c;
    c.debounce_ms = debounce_ms;
    return c;
}

SnapshotPtr snap(std::uint64_t v) {
    auto s = std::make_shared<AnalyticsSnapshot>();
    s->version = v;
    return s;
}

}  // namespace

TEST_CASE("debouncer") {
    Debouncer d(100);
    CHECK_FALSE(d.next_due());
    CHECK_FALSE(d.poll(0));
    d.on_event(10);
    CHECK(d.next_due() == 10);
    CHECK(d.poll(10));
    d.on_event(20);
    d.on_event(50);
    CHECK(d.next_due() == 110);
    CHECK_FALSE(d.poll(109));
    CHECK(d.poll(110));
    CHECK_FALSE(d.pending());
    d.on_event(400);
    CHECK(d.next_due() == 400);
    CHECK_THROWS_AS(Debouncer(-1), ValidationError);
}

TEST_CASE("recompute counts under a simulated clock") {
    auto spec = testsupport::make_spec(4, 2, 2);
    std::mt19937_64 rng(7);
    SUBCASE("zero events") {
        Orchestrator core(spec, quick_config(100));
        std::int64_t now = 0;
        CHECK(run_until(core, now, 1000) == 0);
        CHECK(core.recompute_count() == 0);
    }
    SUBCASE("single event") {
        Orchestrator core(spec, quick_config(100));
        std::int64_t now = 0;
        core.ingest(ActivityEvent::response("s0", "q0_0", true), 5);
        CHECK(run_until(core, now, 105) == 1);
        CHECK(run_until(core, now, 2000) == 0);
        CHECK(core.publisher().current()->events_seen == 1);
    }
    SUBCASE("burst inside one interval") {
        Orchestrator core(spec, quick_config(100));
        std::int64_t now = 0;
        auto events = testsupport::random_stream(spec, 100, rng);
        for (std::size_t i = 0; i < events.size(); ++i) {
            core.ingest(events[i], 0);
            if (i == 0) CHECK(core.tick(0));
        }
        CHECK(run_until(core, now, 100) == 1);
        CHECK(core.recompute_count() <= 2);
        CHECK(core.publisher().current()->events_seen == 100);
    }
}

TEST_CASE("publisher") {
    SnapshotPublisher pub(3, 4);
    CHECK_FALSE(pub.current());
    auto early = pub.subscribe();
    CHECK_FALSE(early->try_next());
    pub.publish(snap(1));
    CHECK(early->try_next() == 1u);
    CHECK_THROWS_AS(pub.publish(snap(1)), ValidationError);

    for (std::uint64_t v = 2; v <= 5; ++v) pub.publish(snap(v));
    CHECK(pub.current_version() == 5);
    CHECK_FALSE(pub.at_version(2));
    CHECK(pub.at_version(3)->version == 3);

    SUBCASE("late subscriber sees the current version at once") {
        auto late = pub.subscribe();
        CHECK(late->try_next() == 5u);
        auto resumed = pub.subscribe(5);
        CHECK_FALSE(resumed->try_next());
    }
    SUBCASE("overflow disconnects and resume catches up") {
        // early has 2,3,4,5 queued = capacity 4; one more overflows it.
        pub.publish(snap(6));
        CHECK(early->disconnected());
        const auto last = early->last_seen();
        CHECK(last == 1);
        auto again = pub.subscribe(last);
        CHECK(again->try_next() == 6u);
    }
    SUBCASE("several subscribers see increasing versions") {
        std::vector<std::shared_ptr<Subscription>> subs{pub.subscribe(), pub.subscribe(), pub.subscribe()};
        std::vector<std::vector<std::uint64_t>> seen(3);
        for (std::uint64_t v = 6; v <= 30; ++v) {
            pub.publish(snap(v));
            for (std::size_t i = 0; i < subs.size(); ++i)
                while (auto x = subs[i]->try_next()) seen[i].push_back(*x);
        }
        for (const auto& s : seen) {
            CHECK(s.size() == 26);
            for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] > s[i - 1]);
        }
    }
}

TEST_CASE("recompute degrades gracefully") {
    auto spec = testsupport::make_spec(3, 2, 2);
    ServerConfig config;
    SUBCASE("zero events") {
        auto s = recompute({}, spec, config, 1, 0);
        CHECK_FALSE(s.kpis.min_score);
        CHECK_FALSE(s.clustering);
        CHECK(s.clustering_absent_reason == std::string(absent_reason::kInsufficientObservations));
        CHECK(s.histogram.bins.size() == 10);
    }
    SUBCASE("one active student") {
        std::vector<ActivityEvent> log{ActivityEvent::response("s1", "q0_0", false)};
        auto s = recompute(log, spec, config, 1, 0);
        CHECK(s.kpis.min_score == 0.0);
        CHECK_FALSE(s.clustering);
        CHECK(s.clustering_absent_reason == std::string(absent_reason::kInsufficientObservations));
    }
    SUBCASE("identical students") {
        std::vector<ActivityEvent> log{ActivityEvent::response("s0", "q0_0", true),
                                       ActivityEvent::response("s1", "q0_0", true)};
        auto s = recompute(log, spec, config, 1, 0);
        CHECK(s.clustering_absent_reason == std::string(absent_reason::kDegenerateFeatures));
    }
    SUBCASE("fixed k is clamped") {
        std::vector<ActivityEvent> log{ActivityEvent::response("s0", "q0_0", false),
                                       ActivityEvent::response("s1", "q0_0", true),
                                       ActivityEvent::hint("s2", "q1_0", 1)};
        config.k.fixed = 9;
        auto s = recompute(log, spec, config, 1, 0);
        REQUIRE(s.clustering);
        CHECK(s.clustering->k == 3);
        CHECK(s.clustering->k_fixed);
        CHECK(s.recommendations.size() == 3);
    }
}

TEST_CASE("live engine covers ingested events") {
    auto spec = testsupport::make_spec(4, 2, 2);
    LiveEngine engine(spec, quick_config(20));
    CHECK(engine.orchestrator().publisher().current_version() == 1);
    auto sub = engine.orchestrator().publisher().subscribe();
    std::mt19937_64 rng(2);
    for (const auto& e : testsupport::random_stream(spec, 30, rng)) engine.ingest(e);
    CHECK(engine.wait_until_covered(std::chrono::seconds(5)));
    CHECK(engine.orchestrator().publisher().current()->events_seen == 30);
    std::uint64_t last = 0;
    while (auto v = sub->try_next()) {
        CHECK(*v > last);
        last = *v;
    }
    CHECK(last == engine.orchestrator().publisher().current_version());
    engine.stop();
}
