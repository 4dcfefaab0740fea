#include "classpulse/http_api.hpp"
#include "classpulse/serialization.hpp"

#include "support/random_activity.hpp"

#include <doctest.h>
#include <httplib.h>

#include <thread>

using namespace classpulse;

namespace {

struct Fixture {
    Fixture() : engine(testsupport::make_spec(4, 2, 2), config()), api(engine, std::chrono::milliseconds(300)) {
        port = api.bind("127.0.0.1", 0);
        REQUIRE(port > 0);
        thread = std::thread([this] { api.listen(); });
        for (int i = 0; i < 200 && !api.running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    ~Fixture() {
        api.stop();
        thread.join();
        engine.stop();
    }
    static ServerConfig config() {
        ServerConfig c;
        c.debounce_ms = 10;
        return c;
    }
    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(5, 0);
        return c;
    }

    LiveEngine engine;
    ApiServer api;
    int port = -1;
    std::thread thread;
};

}  // namespace

TEST_CASE("rest endpoints") {
    Fixture f;
    auto cli = f.client();

    auto spec = cli.Get("/api/spec");
    REQUIRE(spec);
    CHECK(spec->status == 200);
    CHECK(json::parse(spec->body)["roster"].size() == 4);

    auto ok = cli.Post("/api/events", R"({"student_id":"s1","question_id":"q0_0","event_type":"response","correct":0})",
                       "application/json");
    REQUIRE(ok);
    CHECK(ok->status == 202);
    CHECK(json::parse(ok->body)["seq"] == 1);

    auto bad = cli.Post("/api/events", R"({"student_id":"nobody","question_id":"q0_0","event_type":"hint"})",
                        "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 422);
    auto garbage = cli.Post("/api/events", "{", "application/json");
    REQUIRE(garbage);
    CHECK(garbage->status == 400);

    cli.Post("/api/events", R"({"student_id":"s2","question_id":"q1_0","event_type":"hint"})", "application/json");
    REQUIRE(f.engine.wait_until_covered(std::chrono::seconds(5)));

    auto snap = cli.Get("/api/snapshot");
    REQUIRE(snap);
    auto body = json::parse(snap->body);
    CHECK(body["events_seen"] == 2);
    CHECK(body["kpis"]["min_score"] == 0.0);
    CHECK(body["clustering"]["available"] == true);
    CHECK(body["clustering"]["dendrogram"]["n"] == 2);
    const auto version = body["version"].get<std::uint64_t>();

    auto old = cli.Get("/api/snapshot/1");
    REQUIRE(old);
    CHECK(old->status == 200);
    CHECK(json::parse(old->body)["events_seen"] == 0);
    auto missing = cli.Get("/api/snapshot/999");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    for (const char* path : {"/api/kpis", "/api/alerts", "/api/clustering"}) {
        auto r = cli.Get(path);
        REQUIRE(r);
        CHECK(r->status == 200);
        CHECK(json::parse(r->body)["version"] == version);
    }
}

TEST_CASE("event stream") {
    Fixture f;
    auto cli = f.client();
    std::string received;
    std::thread poster([&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(150));
        auto c = f.client();
        c.Post("/api/events", R"({"student_id":"s0","question_id":"q0_0","event_type":"response","correct":true})",
               "application/json");
    });
    auto res = cli.Get("/api/stream", [&](const char* data, std::size_t len) {
        received.append(data, len);
        return received.find("id: 2\n") == std::string::npos;
    });
    poster.join();
    CHECK(received.find("id: 1\ndata: {\"version\": 1}") != std::string::npos);
    CHECK(received.find("id: 2\ndata: {\"version\": 2}") != std::string::npos);
    CHECK(received.find("id: 1") < received.find("id: 2"));

    std::string resumed;
    httplib::Headers headers{{"Last-Event-ID", "2"}};
    auto keepalive = cli.Get("/api/stream", headers, [&](const char* data, std::size_t len) {
        resumed.append(data, len);
        return resumed.find(": keepalive") == std::string::npos;
    });
    CHECK(resumed.find("id: ") == std::string::npos);
    CHECK(resumed.find(": keepalive") != std::string::npos);
}
