#include <doctest.h>

#include "ewtreg/json_io.hpp"
#include "ewtreg/scenario.hpp"

using namespace ewtreg;

TEST_CASE("same seed reproduces the scenario exactly") {
    ScenarioConfig cfg;
    cfg.seed = 12345;
    Scenario a = generate_scenario(cfg);
    Scenario b = generate_scenario(cfg);
    CHECK(scenario_to_json(a) == scenario_to_json(b));
}

TEST_CASE("different seeds differ") {
    ScenarioConfig cfg;
    cfg.seed = 1;
    Scenario a = generate_scenario(cfg);
    cfg.seed = 2;
    Scenario b = generate_scenario(cfg);
    CHECK(scenario_to_json(a) != scenario_to_json(b));
}

TEST_CASE("generated scenarios satisfy their invariants") {
    ScenarioConfig cfg;
    cfg.seed = 999;
    Scenario sc = generate_scenario(cfg);
    REQUIRE(sc.initial_requests.size() == 4);
    REQUIRE(sc.sequential_requests.size() == 8);
    double prev = 0.0;
    for (std::size_t i = 0; i < sc.sequential_requests.size(); ++i) {
        const RideRequest& r = sc.sequential_requests[i];
        CHECK(r.issue_time == doctest::Approx((i + 1) * cfg.request_spacing));
        CHECK(r.issue_time > prev);
        prev = r.issue_time;
    }
    for (const RideRequest& r : sc.initial_requests) CHECK(r.issue_time == 0.0);
    auto all = sc.initial_requests;
    all.insert(all.end(), sc.sequential_requests.begin(), sc.sequential_requests.end());
    for (const RideRequest& r : all) {
        CHECK(distance(r.origin, r.destination) >= 0.05);
        CHECK(r.origin.x >= 0.0);
        CHECK(r.origin.x <= 1.0);
        CHECK(r.destination.y >= 0.0);
        CHECK(r.destination.y <= 1.0);
    }
}

TEST_CASE("coordinate mean over many draws is near 0.5") {
    ScenarioConfig cfg;
    cfg.n_initial = 0;
    cfg.n_sequential = 10000;
    cfg.seed = 424242;
    Scenario sc = generate_scenario(cfg);
    double sum = 0.0;
    std::size_t count = 0;
    for (const RideRequest& r : sc.sequential_requests) {
        sum += r.origin.x + r.origin.y + r.destination.x + r.destination.y;
        count += 4;
    }
    CHECK(sum / count == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("scenario serialization round-trips") {
    Scenario sc = canonical_scenario();
    const json j = scenario_to_json(sc);
    Scenario back = scenario_from_json(j);
    CHECK(scenario_to_json(back) == j);
}

TEST_CASE("canonical scenario matches the case study setup") {
    Scenario sc = canonical_scenario();
    CHECK(sc.initial_requests.size() == 4);
    CHECK(sc.sequential_requests.size() == 8);
    CHECK(sc.config.capacity == 6);
    CHECK(sc.config.square_side == 1.0);
    CHECK(sc.config.speed == 0.25);
    CHECK(sc.sequential_requests.back().issue_time == doctest::Approx(32.0));
}

TEST_CASE("invalid configs rejected") {
    ScenarioConfig cfg;
    cfg.request_spacing = 0.0;
    CHECK_THROWS_AS(generate_scenario(cfg), std::invalid_argument);
    cfg = ScenarioConfig{};
    cfg.capacity = 0;
    CHECK_THROWS_AS(generate_scenario(cfg), std::invalid_argument);
}
