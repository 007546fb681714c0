#pragma once

// Scenario synthesis: seeded uniform request generation on the unit square
// and the canonical single-vehicle case study configuration.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ewtreg/geometry.hpp"
#include "ewtreg/rng.hpp"

namespace ewtreg {

inline constexpr std::uint64_t kCanonicalSeed = 146;

struct ScenarioConfig {
    int n_initial = 4;            // requests committed at t = 0
    int n_sequential = 8;         // N
    double request_spacing = 4.0; // minutes between sequential requests
    double square_side = 1.0;     // miles
    int capacity = 6;
    double speed = 0.25;          // miles per minute
    std::uint64_t seed = kCanonicalSeed;
    int reward_samples = 16;      // midpoint panels per inter-request interval
    double discount = 1.0;

    TravelModel travel_model() const { return TravelModel{speed}; }

    void validate() const {
        if (n_initial < 0 || n_sequential < 0) throw std::invalid_argument("negative count");
        if (request_spacing <= 0.0) throw std::invalid_argument("request_spacing must be > 0");
        if (capacity < 1) throw std::invalid_argument("capacity must be >= 1");
        if (speed <= 0.0) throw std::invalid_argument("speed must be > 0");
        if (square_side <= 0.0) throw std::invalid_argument("square_side must be > 0");
        if (reward_samples < 1) throw std::invalid_argument("reward_samples must be >= 1");
    }
};

struct Scenario {
    ScenarioConfig config;
    std::vector<RideRequest> initial_requests;    // all at t = 0
    std::vector<RideRequest> sequential_requests; // at spacing, 2*spacing, ...
};

// Origin-destination pairs closer than this are redrawn.
inline constexpr double kMinTripDistance = 0.05;

inline Scenario generate_scenario(const ScenarioConfig& config) {
    config.validate();
    SplitMix64 rng(config.seed);
    Scenario sc;
    sc.config = config;
    const int total = config.n_initial + config.n_sequential;
    for (int k = 0; k < total; ++k) {
        RideRequest req;
        req.passenger_id = k;
        do {
            req.origin = {rng.uniform() * config.square_side, rng.uniform() * config.square_side};
            req.destination = {rng.uniform() * config.square_side,
                               rng.uniform() * config.square_side};
        } while (distance(req.origin, req.destination) < kMinTripDistance);
        if (k < config.n_initial) {
            req.issue_time = 0.0;
            sc.initial_requests.push_back(req);
        } else {
            req.issue_time = (k - config.n_initial + 1) * config.request_spacing;
            sc.sequential_requests.push_back(req);
        }
    }
    return sc;
}

/// The case-study scenario behind all golden files: 4 initial passengers,
/// 8 sequential requests 4 minutes apart, capacity-6 vehicle, fixed seed.
inline Scenario canonical_scenario() { return generate_scenario(ScenarioConfig{}); }

} // namespace ewtreg
