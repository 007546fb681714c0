#pragma once

// Shared generators for the property-style tests.

#include <vector>

#include "ewtreg/geometry.hpp"
#include "ewtreg/mdp.hpp"
#include "ewtreg/rng.hpp"

namespace ewtreg::testing {

inline Location random_location(SplitMix64& rng) {
    return Location{rng.uniform(), rng.uniform()};
}

inline RideRequest random_request(SplitMix64& rng, PassengerId pid, double issue_time = 0.0) {
    RideRequest req;
    req.passenger_id = pid;
    do {
        req.origin = random_location(rng);
        req.destination = random_location(rng);
    } while (distance(req.origin, req.destination) < 0.05);
    req.issue_time = issue_time;
    return req;
}

/// Route with `n_requests` randomly inserted passengers, advanced a random
/// amount so some are onboard and some pending.
inline Route random_route(SplitMix64& rng, int n_requests, const TravelModel& m,
                          int capacity = 6) {
    Route r;
    r.capacity = capacity;
    r.vehicle_position = random_location(rng);
    for (int i = 0; i < n_requests; ++i) r = insert_request(r, random_request(rng, i), m);
    const double horizon = completion_time(r, m);
    return advance(r, rng.uniform() * horizon, m);
}

/// System state consistent with a random route.
inline SystemState random_state(SplitMix64& rng, int n_requests, const TravelModel& m,
                                int capacity = 6) {
    SystemState s;
    s.route.capacity = capacity;
    s.route.vehicle_position = random_location(rng);
    for (int i = 0; i < n_requests; ++i) {
        s.route = insert_request(s.route, random_request(rng, i), m);
        s.statuses[i] = PassengerStatus::Waiting;
    }
    const double horizon = completion_time(s.route, m);
    return advance_state(s, rng.uniform() * horizon, m);
}

} // namespace ewtreg::testing
