#pragma once

// Travel model, route representation and the routing primitives: cheapest
// insertion of a pickup/dropoff pair, event-driven route advancement, and
// per-passenger waiting-time extraction.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ewtreg/errors.hpp"

namespace ewtreg {

using PassengerId = int;

struct Location {
    double x = 0.0; // miles
    double y = 0.0; // miles
};

inline double distance(const Location& a, const Location& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

struct TravelModel {
    double speed = 0.25; // miles per minute (15 mph)
};

/// Euclidean travel time in minutes.
inline double travel_time(const Location& a, const Location& b, const TravelModel& m) {
    return distance(a, b) / m.speed;
}

struct RideRequest {
    PassengerId passenger_id = 0;
    Location origin;
    Location destination;
    double issue_time = 0.0; // minutes
};

enum class StopKind { Pickup, Dropoff };

struct Stop {
    StopKind kind = StopKind::Pickup;
    PassengerId passenger = 0;
    Location where;
};

/// One vehicle's plan: current position, the ordered stop list still to be
/// served, and the set of passengers physically in the vehicle.
struct Route {
    Location vehicle_position;
    std::vector<Stop> stops;
    std::set<PassengerId> onboard;
    int capacity = 6;
};

inline bool has_pending_pickup(const Route& r, PassengerId pid) {
    for (const Stop& s : r.stops)
        if (s.kind == StopKind::Pickup && s.passenger == pid) return true;
    return false;
}

inline bool has_pending_dropoff(const Route& r, PassengerId pid) {
    for (const Stop& s : r.stops)
        if (s.kind == StopKind::Dropoff && s.passenger == pid) return true;
    return false;
}

/// Time to drive the whole stop list, in order, from the current position.
inline double completion_time(const Route& r, const TravelModel& m) {
    double t = 0.0;
    Location pos = r.vehicle_position;
    for (const Stop& s : r.stops) {
        t += travel_time(pos, s.where, m);
        pos = s.where;
    }
    return t;
}

/// Onboard count stays within capacity after every prefix of `stops`,
/// starting from `initial_onboard` passengers in the vehicle.
inline bool capacity_feasible(const std::vector<Stop>& stops, std::size_t initial_onboard,
                              int capacity) {
    int count = static_cast<int>(initial_onboard);
    for (const Stop& s : stops) {
        if (s.kind == StopKind::Pickup) {
            ++count;
            if (count > capacity) return false;
        } else {
            --count;
        }
    }
    return true;
}

/// Cheapest insertion: place the request's pickup and dropoff at the pair of
/// positions (pickup before dropoff) minimizing route completion time, over
/// all capacity-feasible pairs. Existing stop order is preserved. Ties break
/// to the lowest pickup index, then the lowest dropoff index.
inline Route insert_request(const Route& route, const RideRequest& req, const TravelModel& m) {
    if (route.onboard.count(req.passenger_id) || has_pending_pickup(route, req.passenger_id) ||
        has_pending_dropoff(route, req.passenger_id)) {
        throw std::invalid_argument("passenger " + std::to_string(req.passenger_id) +
                                    " already in route");
    }

    const std::size_t n = route.stops.size();
    const Stop pickup{StopKind::Pickup, req.passenger_id, req.origin};
    const Stop dropoff{StopKind::Dropoff, req.passenger_id, req.destination};

    double best_cost = std::numeric_limits<double>::infinity();
    std::optional<std::pair<std::size_t, std::size_t>> best;
    std::vector<Stop> candidate;
    candidate.reserve(n + 2);

    for (std::size_t i = 0; i <= n; ++i) {
        for (std::size_t j = i + 1; j <= n + 1; ++j) {
            candidate.clear();
            for (std::size_t p = 0; p < i; ++p) candidate.push_back(route.stops[p]);
            candidate.push_back(pickup);
            for (std::size_t p = i; p + 1 < j; ++p) candidate.push_back(route.stops[p]);
            candidate.push_back(dropoff);
            for (std::size_t p = j - 1; p < n; ++p) candidate.push_back(route.stops[p]);

            if (!capacity_feasible(candidate, route.onboard.size(), route.capacity)) continue;

            Route trial = route;
            trial.stops = candidate;
            const double cost = completion_time(trial, m);
            if (cost < best_cost) {
                best_cost = cost;
                best = {i, j};
            }
        }
    }

    if (!best) throw InfeasibleInsertion("no capacity-feasible insertion pair");

    const auto [i, j] = *best;
    Route out = route;
    out.stops.clear();
    out.stops.reserve(n + 2);
    for (std::size_t p = 0; p < i; ++p) out.stops.push_back(route.stops[p]);
    out.stops.push_back(pickup);
    for (std::size_t p = i; p + 1 < j; ++p) out.stops.push_back(route.stops[p]);
    out.stops.push_back(dropoff);
    for (std::size_t p = j - 1; p < n; ++p) out.stops.push_back(route.stops[p]);
    return out;
}

/// Move the vehicle along its stop sequence for `tau` minutes. Stops reached
/// within the interval are executed in order; the final position uses exact
/// partial-leg interpolation. An idle vehicle stays put.
inline Route advance(Route r, double tau, const TravelModel& m) {
    while (tau > 0.0 && !r.stops.empty()) {
        const Stop next = r.stops.front();
        const double leg = travel_time(r.vehicle_position, next.where, m);
        if (leg <= tau) {
            r.vehicle_position = next.where;
            tau -= leg;
            if (next.kind == StopKind::Pickup)
                r.onboard.insert(next.passenger);
            else
                r.onboard.erase(next.passenger);
            r.stops.erase(r.stops.begin());
        } else {
            const double f = tau / leg;
            r.vehicle_position.x += f * (next.where.x - r.vehicle_position.x);
            r.vehicle_position.y += f * (next.where.y - r.vehicle_position.y);
            tau = 0.0;
        }
    }
    return r;
}

/// Elapsed time until the given stop is executed, assuming no route changes.
inline double time_to_stop(const Route& r, PassengerId pid, StopKind kind, const TravelModel& m) {
    double t = 0.0;
    Location pos = r.vehicle_position;
    for (const Stop& s : r.stops) {
        t += travel_time(pos, s.where, m);
        pos = s.where;
        if (s.passenger == pid && s.kind == kind) return t;
    }
    throw NotInRoute("passenger " + std::to_string(pid) + " has no such pending stop");
}

inline double pickup_time(const Route& r, PassengerId pid, const TravelModel& m) {
    return time_to_stop(r, pid, StopKind::Pickup, m);
}

} // namespace ewtreg
