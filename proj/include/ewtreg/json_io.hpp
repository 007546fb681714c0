#pragma once

// Canonical JSON forms: stable key order, doubles rounded to 1e-9. Used by
// the golden tests and the CLI outputs.

#include <cmath>
#include <string>

#include <json.hpp>

#include "ewtreg/mdp.hpp"
#include "ewtreg/scenario.hpp"
#include "ewtreg/solver.hpp"

namespace ewtreg {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "0.1.0";

inline double round9(double v) { return std::nearbyint(v * 1e9) / 1e9; }

inline json location_to_json(const Location& l) {
    return json{{"x", round9(l.x)}, {"y", round9(l.y)}};
}

inline Location location_from_json(const json& j) {
    return Location{j.at("x").get<double>(), j.at("y").get<double>()};
}

inline json request_to_json(const RideRequest& r) {
    return json{{"passenger_id", r.passenger_id},
                {"origin", location_to_json(r.origin)},
                {"destination", location_to_json(r.destination)},
                {"issue_time", round9(r.issue_time)}};
}

inline RideRequest request_from_json(const json& j) {
    return RideRequest{j.at("passenger_id").get<PassengerId>(),
                       location_from_json(j.at("origin")),
                       location_from_json(j.at("destination")),
                       j.at("issue_time").get<double>()};
}

inline json route_to_json(const Route& r) {
    json stops = json::array();
    for (const Stop& s : r.stops) {
        stops.push_back(json{{"kind", s.kind == StopKind::Pickup ? "pickup" : "dropoff"},
                             {"passenger", s.passenger},
                             {"location", location_to_json(s.where)}});
    }
    json onboard = json::array();
    for (PassengerId pid : r.onboard) onboard.push_back(pid);
    return json{{"vehicle_position", location_to_json(r.vehicle_position)},
                {"stops", stops},
                {"onboard", onboard},
                {"capacity", r.capacity}};
}

inline Route route_from_json(const json& j) {
    Route r;
    r.vehicle_position = location_from_json(j.at("vehicle_position"));
    for (const json& s : j.at("stops")) {
        r.stops.push_back(Stop{s.at("kind").get<std::string>() == "pickup" ? StopKind::Pickup
                                                                           : StopKind::Dropoff,
                               s.at("passenger").get<PassengerId>(),
                               location_from_json(s.at("location"))});
    }
    for (const json& pid : j.at("onboard")) r.onboard.insert(pid.get<PassengerId>());
    r.capacity = j.at("capacity").get<int>();
    return r;
}

inline const char* status_name(PassengerStatus s) {
    switch (s) {
        case PassengerStatus::Waiting: return "waiting";
        case PassengerStatus::Onboard: return "onboard";
        case PassengerStatus::Completed: return "completed";
        case PassengerStatus::Rejected: return "rejected";
    }
    return "unknown";
}

inline PassengerStatus status_from_name(const std::string& s) {
    if (s == "waiting") return PassengerStatus::Waiting;
    if (s == "onboard") return PassengerStatus::Onboard;
    if (s == "completed") return PassengerStatus::Completed;
    if (s == "rejected") return PassengerStatus::Rejected;
    throw std::invalid_argument("unknown passenger status: " + s);
}

inline json state_to_json(const SystemState& s) {
    json statuses = json::object();
    for (const auto& [pid, status] : s.statuses) statuses[std::to_string(pid)] = status_name(status);
    json j{{"time", round9(s.time)},
           {"route", route_to_json(s.route)},
           {"passenger_statuses", statuses}};
    j["pending_request"] = s.pending ? request_to_json(*s.pending) : json(nullptr);
    return j;
}

inline SystemState state_from_json(const json& j) {
    SystemState s;
    s.time = j.at("time").get<double>();
    s.route = route_from_json(j.at("route"));
    for (const auto& [key, value] : j.at("passenger_statuses").items())
        s.statuses[std::stoi(key)] = status_from_name(value.get<std::string>());
    if (!j.at("pending_request").is_null()) s.pending = request_from_json(j.at("pending_request"));
    return s;
}

inline json config_to_json(const ScenarioConfig& c) {
    return json{{"n_initial", c.n_initial},
                {"n_sequential", c.n_sequential},
                {"request_spacing", round9(c.request_spacing)},
                {"square_side", round9(c.square_side)},
                {"capacity", c.capacity},
                {"speed", round9(c.speed)},
                {"seed", c.seed},
                {"reward_samples", c.reward_samples},
                {"discount", round9(c.discount)}};
}

inline ScenarioConfig config_from_json(const json& j) {
    ScenarioConfig c;
    if (j.contains("n_initial")) c.n_initial = j.at("n_initial").get<int>();
    if (j.contains("n_sequential")) c.n_sequential = j.at("n_sequential").get<int>();
    if (j.contains("request_spacing")) c.request_spacing = j.at("request_spacing").get<double>();
    if (j.contains("square_side")) c.square_side = j.at("square_side").get<double>();
    if (j.contains("capacity")) c.capacity = j.at("capacity").get<int>();
    if (j.contains("speed")) c.speed = j.at("speed").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("reward_samples")) c.reward_samples = j.at("reward_samples").get<int>();
    if (j.contains("discount")) c.discount = j.at("discount").get<double>();
    return c;
}

inline json scenario_to_json(const Scenario& sc) {
    json initial = json::array();
    for (const RideRequest& r : sc.initial_requests) initial.push_back(request_to_json(r));
    json sequential = json::array();
    for (const RideRequest& r : sc.sequential_requests) sequential.push_back(request_to_json(r));
    return json{{"schema_version", kSchemaVersion},
                {"config", config_to_json(sc.config)},
                {"initial_requests", initial},
                {"sequential_requests", sequential}};
}

inline Scenario scenario_from_json(const json& j) {
    Scenario sc;
    sc.config = config_from_json(j.at("config"));
    for (const json& r : j.at("initial_requests")) sc.initial_requests.push_back(request_from_json(r));
    for (const json& r : j.at("sequential_requests"))
        sc.sequential_requests.push_back(request_from_json(r));
    return sc;
}

inline json target_to_json(const TargetProfile& t) {
    json segments = json::array();
    for (const auto& [start, target] : t.segments)
        segments.push_back(json{{"start_time", round9(start)}, {"target", round9(target)}});
    return json{{"segments", segments}};
}

inline TargetProfile target_from_json(const json& j) {
    TargetProfile t;
    for (const json& seg : j.at("segments"))
        t.segments.emplace_back(seg.at("start_time").get<double>(), seg.at("target").get<double>());
    return t;
}

/// Vertex bitmask -> (action, value) export of a solved tree.
inline json policy_to_json(const EpisodeTree& tree, const Policy& policy) {
    json entries = json::array();
    for (int k = 1; k <= tree.horizon; ++k) {
        const HistoryMask n_hist = HistoryMask{1} << (k - 1);
        for (HistoryMask h = 0; h < n_hist; ++h) {
            entries.push_back(json{{"depth", k},
                                   {"history", h},
                                   {"action", round9(policy.at(k, h))},
                                   {"value", round9(tree.vertex(k, h).value)}});
        }
    }
    return json{{"schema_version", kSchemaVersion}, {"horizon", tree.horizon},
                {"entries", entries}};
}

} // namespace ewtreg
