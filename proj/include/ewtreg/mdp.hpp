#pragma once

// The MDP building blocks: system state snapshots, the accept/reject
// transition branches, the corner-probe EWT estimate, the per-branch reward
// integral, the empirical action bounds and the discrete-choice probability.

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "ewtreg/errors.hpp"
#include "ewtreg/geometry.hpp"

namespace ewtreg {

enum class PassengerStatus { Waiting, Onboard, Completed, Rejected };

/// Full environment snapshot at one instant.
struct SystemState {
    double time = 0.0; // minutes
    Route route;
    std::map<PassengerId, PassengerStatus> statuses;
    std::optional<RideRequest> pending;
};

/// Admissible interval for the desired acceptance probability.
struct ActionBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Piecewise-constant waiting-time target EWT*(t).
struct TargetProfile {
    // (start_time, target) pairs; start times strictly increasing, first at 0.
    std::vector<std::pair<double, double>> segments;

    static TargetProfile constant(double target) { return TargetProfile{{{0.0, target}}}; }

    double value_at(double t) const {
        double v = segments.front().second;
        for (const auto& [start, target] : segments) {
            if (start <= t) v = target;
        }
        return v;
    }
};

struct ChoiceUtilities {
    std::vector<double> utilities;
};

/// Multinomial-logit probability of picking option `index` (0-based).
/// Max-shifted so large utilities cannot overflow.
inline double choice_probability(const ChoiceUtilities& u, std::size_t index) {
    if (index >= u.utilities.size()) throw IndexOutOfRange("choice index out of range");
    double umax = u.utilities.front();
    for (double v : u.utilities) umax = std::max(umax, v);
    double denom = 0.0;
    for (double v : u.utilities) denom += std::exp(v - umax);
    return std::exp(u.utilities[index] - umax) / denom;
}

/// Internal dynamics: advance the route for `tau` minutes and keep passenger
/// statuses consistent with the stops executed along the way.
inline SystemState advance_state(const SystemState& s, double tau, const TravelModel& m) {
    SystemState out = s;
    out.route = advance(s.route, tau, m);
    out.time = s.time + tau;
    for (auto& [pid, status] : out.statuses) {
        if (status == PassengerStatus::Waiting) {
            if (has_pending_pickup(out.route, pid)) continue;
            status = out.route.onboard.count(pid) ? PassengerStatus::Onboard
                                                  : PassengerStatus::Completed;
        } else if (status == PassengerStatus::Onboard && !out.route.onboard.count(pid)) {
            status = PassengerStatus::Completed;
        }
    }
    return out;
}

/// Accept branch: commit the pending request into the route.
inline SystemState transition_accept(const SystemState& s, const TravelModel& m) {
    if (!s.pending) throw NoPendingRequest("transition_accept: no pending request");
    SystemState out = s;
    out.route = insert_request(s.route, *s.pending, m);
    out.statuses[s.pending->passenger_id] = PassengerStatus::Waiting;
    out.pending.reset();
    return out;
}

/// Reject branch: the route is untouched; the passenger leaves the system.
inline SystemState transition_reject(const SystemState& s) {
    if (!s.pending) throw NoPendingRequest("transition_reject: no pending request");
    SystemState out = s;
    out.statuses[s.pending->passenger_id] = PassengerStatus::Rejected;
    out.pending.reset();
    return out;
}

inline SystemState receive_request(const SystemState& s, const RideRequest& req) {
    if (s.pending) throw RequestAlreadyPending("receive_request: a request is already pending");
    if (std::abs(req.issue_time - s.time) > 1e-9)
        throw TimeMismatch("receive_request: issue_time does not match state time");
    SystemState out = s;
    out.pending = req;
    return out;
}

// Reserved id for the hypothetical EWT probe passenger.
inline constexpr PassengerId kProbePassenger = -1;

/// EWT(t) approximation: probe requests with pickups at the four corners of
/// the unit square and dropoff at the center are hypothetically inserted; the
/// result is the mean of the four waiting times. The state is not modified.
inline double estimate_ewt(const SystemState& s, const TravelModel& m) {
    static constexpr std::array<Location, 4> corners{
        Location{0.0, 0.0}, Location{0.0, 1.0}, Location{1.0, 0.0}, Location{1.0, 1.0}};
    static constexpr Location center{0.5, 0.5};
    double sum = 0.0;
    for (const Location& corner : corners) {
        RideRequest probe{kProbePassenger, corner, center, s.time};
        const Route probed = insert_request(s.route, probe, m);
        sum += pickup_time(probed, kProbePassenger, m);
    }
    return sum / 4.0;
}

/// Reward realized over one inter-request interval after a decision:
///   -(1/dt) * integral over [0, dt] of |EWT(tau) - EWT*(t + tau)| dtau,
/// midpoint rule with n_samples panels. Always <= 0.
inline double branch_reward(const SystemState& s_after, double dt, const TargetProfile& target,
                            int n_samples, const TravelModel& m) {
    const double delta = dt / n_samples;
    double acc = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double tau = (i + 0.5) * delta;
        const SystemState si = advance_state(s_after, tau, m);
        acc += std::abs(estimate_ewt(si, m) - target.value_at(si.time)) * delta;
    }
    return -acc / dt;
}

/// Empirical bounds rule: compare the pending passenger's total travel time
/// under acceptance against 1.5x an exclusive alternative whose waiting time
/// is (2/3)EWT* and whose riding time is the direct origin-destination trip.
inline ActionBounds action_bounds(const SystemState& s, double target_now, const TravelModel& m) {
    if (!s.pending) throw NoPendingRequest("action_bounds: no pending request");
    const RideRequest& req = *s.pending;
    const Route accepted = insert_request(s.route, req, m);
    const double smods_total = time_to_stop(accepted, req.passenger_id, StopKind::Dropoff, m);
    const double alt_total = 2.0 * target_now / 3.0 + travel_time(req.origin, req.destination, m);
    if (smods_total <= 1.5 * alt_total) return ActionBounds{0.5, 0.9};
    return ActionBounds{0.2, 0.6};
}

} // namespace ewtreg
