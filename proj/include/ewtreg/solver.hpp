#pragma once

// Episode-tree construction over accept/reject histories, exact backward
// induction (E-DP), the receding-horizon heuristic (H-DP), policy-derived
// expectations and a brute-force policy oracle for small horizons.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ewtreg/errors.hpp"
#include "ewtreg/mdp.hpp"
#include "ewtreg/rng.hpp"
#include "ewtreg/scenario.hpp"

namespace ewtreg {

// Decision histories are bitmasks: bit (j-1) holds d_j, the j-th passenger's
// decision (1 = accept). A vertex at depth k carries a (k-1)-bit history.
using HistoryMask = std::uint32_t;

struct SolverConfig {
    TravelModel travel;
    double dt = 4.0;
    int reward_samples = 16;

    static SolverConfig from(const ScenarioConfig& c) {
        return SolverConfig{c.travel_model(), c.request_spacing, c.reward_samples};
    }
};

struct VertexData {
    SystemState state; // decision state s_k, pending request set
    ActionBounds bounds;
    double action = 0.0;
    double value = 0.0;
};

struct EdgeData {
    SystemState post_state; // s_{k+}: decision applied, request cleared
    double reward = 0.0;    // r_k over [k*dt, (k+1)*dt]
};

/// Complete binary tree over decision histories. Vertices at depths 1..N are
/// decision states; edges carry the post-decision state and the reward of the
/// following inter-request interval. Dense array storage.
struct EpisodeTree {
    int horizon = 0; // N
    SolverConfig config;
    SystemState root_post; // s_{0+}, before the first request arrives
    std::vector<VertexData> vertices; // 2^N - 1
    std::vector<EdgeData> edges;      // 2^{N+1} - 2

    static std::size_t vertex_index(int depth, HistoryMask hist) {
        return ((std::size_t{1} << (depth - 1)) - 1) + hist;
    }
    static std::size_t edge_index(int depth, HistoryMask hist) {
        return ((std::size_t{2} << depth) - 2 - (std::size_t{1} << depth)) + hist;
    }

    VertexData& vertex(int depth, HistoryMask hist) { return vertices[vertex_index(depth, hist)]; }
    const VertexData& vertex(int depth, HistoryMask hist) const {
        return vertices[vertex_index(depth, hist)];
    }
    EdgeData& edge(int depth, HistoryMask hist) { return edges[edge_index(depth, hist)]; }
    const EdgeData& edge(int depth, HistoryMask hist) const {
        return edges[edge_index(depth, hist)];
    }
};

/// Per-vertex action table, indexed like EpisodeTree::vertices.
struct Policy {
    int horizon = 0;
    std::vector<double> actions;

    double at(int depth, HistoryMask hist) const {
        return actions[EpisodeTree::vertex_index(depth, hist)];
    }
    double& at(int depth, HistoryMask hist) {
        return actions[EpisodeTree::vertex_index(depth, hist)];
    }
};

/// s_{0+}: vehicle parked at the square center, the initial passengers
/// committed by sequential cheapest insertion in request order.
inline SystemState initial_state(const Scenario& sc) {
    const TravelModel m = sc.config.travel_model();
    SystemState s;
    s.time = 0.0;
    s.route.vehicle_position = {sc.config.square_side / 2.0, sc.config.square_side / 2.0};
    s.route.capacity = sc.config.capacity;
    for (const RideRequest& req : sc.initial_requests) {
        s.route = insert_request(s.route, req, m);
        s.statuses[req.passenger_id] = PassengerStatus::Waiting;
    }
    return s;
}

/// Expand the tree below a given depth-1 decision state (pending request
/// set). `future` holds the requests arriving after it, in order; horizon is
/// 1 + future.size(). Edge rewards are computed, values left at zero.
inline EpisodeTree build_tree(const SystemState& first, std::span<const RideRequest> future,
                              const TargetProfile& target, const SolverConfig& cfg) {
    EpisodeTree tree;
    tree.horizon = static_cast<int>(future.size()) + 1;
    tree.config = cfg;
    const int N = tree.horizon;
    tree.vertices.resize((std::size_t{1} << N) - 1);
    tree.edges.resize((std::size_t{2} << N) - 2);

    tree.vertex(1, 0).state = first;
    tree.vertex(1, 0).bounds = action_bounds(first, target.value_at(first.time), cfg.travel);

    for (int k = 1; k <= N; ++k) {
        const HistoryMask n_hist = HistoryMask{1} << (k - 1);
        for (HistoryMask h = 0; h < n_hist; ++h) {
            const SystemState& s = tree.vertex(k, h).state;
            for (HistoryMask d = 0; d <= 1; ++d) {
                const HistoryMask child = h | (d << (k - 1));
                EdgeData& e = tree.edge(k, child);
                e.post_state = d ? transition_accept(s, cfg.travel) : transition_reject(s);
                e.reward = branch_reward(e.post_state, cfg.dt, target, cfg.reward_samples,
                                         cfg.travel);
                if (k < N) {
                    VertexData& v = tree.vertex(k + 1, child);
                    v.state = receive_request(advance_state(e.post_state, cfg.dt, cfg.travel),
                                              future[k - 1]);
                    v.bounds = action_bounds(v.state, target.value_at(v.state.time), cfg.travel);
                }
            }
        }
    }
    return tree;
}

/// Step 1 of E-DP: build the full episode tree for a scenario.
inline EpisodeTree traverse(const Scenario& sc, const TargetProfile& target) {
    if (sc.sequential_requests.empty())
        throw std::invalid_argument("scenario has no sequential requests");
    const SolverConfig cfg = SolverConfig::from(sc.config);
    const SystemState s0 = initial_state(sc);
    const SystemState s1 = receive_request(advance_state(s0, cfg.dt, cfg.travel),
                                           sc.sequential_requests.front());
    std::span<const RideRequest> rest{sc.sequential_requests.data() + 1,
                                      sc.sequential_requests.size() - 1};
    EpisodeTree tree = build_tree(s1, rest, target, cfg);
    tree.root_post = s0;
    return tree;
}

/// Step 2 of E-DP: backup from the leaves. At each vertex the action is the
/// upper bound iff the accept-branch total is >= the reject-branch total
/// (exact comparison, upper bound on ties); the value is the action-weighted
/// mixture of the two branch totals.
inline std::pair<Policy, double> backward_induction(EpisodeTree& tree) {
    const int N = tree.horizon;
    Policy policy;
    policy.horizon = N;
    policy.actions.assign(tree.vertices.size(), 0.0);
    for (int k = N; k >= 1; --k) {
        const HistoryMask n_hist = HistoryMask{1} << (k - 1);
        for (HistoryMask h = 0; h < n_hist; ++h) {
            VertexData& v = tree.vertex(k, h);
            const HistoryMask acc = h | (HistoryMask{1} << (k - 1));
            const double v1 = (k < N) ? tree.vertex(k + 1, acc).value : 0.0;
            const double v0 = (k < N) ? tree.vertex(k + 1, h).value : 0.0;
            const double total1 = tree.edge(k, acc).reward + v1;
            const double total0 = tree.edge(k, h).reward + v0;
            v.action = (total1 >= total0) ? v.bounds.upper : v.bounds.lower;
            v.value = v.action * total1 + (1.0 - v.action) * total0;
            policy.at(k, h) = v.action;
        }
    }
    return {policy, tree.vertex(1, 0).value};
}

struct EdpResult {
    EpisodeTree tree;
    Policy policy;
    double root_value = 0.0;
};

/// Exact DP: full traverse then backup.
inline EdpResult e_dp(const Scenario& sc, const TargetProfile& target) {
    EdpResult res;
    res.tree = traverse(sc, target);
    auto [policy, value] = backward_induction(res.tree);
    res.policy = std::move(policy);
    res.root_value = value;
    return res;
}

/// Expected total reward of an arbitrary per-vertex action assignment,
/// evaluated exactly on the tree (actions need not respect the bounds).
inline double evaluate_actions(const EpisodeTree& tree, const std::vector<double>& actions) {
    const int N = tree.horizon;
    std::vector<double> values(tree.vertices.size(), 0.0);
    for (int k = N; k >= 1; --k) {
        const HistoryMask n_hist = HistoryMask{1} << (k - 1);
        for (HistoryMask h = 0; h < n_hist; ++h) {
            const HistoryMask acc = h | (HistoryMask{1} << (k - 1));
            const double v1 = (k < N) ? values[EpisodeTree::vertex_index(k + 1, acc)] : 0.0;
            const double v0 = (k < N) ? values[EpisodeTree::vertex_index(k + 1, h)] : 0.0;
            const double a = actions[EpisodeTree::vertex_index(k, h)];
            values[EpisodeTree::vertex_index(k, h)] =
                a * (tree.edge(k, acc).reward + v1) + (1.0 - a) * (tree.edge(k, h).reward + v0);
        }
    }
    return values[0];
}

/// Enumerate every bang-bang policy (one endpoint per vertex) and return the
/// best root expected total reward. Only for tiny horizons.
inline double exhaustive_policy_oracle(const EpisodeTree& tree) {
    const int N = tree.horizon;
    if (N > 4) throw HorizonTooLarge("exhaustive oracle limited to N <= 4");
    const std::size_t n_vertices = tree.vertices.size();
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> actions(n_vertices, 0.0);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n_vertices); ++mask) {
        for (std::size_t v = 0; v < n_vertices; ++v) {
            const ActionBounds& b = tree.vertices[v].bounds;
            actions[v] = (mask >> v & 1) ? b.upper : b.lower;
        }
        best = std::max(best, evaluate_actions(tree, actions));
    }
    return best;
}

namespace detail {

/// Decision-vertex states of the full tree, without reward computation.
inline std::vector<SystemState> expand_states(const Scenario& sc, const SolverConfig& cfg) {
    const int N = static_cast<int>(sc.sequential_requests.size());
    std::vector<SystemState> states((std::size_t{1} << N) - 1);
    const SystemState s0 = initial_state(sc);
    states[0] = receive_request(advance_state(s0, cfg.dt, cfg.travel),
                                sc.sequential_requests.front());
    for (int k = 1; k < N; ++k) {
        const HistoryMask n_hist = HistoryMask{1} << (k - 1);
        for (HistoryMask h = 0; h < n_hist; ++h) {
            const SystemState& s = states[EpisodeTree::vertex_index(k, h)];
            for (HistoryMask d = 0; d <= 1; ++d) {
                const HistoryMask child = h | (d << (k - 1));
                SystemState post = d ? transition_accept(s, cfg.travel) : transition_reject(s);
                states[EpisodeTree::vertex_index(k + 1, child)] = receive_request(
                    advance_state(post, cfg.dt, cfg.travel), sc.sequential_requests[k]);
            }
        }
    }
    return states;
}

} // namespace detail

/// Receding-horizon heuristic: at each decision vertex solve the subtree of
/// height min(lookahead, remaining horizon) rooted there and commit only the
/// root action. lookahead = 0 compares the post-decision EWT estimates
/// directly; lookahead = N reproduces E-DP exactly.
inline Policy h_dp(const Scenario& sc, int lookahead, const TargetProfile& target) {
    const int N = static_cast<int>(sc.sequential_requests.size());
    if (lookahead < 0 || lookahead > N)
        throw LookaheadOutOfRange("lookahead must be in [0, N]");
    const SolverConfig cfg = SolverConfig::from(sc.config);
    const std::vector<SystemState> states = detail::expand_states(sc, cfg);

    Policy policy;
    policy.horizon = N;
    policy.actions.assign(states.size(), 0.0);

    for (int k = 1; k <= N; ++k) {
        const HistoryMask n_hist = HistoryMask{1} << (k - 1);
        for (HistoryMask h = 0; h < n_hist; ++h) {
            const SystemState& s = states[EpisodeTree::vertex_index(k, h)];
            const double target_now = target.value_at(s.time);
            if (lookahead == 0) {
                const double dev1 =
                    std::abs(estimate_ewt(transition_accept(s, cfg.travel), cfg.travel) -
                             target_now);
                const double dev0 =
                    std::abs(estimate_ewt(transition_reject(s), cfg.travel) - target_now);
                const ActionBounds b = action_bounds(s, target_now, cfg.travel);
                policy.at(k, h) = (dev1 <= dev0) ? b.upper : b.lower;
                continue;
            }
            const int height = std::min(lookahead, N - k + 1);
            std::span<const RideRequest> future{sc.sequential_requests.data() + k,
                                                static_cast<std::size_t>(height - 1)};
            EpisodeTree sub = build_tree(s, future, target, cfg);
            auto [sub_policy, sub_value] = backward_induction(sub);
            (void)sub_value;
            policy.at(k, h) = sub_policy.at(1, 0);
        }
    }
    return policy;
}

/// Probability of reaching the depth-(k+1) vertex with history `hist` (k
/// decisions) under the policy's Bernoulli measure.
inline double path_probability(const Policy& policy, int k, HistoryMask hist) {
    double p = 1.0;
    for (int j = 1; j <= k; ++j) {
        const HistoryMask prefix = hist & ((HistoryMask{1} << (j - 1)) - 1);
        const double a = policy.at(j, prefix);
        p *= (hist >> (j - 1) & 1) ? a : (1.0 - a);
    }
    return p;
}

struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;
};

namespace detail {

/// Sample grid over [t0, t0 + (N+1)*dt].
inline std::vector<double> sample_grid(const EpisodeTree& tree, double step) {
    const double t0 = tree.root_post.time;
    const double t_end = t0 + (tree.horizon + 1) * tree.config.dt;
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double t = t0 + i * step;
        if (t > t_end + 1e-12) break;
        grid.push_back(t);
    }
    return grid;
}

/// Number of decisions taken by time t, in [0, N].
inline int decisions_by(const EpisodeTree& tree, double t) {
    const double elapsed = t - tree.root_post.time;
    int k = static_cast<int>(std::floor(elapsed / tree.config.dt + 1e-12));
    return std::min(std::max(k, 0), tree.horizon);
}

inline double state_ewt_at(const EpisodeTree& tree, int k, HistoryMask hist, double t) {
    const double decision_time = tree.root_post.time + k * tree.config.dt;
    const SystemState& base = (k == 0) ? tree.root_post : tree.edge(k, hist).post_state;
    return estimate_ewt(advance_state(base, t - decision_time, tree.config.travel),
                        tree.config.travel);
}

} // namespace detail

/// E[EWT(t)] under the policy's path measure, sampled every `step` minutes.
inline TimeSeries expected_ewt_curve(const EpisodeTree& tree, const Policy& policy, double step) {
    TimeSeries series;
    series.times = detail::sample_grid(tree, step);
    series.values.reserve(series.times.size());
    for (double t : series.times) {
        const int k = detail::decisions_by(tree, t);
        double acc = 0.0;
        const HistoryMask n_hist = HistoryMask{1} << k;
        for (HistoryMask h = 0; h < n_hist; ++h) {
            const double p = path_probability(policy, k, h);
            if (p == 0.0) continue;
            acc += p * detail::state_ewt_at(tree, k, h, t);
        }
        series.values.push_back(acc);
    }
    return series;
}

/// EWT(t) along the deterministic all-accept path.
inline TimeSeries baseline_ewt_curve(const EpisodeTree& tree, double step) {
    TimeSeries series;
    series.times = detail::sample_grid(tree, step);
    series.values.reserve(series.times.size());
    for (double t : series.times) {
        const int k = detail::decisions_by(tree, t);
        const HistoryMask all_ones = (HistoryMask{1} << k) - 1;
        series.values.push_back(detail::state_ewt_at(tree, k, all_ones, t));
    }
    return series;
}

struct AcceptanceRates {
    std::vector<double> per_passenger;
    double mean = 0.0;
};

/// Expected desired acceptance probability per passenger: the policy action
/// at each depth-k vertex, weighted by the probability of reaching it.
inline AcceptanceRates expected_acceptance_rates(const EpisodeTree& tree, const Policy& policy) {
    AcceptanceRates rates;
    const int N = tree.horizon;
    for (int k = 1; k <= N; ++k) {
        double acc = 0.0;
        const HistoryMask n_hist = HistoryMask{1} << (k - 1);
        for (HistoryMask h = 0; h < n_hist; ++h)
            acc += path_probability(policy, k - 1, h) * policy.at(k, h);
        rates.per_passenger.push_back(acc);
        rates.mean += acc;
    }
    rates.mean /= N;
    return rates;
}

/// Average |EWT(t) - EWT*(t)| in minutes over the rewarded horizon: the
/// negative expected total reward divided by the number of intervals.
inline double average_deviation(const EpisodeTree& tree, const Policy& policy) {
    return -evaluate_actions(tree, policy.actions) / tree.horizon;
}

/// Deviation of the deterministic all-accept baseline on the same tree.
inline double baseline_deviation(const EpisodeTree& tree) {
    double total = 0.0;
    for (int k = 1; k <= tree.horizon; ++k) {
        const HistoryMask all_ones = (HistoryMask{1} << k) - 1;
        total += tree.edge(k, all_ones).reward;
    }
    return -total / tree.horizon;
}

/// Sample decision sequences from the policy's Bernoulli measure; returns a
/// count per leaf history. Sanity-check oracle for the expectation routines.
inline std::vector<std::uint64_t> monte_carlo_replay(const EpisodeTree& tree,
                                                     const Policy& policy,
                                                     std::uint64_t n_samples,
                                                     std::uint64_t seed) {
    const int N = tree.horizon;
    std::vector<std::uint64_t> counts(std::size_t{1} << N, 0);
    SplitMix64 rng(seed);
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        HistoryMask h = 0;
        for (int k = 1; k <= N; ++k) {
            const double a = policy.at(k, h);
            if (rng.uniform() < a) h |= HistoryMask{1} << (k - 1);
        }
        ++counts[h];
    }
    return counts;
}

} // namespace ewtreg
