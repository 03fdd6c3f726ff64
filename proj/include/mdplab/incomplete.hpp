#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdplab/dp.hpp"
#include "mdplab/mdp.hpp"

namespace mdplab {

// Advantage of an action against the policy's own value:
// A(s,a) = Q^pi_r(s,a) - V^pi_r(s).
inline double advantage(const FiniteMdp& mdp, const PolicyTable& policy, const RewardTable& r,
                        int state, int action) {
  if (state < 0 || state >= mdp.n_states() || action < 0 || action >= mdp.n_actions())
    throw ArgumentError("advantage: state or action index out of range");
  PolicyValue pv = policy_evaluation(mdp, policy, r);
  return pv.q.values(state, action) - pv.v.values[state];
}

// Discounted occupancy sum_t gamma^t Pr(s_t = state | mu, pi), from the linear
// system rho = mu + gamma * P_pi^T rho. Strictly positive exactly when the
// state is visited with positive probability at some finite time.
inline double reachability(const FiniteMdp& mdp, const PolicyTable& policy,
                           std::span<const double> mu, int state) {
  if (state < 0 || state >= mdp.n_states())
    throw ArgumentError("reachability: state index out of range");
  if (static_cast<int>(mu.size()) != mdp.n_states() || !is_distribution_row(mu))
    throw ArgumentError("reachability: mu is not a distribution over states");
  if (!mdp.matches(policy.probs))
    throw DimensionError("reachability: policy shape does not match the MDP");

  const int S = mdp.n_states();
  const double gamma = mdp.discount();

  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(S, S);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) {
      const double pi_sa = policy.probs(s, a);
      if (pi_sa == 0.0) continue;
      auto probs = mdp.next_state_row(s, a);
      for (int s2 = 0; s2 < S; ++s2) m(s2, s) -= gamma * pi_sa * probs[s2];
    }
  }
  Eigen::VectorXd b(S);
  for (int s = 0; s < S; ++s) b(s) = mu[s];
  Eigen::VectorXd rho = m.partialPivLu().solve(b);
  return rho(state);
}

// ---------------------------------------------------------------------------
// Incomplete-reward suboptimality certificate. A policy optimal for a partial
// training reward is strictly suboptimal for the full reward whenever some
// training-optimal action has positive advantage under the missing component
// at a reachable state. The certificate carries the first such witness in
// lexicographic (state, action) order and the measured value gap under the
// full reward.
// ---------------------------------------------------------------------------

struct SlackerCertificate {
  int state = -1;   // -1 when no witness exists
  int action = -1;
  double advantage_missing = 0.0;
  double reachability = 0.0;
  double true_value_gap = 0.0;
  // {action optimal under training reward, positive missing advantage, state reachable}
  std::array<bool, 3> conditions_met = {false, false, false};
  int witness_count = 0;
};

inline constexpr double kOccupancyPositive = 1e-12;

inline SlackerCertificate slacker_certificate(const FiniteMdp& mdp, const RewardTable& r_train,
                                              const RewardTable& r_missing,
                                              std::span<const double> mu, Selection selection,
                                              std::optional<double> tie_tolerance = {}) {
  if (!mdp.matches(r_train.values) || !mdp.matches(r_missing.values))
    throw DimensionError("slacker_certificate: reward shapes do not match the MDP");
  if (static_cast<int>(mu.size()) != mdp.n_states() || !is_distribution_row(mu))
    throw ArgumentError("slacker_certificate: mu is not a distribution over states");

  QTable q_train = solve_q_star(mdp, r_train);
  PolicyTable pi_train = [&] {
    if (tie_tolerance) return greedy_policy(q_train, selection, *tie_tolerance);
    Grid probs(mdp.n_states(), mdp.n_actions(), 0.0);
    for (int s = 0; s < mdp.n_states(); ++s) {
      ActionSet set = optimal_action_set(q_train, s, default_tie_tolerance(q_train.values, s));
      if (selection == Selection::lowest_index) {
        probs(s, set.actions.front()) = 1.0;
      } else {
        const double mass = 1.0 / static_cast<double>(set.size());
        for (int a : set.actions) probs(s, a) = mass;
      }
    }
    return PolicyTable(std::move(probs));
  }();

  PolicyValue missing_eval = policy_evaluation(mdp, pi_train, r_missing);

  SlackerCertificate cert;
  for (int s = 0; s < mdp.n_states(); ++s) {
    const double tol = tie_tolerance.value_or(default_tie_tolerance(q_train.values, s));
    ActionSet optimal = optimal_action_set(q_train, s, tol);
    double occupancy = -1.0;  // computed lazily per state
    for (int a = 0; a < mdp.n_actions(); ++a) {
      if (!optimal.contains(a)) continue;
      const double adv = missing_eval.q.values(s, a) - missing_eval.v.values[s];
      if (!(adv > tol)) continue;
      if (occupancy < 0.0) occupancy = reachability(mdp, pi_train, mu, s);
      if (!(occupancy > kOccupancyPositive)) break;  // state never visited
      ++cert.witness_count;
      if (cert.state < 0) {
        cert.state = s;
        cert.action = a;
        cert.advantage_missing = adv;
        cert.reachability = occupancy;
        cert.conditions_met = {true, true, true};
      }
    }
  }

  // Gap under the full reward, witness or not.
  Grid true_grid = r_train.values;
  for (std::size_t i = 0; i < true_grid.data().size(); ++i)
    true_grid.data()[i] += r_missing.values.data()[i];
  RewardTable r_true(std::move(true_grid));

  QTable q_true = solve_q_star(mdp, r_true);
  PolicyValue pi_eval = policy_evaluation(mdp, pi_train, r_true);
  double gap = 0.0;
  for (int s = 0; s < mdp.n_states(); ++s)
    gap += mu[s] * (row_max(q_true.values, s) - pi_eval.v.values[s]);
  cert.true_value_gap = gap;
  return cert;
}

}  // namespace mdplab
