#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mdplab/dp.hpp"
#include "mdplab/mdp.hpp"

namespace mdplab {

// ---------------------------------------------------------------------------
// Bump tables. On a finite state-action space the indicator of the center
// pair already satisfies every bump constraint (values in [0,1], 1 at the
// center, 0 on the protected actions), and it makes the gap arithmetic exact.
// ---------------------------------------------------------------------------

struct BumpTable {
  Grid values;
  int center_state = 0;
  int center_action = 0;
};

inline BumpTable make_bump(const FiniteMdp& mdp, int center_state, int center_action,
                           const std::vector<int>& protected_actions) {
  if (center_state < 0 || center_state >= mdp.n_states())
    throw ArgumentError("make_bump: center state out of range");
  if (center_action < 0 || center_action >= mdp.n_actions())
    throw ArgumentError("make_bump: center action out of range");
  for (int a : protected_actions) {
    if (a < 0 || a >= mdp.n_actions())
      throw ArgumentError("make_bump: protected action out of range");
    if (a == center_action)
      throw ArgumentError("make_bump: center action " + std::to_string(a) +
                          " cannot be protected");
  }
  BumpTable bump;
  bump.values = Grid(mdp.n_states(), mdp.n_actions(), 0.0);
  bump.values(center_state, center_action) = 1.0;
  bump.center_state = center_state;
  bump.center_action = center_action;
  return bump;
}

// ---------------------------------------------------------------------------
// Inverse Bellman map: r(s,a) = q(s,a) - g sum_s' P(s'|s,a) max_a' q(s',a').
// The returned reward has q as the exact fixed point of its Bellman operator,
// so q is the optimal Q table for that reward.
// ---------------------------------------------------------------------------

inline RewardTable inverse_bellman(const QTable& q, const FiniteMdp& mdp) {
  if (!mdp.matches(q.values))
    throw DimensionError("inverse_bellman: table shape does not match the MDP");

  const int S = mdp.n_states();
  const int A = mdp.n_actions();
  const double gamma = mdp.discount();

  std::vector<double> next_max(S);
  for (int s = 0; s < S; ++s) next_max[s] = row_max(q.values, s);

  Grid r(S, A);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      double exp_next = 0.0;
      auto probs = mdp.next_state_row(s, a);
      for (int s2 = 0; s2 < S; ++s2) exp_next += probs[s2] * next_max[s2];
      r(s, a) = q.values(s, a) - gamma * exp_next;
    }
  }
  return RewardTable(std::move(r));
}

// ---------------------------------------------------------------------------
// Total variation distance between two distribution rows: half the L1 gap.
// ---------------------------------------------------------------------------

inline double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ArgumentError("tv_distance: rows differ in length");
  if (!is_distribution_row(p) || !is_distribution_row(q))
    throw ArgumentError("tv_distance: input row is not a probability distribution");
  double l1 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) l1 += std::abs(p[i] - q[i]);
  return 0.5 * l1;
}

namespace detail {

inline std::vector<double> uniform_row(const ActionSet& set, int n_actions) {
  std::vector<double> row(n_actions, 0.0);
  const double mass = 1.0 / static_cast<double>(set.size());
  for (int a : set.actions) row[a] = mass;
  return row;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Discontinuity construction. Starting from a reward with a degenerate
// optimal set at `state`, an epsilon bump in Q space followed by the inverse
// Bellman map yields a nearby reward whose optimal set collapses to the
// target action. reward_distance <= eps*(1+gamma) however small eps is,
// while the uniform tie-respecting policy jumps by (m-1)/m in TV.
// ---------------------------------------------------------------------------

struct DiscontinuityCertificate {
  double epsilon = 0.0;
  RewardTable perturbed_reward;
  double reward_distance = 0.0;
  ActionSet switched_action_set;
  double tv_jump = 0.0;
  // Extras used by reports: the degenerate set before the perturbation and
  // the measured Q advantage of the target over the other formerly optimal
  // actions (equals epsilon by construction).
  ActionSet original_action_set;
  double q_gap = 0.0;
};

inline DiscontinuityCertificate discontinuity_sequence(const FiniteMdp& mdp,
                                                       const RewardTable& r0, int state,
                                                       int target, double epsilon,
                                                       double tie_tolerance) {
  if (!(epsilon > 0.0)) throw ArgumentError("discontinuity_sequence: epsilon must be positive");

  QTable q0 = solve_q_star(mdp, r0);
  ActionSet before = optimal_action_set(q0, state, tie_tolerance);
  if (before.size() < 2 || !before.contains(target))
    throw PreconditionError(
        "discontinuity_sequence: state " + std::to_string(state) +
        " needs at least two tied optimal actions including the target");

  std::vector<int> protected_actions;
  for (int a : before.actions)
    if (a != target) protected_actions.push_back(a);

  BumpTable bump = make_bump(mdp, state, target, protected_actions);
  Grid q_eps = q0.values;
  for (std::size_t i = 0; i < q_eps.data().size(); ++i)
    q_eps.data()[i] += epsilon * bump.values.data()[i];

  RewardTable r_eps = inverse_bellman(QTable(std::move(q_eps)), mdp);

  DiscontinuityCertificate cert;
  cert.epsilon = epsilon;
  cert.reward_distance = sup_diff(r_eps.values, r0.values);
  cert.original_action_set = before;

  QTable q_check = solve_q_star(mdp, r_eps);
  cert.switched_action_set = optimal_action_set(q_check, state, tie_tolerance);
  if (cert.switched_action_set.actions != std::vector<int>{target})
    throw Error("discontinuity_sequence: perturbed optimal set is not the singleton target");

  double min_gap = std::numeric_limits<double>::infinity();
  for (int a : before.actions) {
    if (a == target) continue;
    min_gap = std::min(min_gap, q_check.values(state, target) - q_check.values(state, a));
  }
  cert.q_gap = min_gap;

  std::vector<double> row_before = detail::uniform_row(before, mdp.n_actions());
  std::vector<double> row_after = detail::uniform_row(cert.switched_action_set, mdp.n_actions());
  cert.tv_jump = tv_distance(row_before, row_after);

  cert.perturbed_reward = std::move(r_eps);
  return cert;
}

// ---------------------------------------------------------------------------
// Tie-breaker: an additive perturbation of size at most eps that makes
// `promoted` strictly optimal over `demoted` with Q gap eps/(1+gamma).
// ---------------------------------------------------------------------------

inline RewardTable tie_breaker(const FiniteMdp& mdp, const RewardTable& r0, int state,
                               int demoted, int promoted, double epsilon,
                               bool strict_minimality = false) {
  if (demoted == promoted)
    throw ArgumentError("tie_breaker: demoted and promoted must be distinct actions");
  if (!(epsilon > 0.0)) throw ArgumentError("tie_breaker: epsilon must be positive");

  QTable q0 = solve_q_star(mdp, r0);
  const double tie_tol = default_tie_tolerance(q0.values, state);
  ActionSet tied = optimal_action_set(q0, state, tie_tol);
  if (!tied.contains(demoted) || !tied.contains(promoted))
    throw PreconditionError("tie_breaker: both actions must be optimal at the state");

  if (strict_minimality) {
    double smallest_gap = std::numeric_limits<double>::infinity();
    const double best = row_max(q0.values, state);
    for (int a = 0; a < mdp.n_actions(); ++a) {
      if (tied.contains(a)) continue;
      smallest_gap = std::min(smallest_gap, best - q0.values(state, a));
    }
    if (epsilon > 0.5 * smallest_gap)
      throw ArgumentError("tie_breaker: epsilon exceeds half the smallest suboptimality gap");
  }

  const double eps_prime = epsilon / (1.0 + mdp.discount());
  std::vector<int> protected_actions;
  for (int a : tied.actions)
    if (a != promoted) protected_actions.push_back(a);

  BumpTable bump = make_bump(mdp, state, promoted, protected_actions);
  Grid q_eps = q0.values;
  for (std::size_t i = 0; i < q_eps.data().size(); ++i)
    q_eps.data()[i] += eps_prime * bump.values.data()[i];
  return inverse_bellman(QTable(std::move(q_eps)), mdp);
}

}  // namespace mdplab
