#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mdplab/mdp.hpp"

namespace mdplab {

inline constexpr double kDefaultSolveTol = 1e-10;
inline constexpr int kDefaultMaxIter = 1'000'000;

// Threshold at which policy evaluation switches from a dense linear solve to
// fixed-point iteration.
inline constexpr int kDenseSolveLimit = 4096;

enum class Selection {
  lowest_index,
  uniform_over_ties,
};

inline const char* to_string(Selection s) {
  return s == Selection::lowest_index ? "lowest_index" : "uniform_over_ties";
}

// ---------------------------------------------------------------------------
// Bellman optimality operator: (T q)(s,a) = r(s,a) + g * sum_s' P(s'|s,a) max_a' q(s',a').
// ---------------------------------------------------------------------------

inline QTable bellman_backup(const QTable& q, const RewardTable& r, const FiniteMdp& mdp) {
  if (!mdp.matches(q.values) || !mdp.matches(r.values))
    throw DimensionError("bellman_backup: table shapes do not match the MDP");

  const int S = mdp.n_states();
  const int A = mdp.n_actions();
  const double gamma = mdp.discount();

  std::vector<double> next_max(S);
  for (int s = 0; s < S; ++s) next_max[s] = row_max(q.values, s);

  Grid out(S, A);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      double exp_next = 0.0;
      auto probs = mdp.next_state_row(s, a);
      for (int s2 = 0; s2 < S; ++s2) exp_next += probs[s2] * next_max[s2];
      out(s, a) = r.values(s, a) + gamma * exp_next;
    }
  }
  return QTable(std::move(out));
}

// Value iteration from the zero table. The stopping rule rho <= tol*(1-g)/g
// turns the successive-iterate residual into a sup-norm distance guarantee:
// the returned table is within tol of the true fixed point. gamma = 0 needs
// exactly one backup.
inline QTable solve_q_star(const FiniteMdp& mdp, const RewardTable& r,
                           double tol = kDefaultSolveTol, int max_iter = kDefaultMaxIter) {
  if (!(tol > 0.0)) throw ArgumentError("solve_q_star: tol must be positive");
  if (max_iter <= 0) throw ArgumentError("solve_q_star: max_iter must be positive");
  if (!mdp.matches(r.values))
    throw DimensionError("solve_q_star: reward shape does not match the MDP");

  const double gamma = mdp.discount();
  QTable q(Grid(mdp.n_states(), mdp.n_actions(), 0.0));
  if (gamma == 0.0) return bellman_backup(q, r, mdp);

  const double threshold = tol * (1.0 - gamma) / gamma;
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    QTable next = bellman_backup(q, r, mdp);
    residual = sup_diff(next.values, q.values);
    q = std::move(next);
    if (residual <= threshold) return q;
  }
  throw ConvergenceError("solve_q_star: no convergence after " + std::to_string(max_iter) +
                             " iterations, last residual " + std::to_string(residual),
                         residual);
}

// All actions within tie_tolerance of the row maximum, ascending.
inline ActionSet optimal_action_set(const QTable& q, int state, double tie_tolerance) {
  if (state < 0 || state >= q.values.rows())
    throw ArgumentError("optimal_action_set: state index out of range");
  if (tie_tolerance < 0.0)
    throw ArgumentError("optimal_action_set: tie_tolerance must be nonnegative");

  const double best = row_max(q.values, state);
  ActionSet set;
  set.state = state;
  set.tie_tolerance = tie_tolerance;
  for (int a = 0; a < q.values.cols(); ++a)
    if (q.values(state, a) >= best - tie_tolerance) set.actions.push_back(a);
  return set;
}

inline PolicyTable greedy_policy(const QTable& q, Selection selection, double tie_tolerance) {
  Grid probs(q.values.rows(), q.values.cols(), 0.0);
  for (int s = 0; s < q.values.rows(); ++s) {
    ActionSet set = optimal_action_set(q, s, tie_tolerance);
    if (selection == Selection::lowest_index) {
      probs(s, set.actions.front()) = 1.0;
    } else {
      const double mass = 1.0 / static_cast<double>(set.size());
      for (int a : set.actions) probs(s, a) = mass;
    }
  }
  return PolicyTable(std::move(probs));
}

// ---------------------------------------------------------------------------
// Fixed-policy evaluation: solves Q(s,a) = r(s,a) + g sum_s' P(s'|s,a) sum_a' pi(a'|s') Q(s',a').
// Dense LU when the system is small, fixed-point iteration otherwise. The
// system matrix I - g*M is nonsingular for g < 1.
// ---------------------------------------------------------------------------

struct PolicyValue {
  QTable q;
  ValueTable v;
};

inline PolicyValue policy_evaluation(const FiniteMdp& mdp, const PolicyTable& policy,
                                     const RewardTable& r) {
  if (!mdp.matches(policy.probs))
    throw DimensionError("policy_evaluation: policy shape does not match the MDP");
  if (!mdp.matches(r.values))
    throw DimensionError("policy_evaluation: reward shape does not match the MDP");

  const int S = mdp.n_states();
  const int A = mdp.n_actions();
  const int n = S * A;
  const double gamma = mdp.discount();

  Grid q(S, A);
  if (n <= kDenseSolveLimit) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd rhs(n);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const int row = s * A + a;
        rhs(row) = r.values(s, a);
        auto probs = mdp.next_state_row(s, a);
        for (int s2 = 0; s2 < S; ++s2) {
          if (probs[s2] == 0.0) continue;
          for (int a2 = 0; a2 < A; ++a2)
            m(row, s2 * A + a2) -= gamma * probs[s2] * policy.probs(s2, a2);
        }
      }
    }
    Eigen::VectorXd sol = m.partialPivLu().solve(rhs);
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) q(s, a) = sol(s * A + a);
  } else {
    std::vector<double> vbar(S, 0.0);
    double residual = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < kDefaultMaxIter; ++it) {
      residual = 0.0;
      Grid next(S, A);
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
          double exp_next = 0.0;
          auto probs = mdp.next_state_row(s, a);
          for (int s2 = 0; s2 < S; ++s2) exp_next += probs[s2] * vbar[s2];
          next(s, a) = r.values(s, a) + gamma * exp_next;
          residual = std::max(residual, std::abs(next(s, a) - q(s, a)));
        }
      }
      q = std::move(next);
      for (int s = 0; s < S; ++s) {
        double acc = 0.0;
        for (int a = 0; a < A; ++a) acc += policy.probs(s, a) * q(s, a);
        vbar[s] = acc;
      }
      if (residual <= 1e-12) break;
    }
    if (it == kDefaultMaxIter)
      throw ConvergenceError("policy_evaluation: iteration did not reach 1e-12", residual);
  }

  std::vector<double> v(S, 0.0);
  for (int s = 0; s < S; ++s) {
    double acc = 0.0;
    for (int a = 0; a < A; ++a) acc += policy.probs(s, a) * q(s, a);
    v[s] = acc;
  }
  return {QTable(std::move(q)), ValueTable(std::move(v))};
}

// ---------------------------------------------------------------------------
// Brute-force oracle: enumerate every deterministic stationary policy,
// evaluate each exactly, take the pointwise maximum over the Q tables and
// refine with one backup. Deterministic optima exist for finite discounted
// MDPs, so this recovers Q*. Test oracle only; cost grows as A^S.
// ---------------------------------------------------------------------------

inline QTable brute_force_q_star(const FiniteMdp& mdp, const RewardTable& r) {
  if (!mdp.matches(r.values))
    throw DimensionError("brute_force_q_star: reward shape does not match the MDP");

  const int S = mdp.n_states();
  const int A = mdp.n_actions();

  double count = std::pow(static_cast<double>(A), static_cast<double>(S));
  if (count > 100000.0)
    throw SizeError("brute_force_q_star: " + std::to_string(A) + "^" + std::to_string(S) +
                    " deterministic policies exceed the 100000 cap");
  const std::int64_t n_policies = static_cast<std::int64_t>(std::llround(count));

  Grid best(S, A, -std::numeric_limits<double>::infinity());
  std::vector<int> choice(S, 0);
  for (std::int64_t p = 0; p < n_policies; ++p) {
    std::int64_t code = p;
    for (int s = 0; s < S; ++s) {
      choice[s] = static_cast<int>(code % A);
      code /= A;
    }
    Grid probs(S, A, 0.0);
    for (int s = 0; s < S; ++s) probs(s, choice[s]) = 1.0;
    PolicyValue pv = policy_evaluation(mdp, PolicyTable(std::move(probs)), r);
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) best(s, a) = std::max(best(s, a), pv.q.values(s, a));
  }
  return bellman_backup(QTable(std::move(best)), r, mdp);
}

// ---------------------------------------------------------------------------
// Reward-to-Q stability report: sup|Q*_1 - Q*_2| against sup|r1 - r2|/(1-g).
// ---------------------------------------------------------------------------

struct QLipschitzReport {
  double lhs = 0.0;    // sup-norm distance between the two optimal Q tables
  double rhs = 0.0;    // sup-norm reward distance scaled by 1/(1-gamma)
  double ratio = 0.0;  // lhs/rhs, 0 when rhs is 0
  bool holds = false;
};

inline QLipschitzReport q_lipschitz_report(const FiniteMdp& mdp, const RewardTable& r1,
                                           const RewardTable& r2,
                                           double tol = kDefaultSolveTol) {
  QTable q1 = solve_q_star(mdp, r1, tol);
  QTable q2 = solve_q_star(mdp, r2, tol);
  QLipschitzReport rep;
  rep.lhs = sup_diff(q1.values, q2.values);
  rep.rhs = sup_diff(r1.values, r2.values) / (1.0 - mdp.discount());
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  rep.holds = rep.lhs <= rep.rhs + 1e-8;
  return rep;
}

}  // namespace mdplab
