#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mdplab/dp.hpp"
#include "mdplab/mdp.hpp"
#include "mdplab/perturb.hpp"

namespace mdplab {

struct Temperature {
  explicit Temperature(double a) : alpha(a) {
    if (!(a > 0.0)) throw ArgumentError("Temperature: alpha must be strictly positive");
  }
  double alpha;

  friend bool operator==(const Temperature&, const Temperature&) = default;
};

struct SoftQTable {
  SoftQTable(Grid g, Temperature t) : values(std::move(g)), alpha(t) {
    if (!all_finite(values)) throw ValidationError("SoftQTable: non-finite entry");
  }
  Grid values;
  Temperature alpha;
};

namespace detail {

// alpha * log sum_a exp(x_a / alpha), max-shifted so nothing overflows.
inline double scaled_logsumexp(std::span<const double> row, double alpha) {
  double m = row[0];
  for (double v : row) m = std::max(m, v);
  double acc = 0.0;
  for (double v : row) acc += std::exp((v - m) / alpha);
  return m + alpha * std::log(acc);
}

inline void softmax_row(std::span<const double> row, double alpha, std::span<double> out) {
  double m = row[0];
  for (double v : row) m = std::max(m, v);
  double acc = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    out[i] = std::exp((row[i] - m) / alpha);
    acc += out[i];
  }
  for (std::size_t i = 0; i < row.size(); ++i) out[i] /= acc;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Soft Bellman operator: the hard max is replaced by alpha*logsumexp(./alpha).
// Still a sup-norm contraction with modulus gamma.
// ---------------------------------------------------------------------------

inline SoftQTable soft_bellman_backup(const SoftQTable& q, const RewardTable& r,
                                      const FiniteMdp& mdp) {
  if (!mdp.matches(q.values) || !mdp.matches(r.values))
    throw DimensionError("soft_bellman_backup: table shapes do not match the MDP");

  const int S = mdp.n_states();
  const int A = mdp.n_actions();
  const double gamma = mdp.discount();
  const double alpha = q.alpha.alpha;

  std::vector<double> soft_max(S);
  for (int s = 0; s < S; ++s) soft_max[s] = detail::scaled_logsumexp(q.values.row(s), alpha);

  Grid out(S, A);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      double exp_next = 0.0;
      auto probs = mdp.next_state_row(s, a);
      for (int s2 = 0; s2 < S; ++s2) exp_next += probs[s2] * soft_max[s2];
      out(s, a) = r.values(s, a) + gamma * exp_next;
    }
  }
  return SoftQTable(std::move(out), q.alpha);
}

inline SoftQTable solve_soft_q(const FiniteMdp& mdp, const RewardTable& r, Temperature alpha,
                               double tol = kDefaultSolveTol, int max_iter = kDefaultMaxIter) {
  if (!(tol > 0.0)) throw ArgumentError("solve_soft_q: tol must be positive");
  if (!mdp.matches(r.values))
    throw DimensionError("solve_soft_q: reward shape does not match the MDP");

  const double gamma = mdp.discount();
  SoftQTable q(Grid(mdp.n_states(), mdp.n_actions(), 0.0), alpha);
  if (gamma == 0.0) return soft_bellman_backup(q, r, mdp);

  const double threshold = tol * (1.0 - gamma) / gamma;
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    SoftQTable next = soft_bellman_backup(q, r, mdp);
    residual = sup_diff(next.values, q.values);
    q = std::move(next);
    if (residual <= threshold) return q;
  }
  throw ConvergenceError("solve_soft_q: no convergence after " + std::to_string(max_iter) +
                             " iterations, last residual " + std::to_string(residual),
                         residual);
}

// Boltzmann policy: pi(a|s) proportional to exp(q(s,a)/alpha). Single-valued,
// so no tie-breaking rule enters anywhere.
inline PolicyTable boltzmann_policy(const SoftQTable& q) {
  Grid probs(q.values.rows(), q.values.cols());
  for (int s = 0; s < q.values.rows(); ++s)
    detail::softmax_row(q.values.row(s), q.alpha.alpha, probs.row(s));
  return PolicyTable(std::move(probs));
}

// ---------------------------------------------------------------------------
// Softmax L1/Linf stability: ||softmax(x/a) - softmax(y/a)||_1 <= ||x-y||_inf / a.
// ---------------------------------------------------------------------------

struct SoftmaxL1Report {
  double l1 = 0.0;
  double bound = 0.0;
  bool holds = false;
};

inline SoftmaxL1Report softmax_l1_bound_report(std::span<const double> x,
                                               std::span<const double> y, Temperature alpha) {
  if (x.size() != y.size())
    throw DimensionError("softmax_l1_bound_report: vectors differ in length");
  if (x.empty()) throw ArgumentError("softmax_l1_bound_report: vectors must be non-empty");

  std::vector<double> px(x.size()), py(y.size());
  detail::softmax_row(x, alpha.alpha, px);
  detail::softmax_row(y, alpha.alpha, py);

  SoftmaxL1Report rep;
  double linf = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    rep.l1 += std::abs(px[i] - py[i]);
    linf = std::max(linf, std::abs(x[i] - y[i]));
  }
  rep.bound = linf / alpha.alpha;
  rep.holds = rep.l1 <= rep.bound + 1e-10;
  return rep;
}

// ---------------------------------------------------------------------------
// End-to-end soft-policy stability: the per-state TV gap between the two
// Boltzmann policies against sup|r1-r2| / (2*alpha*(1-gamma)).
// ---------------------------------------------------------------------------

struct SoftStabilityReport {
  double max_tv = 0.0;
  double bound = 0.0;
  bool holds = false;
};

inline SoftStabilityReport soft_policy_stability_report(const FiniteMdp& mdp,
                                                        const RewardTable& r1,
                                                        const RewardTable& r2,
                                                        Temperature alpha) {
  SoftQTable q1 = solve_soft_q(mdp, r1, alpha);
  SoftQTable q2 = solve_soft_q(mdp, r2, alpha);
  PolicyTable p1 = boltzmann_policy(q1);
  PolicyTable p2 = boltzmann_policy(q2);

  SoftStabilityReport rep;
  for (int s = 0; s < mdp.n_states(); ++s)
    rep.max_tv = std::max(rep.max_tv, tv_distance(p1.probs.row(s), p2.probs.row(s)));
  rep.bound = sup_diff(r1.values, r2.values) / (2.0 * alpha.alpha * (1.0 - mdp.discount()));
  rep.holds = rep.max_tv <= rep.bound + 1e-8;
  return rep;
}

// ---------------------------------------------------------------------------
// KL-regularized objective. Evaluates J(pi) = E[sum_t g^t (r - beta*KL(pi||base))]
// exactly by folding the per-state KL penalty into the reward and running a
// fixed-policy evaluation. A base that assigns zero mass where pi does not is
// a hard error rather than a silent infinity.
// ---------------------------------------------------------------------------

inline double kl_objective(const FiniteMdp& mdp, const RewardTable& r,
                           const PolicyTable& policy, const PolicyTable& base, double beta,
                           std::span<const double> mu) {
  if (!mdp.matches(policy.probs) || !mdp.matches(base.probs) || !mdp.matches(r.values))
    throw DimensionError("kl_objective: table shapes do not match the MDP");
  if (beta < 0.0) throw ArgumentError("kl_objective: beta must be nonnegative");
  if (static_cast<int>(mu.size()) != mdp.n_states() || !is_distribution_row(mu))
    throw ArgumentError("kl_objective: mu is not a distribution over states");

  Grid augmented = r.values;
  for (int s = 0; s < mdp.n_states(); ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) {
      const double pi_sa = policy.probs(s, a);
      if (pi_sa == 0.0) continue;  // contributes nothing to V^pi
      const double base_sa = base.probs(s, a);
      if (base_sa == 0.0)
        throw SupportViolationError("kl_objective: base policy has zero mass at (s=" +
                                    std::to_string(s) + ", a=" + std::to_string(a) +
                                    ") where the policy has support");
      augmented(s, a) -= beta * std::log(pi_sa / base_sa);
    }
  }

  PolicyValue pv = policy_evaluation(mdp, policy, RewardTable(std::move(augmented)));
  double j = 0.0;
  for (int s = 0; s < mdp.n_states(); ++s) j += mu[s] * pv.v.values[s];
  return j;
}

}  // namespace mdplab
