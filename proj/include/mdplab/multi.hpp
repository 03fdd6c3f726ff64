#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "mdplab/dp.hpp"
#include "mdplab/mdp.hpp"
#include "mdplab/perturb.hpp"
#include "mdplab/soft.hpp"

namespace mdplab {

// ---------------------------------------------------------------------------
// Reward tuples and per-state aggregation weights. The tuple norm is the max
// over components of the sup-norm.
// ---------------------------------------------------------------------------

struct RewardTuple {
  RewardTuple() = default;
  explicit RewardTuple(std::vector<RewardTable> comps) : components(std::move(comps)) {
    if (components.empty()) throw ValidationError("RewardTuple: needs at least one component");
    for (std::size_t k = 1; k < components.size(); ++k)
      require_same_shape(components[0].values, components[k].values, "RewardTuple");
  }
  std::vector<RewardTable> components;

  int size() const { return static_cast<int>(components.size()); }

  friend bool operator==(const RewardTuple&, const RewardTuple&) = default;
};

inline double tuple_norm(const RewardTuple& t) {
  double m = 0.0;
  for (const auto& c : t.components) m = std::max(m, sup_norm(c.values));
  return m;
}

inline double tuple_diff_norm(const RewardTuple& a, const RewardTuple& b) {
  if (a.size() != b.size()) throw DimensionError("tuple_diff_norm: tuples differ in length");
  double m = 0.0;
  for (int k = 0; k < a.size(); ++k)
    m = std::max(m, sup_diff(a.components[k].values, b.components[k].values));
  return m;
}

// weights(s, k): relevance of component k at state s. Rows are distributions
// over components and stay fixed while the tuple is perturbed.
struct WeightTable {
  WeightTable() = default;
  explicit WeightTable(Grid g) : weights(std::move(g)) {
    for (int s = 0; s < weights.rows(); ++s)
      if (!is_distribution_row(weights.row(s)))
        throw ValidationError("WeightTable: row " + std::to_string(s) +
                              " is not a distribution over components");
  }
  Grid weights;

  friend bool operator==(const WeightTable&, const WeightTable&) = default;
};

// Class priors plus one initial state distribution per class.
struct MixtureSpec {
  MixtureSpec(std::vector<double> priors, std::vector<std::vector<double>> inits)
      : class_priors(std::move(priors)), initial_distributions(std::move(inits)) {
    if (class_priors.empty() || class_priors.size() != initial_distributions.size())
      throw ValidationError("MixtureSpec: priors and initial distributions must align");
    double sum = 0.0;
    for (double p : class_priors) {
      if (!(p > 0.0)) throw ValidationError("MixtureSpec: class priors must be positive");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance)
      throw ValidationError("MixtureSpec: class priors sum to " + std::to_string(sum));
    for (const auto& d : initial_distributions)
      if (!is_distribution_row(d))
        throw ValidationError("MixtureSpec: initial distribution is not a distribution");
  }
  std::vector<double> class_priors;
  std::vector<std::vector<double>> initial_distributions;

  int size() const { return static_cast<int>(class_priors.size()); }
};

// ---------------------------------------------------------------------------
// Effective reward: R_eff(s,a) = sum_k w_k(s) R_k(s,a).
// ---------------------------------------------------------------------------

inline RewardTable effective_reward(const RewardTuple& tuple, const WeightTable& weights) {
  const Grid& first = tuple.components.front().values;
  if (weights.weights.rows() != first.rows() || weights.weights.cols() != tuple.size())
    throw DimensionError("effective_reward: weight table shape does not match the tuple");

  Grid eff(first.rows(), first.cols(), 0.0);
  for (int k = 0; k < tuple.size(); ++k) {
    const Grid& comp = tuple.components[k].values;
    for (int s = 0; s < eff.rows(); ++s) {
      const double w = weights.weights(s, k);
      for (int a = 0; a < eff.cols(); ++a) eff(s, a) += w * comp(s, a);
    }
  }
  return RewardTable(std::move(eff));
}

// The aggregation map is 1-Lipschitz from the tuple norm to the sup-norm.
struct EffectiveLipschitzReport {
  double lhs = 0.0;  // sup|R_eff(t1) - R_eff(t2)|
  double rhs = 0.0;  // tuple norm of t1 - t2
  bool holds = false;
};

inline EffectiveLipschitzReport effective_lipschitz_report(const RewardTuple& t1,
                                                           const RewardTuple& t2,
                                                           const WeightTable& weights) {
  if (t1.size() != t2.size())
    throw DimensionError("effective_lipschitz_report: tuples differ in length");
  EffectiveLipschitzReport rep;
  rep.lhs = sup_diff(effective_reward(t1, weights).values,
                     effective_reward(t2, weights).values);
  rep.rhs = tuple_diff_norm(t1, t2);
  rep.holds = rep.lhs <= rep.rhs + 1e-12;
  return rep;
}

// ---------------------------------------------------------------------------
// Global mixture objective: J = sum_k p_k sum_s D_k(s) V^pi_{R_k}(s).
// ---------------------------------------------------------------------------

inline double mixture_objective(const FiniteMdp& mdp, const RewardTuple& tuple,
                                const MixtureSpec& mix, const PolicyTable& policy) {
  if (mix.size() != tuple.size())
    throw DimensionError("mixture_objective: mixture and tuple differ in length");
  double j = 0.0;
  for (int k = 0; k < tuple.size(); ++k) {
    const auto& init = mix.initial_distributions[k];
    if (static_cast<int>(init.size()) != mdp.n_states())
      throw DimensionError("mixture_objective: initial distribution length mismatch");
    PolicyValue pv = policy_evaluation(mdp, policy, tuple.components[k]);
    double inner = 0.0;
    for (int s = 0; s < mdp.n_states(); ++s) inner += init[s] * pv.v.values[s];
    j += mix.class_priors[k] * inner;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Multi-reward discontinuity: the effective-Q bump is realized by adding the
// same delta to every component. Row-normalized weights then reproduce the
// target effective perturbation, so the tuple distance equals sup|delta| and
// obeys the eps*(1+gamma) bound.
// ---------------------------------------------------------------------------

struct MultiDiscontinuityCertificate {
  double epsilon = 0.0;
  RewardTuple perturbed_tuple;
  double tuple_distance = 0.0;
  ActionSet switched_action_set;
  double tv_jump = 0.0;
  ActionSet original_action_set;
  double q_gap = 0.0;
  // Largest deviation of sum_k w_k(s)*delta(s,a) from delta(s,a); zero up to
  // round-off because weight rows sum to one.
  double weight_identity_error = 0.0;
};

inline MultiDiscontinuityCertificate multi_discontinuity_sequence(
    const FiniteMdp& mdp, const RewardTuple& tuple, const WeightTable& weights, int state,
    int target, double epsilon, double tie_tolerance) {
  if (!(epsilon > 0.0))
    throw ArgumentError("multi_discontinuity_sequence: epsilon must be positive");

  RewardTable eff0 = effective_reward(tuple, weights);
  QTable q0 = solve_q_star(mdp, eff0);
  ActionSet before = optimal_action_set(q0, state, tie_tolerance);
  if (before.size() < 2 || !before.contains(target))
    throw PreconditionError(
        "multi_discontinuity_sequence: effective optimal set needs at least two tied "
        "actions including the target");

  std::vector<int> protected_actions;
  for (int a : before.actions)
    if (a != target) protected_actions.push_back(a);

  BumpTable bump = make_bump(mdp, state, target, protected_actions);
  Grid q_eps = q0.values;
  for (std::size_t i = 0; i < q_eps.data().size(); ++i)
    q_eps.data()[i] += epsilon * bump.values.data()[i];
  RewardTable eff_eps = inverse_bellman(QTable(std::move(q_eps)), mdp);

  Grid delta(eff_eps.values.rows(), eff_eps.values.cols());
  for (std::size_t i = 0; i < delta.data().size(); ++i)
    delta.data()[i] = eff_eps.values.data()[i] - eff0.values.data()[i];

  std::vector<RewardTable> perturbed;
  perturbed.reserve(tuple.components.size());
  for (const auto& comp : tuple.components) {
    Grid g = comp.values;
    for (std::size_t i = 0; i < g.data().size(); ++i) g.data()[i] += delta.data()[i];
    perturbed.emplace_back(std::move(g));
  }

  MultiDiscontinuityCertificate cert;
  cert.epsilon = epsilon;
  cert.original_action_set = before;
  cert.tuple_distance = sup_norm(delta);

  for (int s = 0; s < delta.rows(); ++s) {
    double wsum = 0.0;
    for (int k = 0; k < tuple.size(); ++k) wsum += weights.weights(s, k);
    for (int a = 0; a < delta.cols(); ++a)
      cert.weight_identity_error = std::max(
          cert.weight_identity_error, std::abs(wsum * delta(s, a) - delta(s, a)));
  }

  cert.perturbed_tuple = RewardTuple(std::move(perturbed));
  RewardTable eff_check = effective_reward(cert.perturbed_tuple, weights);
  QTable q_check = solve_q_star(mdp, eff_check);
  cert.switched_action_set = optimal_action_set(q_check, state, tie_tolerance);
  if (cert.switched_action_set.actions != std::vector<int>{target})
    throw Error(
        "multi_discontinuity_sequence: perturbed effective optimal set is not the "
        "singleton target");

  double min_gap = std::numeric_limits<double>::infinity();
  for (int a : before.actions) {
    if (a == target) continue;
    min_gap = std::min(min_gap, q_check.values(state, target) - q_check.values(state, a));
  }
  cert.q_gap = min_gap;

  std::vector<double> row_before = detail::uniform_row(before, mdp.n_actions());
  std::vector<double> row_after = detail::uniform_row(cert.switched_action_set, mdp.n_actions());
  cert.tv_jump = tv_distance(row_before, row_after);
  return cert;
}

// Tuple-norm variant of the soft stability check: both tuples are aggregated
// through the same fixed weights and the bound uses the tuple max-norm.
inline SoftStabilityReport soft_policy_stability_report(const FiniteMdp& mdp,
                                                        const RewardTuple& t1,
                                                        const RewardTuple& t2,
                                                        const WeightTable& weights,
                                                        Temperature alpha) {
  RewardTable r1 = effective_reward(t1, weights);
  RewardTable r2 = effective_reward(t2, weights);
  SoftQTable q1 = solve_soft_q(mdp, r1, alpha);
  SoftQTable q2 = solve_soft_q(mdp, r2, alpha);
  PolicyTable p1 = boltzmann_policy(q1);
  PolicyTable p2 = boltzmann_policy(q2);

  SoftStabilityReport rep;
  for (int s = 0; s < mdp.n_states(); ++s)
    rep.max_tv = std::max(rep.max_tv, tv_distance(p1.probs.row(s), p2.probs.row(s)));
  rep.bound = tuple_diff_norm(t1, t2) / (2.0 * alpha.alpha * (1.0 - mdp.discount()));
  rep.holds = rep.max_tv <= rep.bound + 1e-8;
  return rep;
}

}  // namespace mdplab
