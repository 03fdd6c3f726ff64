#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "mdplab/dp.hpp"
#include "mdplab/incomplete.hpp"
#include "mdplab/perturb.hpp"

using namespace mdplab;
using mdplab::testing::random_mdp;
using mdplab::testing::random_reward;
using mdplab::testing::two_path_mdp;
using mdplab::testing::two_path_reward;

namespace {

// Missing component paying 0.2 for taking the right branch.
RewardTable right_branch_bonus() {
  Grid r(4, 2, 0.0);
  r(0, 1) = 0.2;
  return RewardTable(std::move(r));
}

PolicyTable left_policy() {
  Grid probs(4, 2, 0.0);
  for (int s = 0; s < 4; ++s) probs(s, 0) = 1.0;
  return PolicyTable(std::move(probs));
}

}  // namespace

TEST_CASE("advantage", "[incomplete_reward]") {
  FiniteMdp mdp = two_path_mdp();

  SECTION("on-policy actions have zero advantage") {
    PolicyTable pi = left_policy();
    RewardTable r = two_path_reward();
    REQUIRE(advantage(mdp, pi, r, 0, 0) == Catch::Approx(0.0).margin(1e-12));
  }

  SECTION("optimal policy has no positive advantage anywhere") {
    std::mt19937_64 rng(131);
    FiniteMdp m = random_mdp(rng, 4, 3, 0.9);
    RewardTable r = random_reward(rng, 4, 3);
    QTable q = solve_q_star(m, r);
    PolicyTable pi = greedy_policy(q, Selection::lowest_index, 1e-9);
    for (int s = 0; s < 4; ++s)
      for (int a = 0; a < 3; ++a) REQUIRE(advantage(m, pi, r, s, a) <= 1e-9);
  }

  SECTION("missing bonus on the unexplored branch shows up as advantage") {
    PolicyTable pi = left_policy();
    REQUIRE(advantage(mdp, pi, right_branch_bonus(), 0, 1) ==
            Catch::Approx(0.2).margin(1e-12));
  }
}

TEST_CASE("reachability", "[incomplete_reward]") {
  FiniteMdp mdp = two_path_mdp();
  PolicyTable pi = left_policy();
  std::vector<double> mu = {1.0, 0.0, 0.0, 0.0};

  SECTION("initial states are reachable with at least their own mass") {
    REQUIRE(reachability(mdp, pi, mu, 0) >= 1.0);
  }

  SECTION("the untaken branch has zero occupancy") {
    REQUIRE(reachability(mdp, pi, mu, 2) == Catch::Approx(0.0).margin(1e-14));
  }

  SECTION("one-step successor carries gamma") {
    REQUIRE(reachability(mdp, pi, mu, 1) == Catch::Approx(0.9).margin(1e-12));
  }

  SECTION("positivity agrees with finite-horizon hitting") {
    std::mt19937_64 rng(137);
    for (int trial = 0; trial < 20; ++trial) {
      FiniteMdp m = random_mdp(rng, 4, 2, 0.9);
      QTable q = solve_q_star(m, random_reward(rng, 4, 2));
      PolicyTable policy = greedy_policy(q, Selection::uniform_over_ties, 1e-9);
      std::vector<double> init = {1.0, 0.0, 0.0, 0.0};

      // Forward-simulate the state distribution for 2*n_states steps.
      std::vector<double> dist = init;
      std::vector<bool> hit(4, false);
      hit[0] = true;
      for (int t = 0; t < 8; ++t) {
        std::vector<double> next(4, 0.0);
        for (int s = 0; s < 4; ++s) {
          if (dist[s] == 0.0) continue;
          for (int a = 0; a < 2; ++a) {
            const double pa = policy.probs(s, a);
            if (pa == 0.0) continue;
            for (int s2 = 0; s2 < 4; ++s2) next[s2] += dist[s] * pa * m.p(s, a, s2);
          }
        }
        dist = next;
        for (int s = 0; s < 4; ++s)
          if (dist[s] > 1e-12) hit[s] = true;
      }
      for (int s = 0; s < 4; ++s) {
        const double occ = reachability(m, policy, init, s);
        REQUIRE((occ > 1e-12) == hit[s]);
      }
    }
  }
}

TEST_CASE("slacker_certificate", "[incomplete_reward]") {
  FiniteMdp mdp = two_path_mdp();
  RewardTable r_train = two_path_reward();
  std::vector<double> mu = {1.0, 0.0, 0.0, 0.0};

  SECTION("no missing reward, no witness, no gap") {
    RewardTable zero(Grid(4, 2, 0.0));
    SlackerCertificate cert =
        slacker_certificate(mdp, r_train, zero, mu, Selection::lowest_index);
    REQUIRE(cert.conditions_met == std::array<bool, 3>{false, false, false});
    REQUIRE(cert.witness_count == 0);
    REQUIRE(cert.true_value_gap == Catch::Approx(0.0).margin(1e-10));
  }

  SECTION("missing branch bonus is witnessed and costs the slacker") {
    SlackerCertificate cert =
        slacker_certificate(mdp, r_train, right_branch_bonus(), mu, Selection::lowest_index);
    REQUIRE(cert.conditions_met == std::array<bool, 3>{true, true, true});
    REQUIRE(cert.state == 0);
    REQUIRE(cert.action == 1);
    REQUIRE(cert.advantage_missing == Catch::Approx(0.2).margin(1e-10));
    REQUIRE(cert.reachability >= 1.0);
    REQUIRE(cert.true_value_gap == Catch::Approx(0.2).margin(1e-9));

    // Gap against the enumeration oracle on the full reward.
    Grid true_grid = r_train.values;
    true_grid(0, 1) += 0.2;
    QTable q_true = brute_force_q_star(mdp, RewardTable(std::move(true_grid)));
    REQUIRE(cert.true_value_gap ==
            Catch::Approx(row_max(q_true.values, 0) - 1.0).margin(1e-9));
  }

  SECTION("selection-rule dependence: a rule that collects the bonus has no witness") {
    // Mirror image of the witnessed case: the bonus sits on the branch the
    // lowest-index rule already takes, so the advantage condition fails and
    // the trained policy is genuinely optimal for the full reward.
    Grid missing(4, 2, 0.0);
    missing(0, 0) = 0.2;
    SlackerCertificate cert = slacker_certificate(mdp, r_train, RewardTable(std::move(missing)),
                                                  mu, Selection::lowest_index);
    REQUIRE(cert.conditions_met == std::array<bool, 3>{false, false, false});
    REQUIRE(cert.true_value_gap == Catch::Approx(0.0).margin(1e-10));
  }

  SECTION("a selection that already takes the bonus leaves nothing to witness") {
    // uniform_over_ties spreads mass across both branches, so the advantage
    // of the bonus branch shrinks but stays positive; promote the bonus
    // action into the training optimum instead to kill the witness.
    Grid train2 = r_train.values;
    train2(0, 0) = 0.0;  // only the right branch is training-optimal now
    SlackerCertificate cert = slacker_certificate(mdp, RewardTable(std::move(train2)),
                                                  right_branch_bonus(), mu,
                                                  Selection::lowest_index);
    REQUIRE(cert.conditions_met == std::array<bool, 3>{false, false, false});
    REQUIRE(cert.true_value_gap == Catch::Approx(0.0).margin(1e-10));
  }

  SECTION("soundness: all three conditions imply a positive gap") {
    // A witness needs a degenerate training optimum (an off-policy action
    // that is still training-optimal), so manufacture an exact tie at state 0
    // through the inverse Bellman map.
    std::mt19937_64 rng(139);
    int witnessed = 0;
    for (int trial = 0; trial < 60; ++trial) {
      FiniteMdp m = random_mdp(rng, 4, 2, 0.9);
      QTable q = mdplab::testing::random_q(rng, 4, 2, 2.0);
      q.values(0, 0) = 2.0;
      q.values(0, 1) = 2.0;
      RewardTable train = inverse_bellman(q, m);
      RewardTable missing = random_reward(rng, 4, 2, 0.5);
      std::vector<double> init = {0.25, 0.25, 0.25, 0.25};
      SlackerCertificate cert =
          slacker_certificate(m, train, missing, init, Selection::lowest_index);
      if (cert.conditions_met == std::array<bool, 3>{true, true, true}) {
        ++witnessed;
        REQUIRE(cert.true_value_gap > 1e-10);
      }
    }
    REQUIRE(witnessed > 10);  // the suite actually exercises the implication
  }

  SECTION("value linearity for fixed policies") {
    std::mt19937_64 rng(149);
    for (int trial = 0; trial < 30; ++trial) {
      FiniteMdp m = random_mdp(rng, 4, 2, 0.9);
      RewardTable r1 = random_reward(rng, 4, 2);
      RewardTable r2 = random_reward(rng, 4, 2);
      Grid probs(4, 2, 0.5);
      PolicyTable pi(std::move(probs));
      PolicyValue a = policy_evaluation(m, pi, r1);
      PolicyValue b = policy_evaluation(m, pi, r2);
      Grid sum(4, 2);
      for (std::size_t i = 0; i < sum.data().size(); ++i)
        sum.data()[i] = r1.values.data()[i] + r2.values.data()[i];
      PolicyValue ab = policy_evaluation(m, pi, RewardTable(std::move(sum)));
      for (int s = 0; s < 4; ++s)
        REQUIRE(ab.v.values[s] ==
                Catch::Approx(a.v.values[s] + b.v.values[s]).margin(1e-10));
    }
  }
}
