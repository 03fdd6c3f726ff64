#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "mdplab/dp.hpp"
#include "mdplab/perturb.hpp"
#include "mdplab/soft.hpp"

using namespace mdplab;
using mdplab::testing::random_mdp;
using mdplab::testing::random_reward;
using mdplab::testing::single_absorbing_mdp;
using mdplab::testing::two_path_mdp;
using mdplab::testing::two_path_reward;
using mdplab::testing::uniform;

TEST_CASE("Temperature must be positive", "[soft_policy]") {
  REQUIRE_THROWS_AS(Temperature(0.0), ArgumentError);
  REQUIRE_THROWS_AS(Temperature(-1.0), ArgumentError);
  REQUIRE(Temperature(0.5).alpha == 0.5);
}

TEST_CASE("soft_bellman_backup", "[soft_policy]") {
  SECTION("gamma zero collapses to the reward") {
    FiniteMdp mdp = two_path_mdp(0.0);
    RewardTable r = two_path_reward();
    SoftQTable q(Grid(4, 2, 0.0), Temperature(1.0));
    SoftQTable out = soft_bellman_backup(q, r, mdp);
    REQUIRE(out.values == r.values);
  }

  SECTION("soft maximum of (1, 0) at alpha 1 is log(e + 1)") {
    // Single state feeding itself; the backup then adds gamma * softmax term.
    FiniteMdp mdp = [] {
      MdpBuilder b(1, 2, 0.5);
      b.absorbing(0);
      return b.build();
    }();
    Grid g(1, 2, 0.0);
    g(0, 0) = 1.0;
    SoftQTable q(std::move(g), Temperature(1.0));
    RewardTable zero(Grid(1, 2, 0.0));
    SoftQTable out = soft_bellman_backup(q, zero, mdp);
    const double expected = 0.5 * std::log(std::exp(1.0) + 1.0);
    REQUIRE(out.values(0, 0) == Catch::Approx(expected).margin(1e-12));
    REQUIRE(out.values(0, 0) == Catch::Approx(0.5 * 1.313262).margin(1e-6));
  }

  SECTION("small alpha approaches the hard backup") {
    std::mt19937_64 rng(71);
    FiniteMdp mdp = random_mdp(rng, 4, 3, 0.9);
    RewardTable r = random_reward(rng, 4, 3);
    QTable q(Grid(4, 3, 0.0));
    Grid seed(4, 3);
    for (double& v : seed.data()) v = uniform(rng, -2.0, 2.0);
    q.values = seed;
    SoftQTable sq(seed, Temperature(1e-6));
    QTable hard = bellman_backup(q, r, mdp);
    SoftQTable soft = soft_bellman_backup(sq, r, mdp);
    REQUIRE(sup_diff(hard.values, soft.values) < 1e-4);
  }

  SECTION("large magnitudes do not overflow") {
    FiniteMdp mdp = single_absorbing_mdp(0.5);
    Grid g(1, 1, 1e6);
    SoftQTable q(std::move(g), Temperature(1e-6));
    RewardTable r(Grid(1, 1, 0.0));
    SoftQTable out = soft_bellman_backup(q, r, mdp);
    REQUIRE(std::isfinite(out.values(0, 0)));
    REQUIRE(out.values(0, 0) == Catch::Approx(0.5 * 1e6).margin(1e-3));
  }
}

TEST_CASE("solve_soft_q", "[soft_policy]") {
  SECTION("gamma zero equals the reward") {
    std::mt19937_64 rng(73);
    FiniteMdp mdp = random_mdp(rng, 3, 2, 0.0);
    RewardTable r = random_reward(rng, 3, 2);
    SoftQTable q = solve_soft_q(mdp, r, Temperature(1.0));
    REQUIRE(q.values == r.values);
  }

  SECTION("one-state two-action with gamma zero") {
    MdpBuilder b(1, 2, 0.0);
    b.absorbing(0);
    FiniteMdp mdp = b.build();
    Grid r(1, 2, 0.0);
    r(0, 0) = 1.0;
    SoftQTable q = solve_soft_q(mdp, RewardTable(std::move(r)), Temperature(1.0));
    REQUIRE(q.values(0, 0) == 1.0);
    REQUIRE(q.values(0, 1) == 0.0);
  }

  SECTION("successive residuals contract with modulus gamma") {
    std::mt19937_64 rng(79);
    FiniteMdp mdp = random_mdp(rng, 4, 3, 0.9);
    RewardTable r = random_reward(rng, 4, 3);
    SoftQTable q(Grid(4, 3, 0.0), Temperature(0.5));
    double prev = -1.0;
    for (int it = 0; it < 60; ++it) {
      SoftQTable next = soft_bellman_backup(q, r, mdp);
      double residual = sup_diff(next.values, q.values);
      if (prev >= 1e-6) REQUIRE(residual <= 0.9 * prev + 1e-10);
      prev = residual;
      q = std::move(next);
    }
  }

  SECTION("alpha limit closes in on the hard fixed point monotonically") {
    std::mt19937_64 rng(83);
    FiniteMdp mdp = random_mdp(rng, 4, 3, 0.9);
    RewardTable r = random_reward(rng, 4, 3);
    QTable hard = solve_q_star(mdp, r);
    double prev = std::numeric_limits<double>::infinity();
    for (double alpha : {1.0, 0.1, 0.01, 0.001}) {
      SoftQTable soft = solve_soft_q(mdp, r, Temperature(alpha));
      double gap = sup_diff(soft.values, hard.values);
      REQUIRE(gap <= alpha * std::log(3.0) / (1.0 - 0.9) + 1e-8);
      REQUIRE(gap <= prev + 1e-12);
      prev = gap;
    }
  }
}

TEST_CASE("boltzmann_policy", "[soft_policy]") {
  SECTION("tied values split evenly at any temperature") {
    Grid g(1, 2, 1.0);
    PolicyTable p = boltzmann_policy(SoftQTable(std::move(g), Temperature(0.37)));
    REQUIRE(p.probs(0, 0) == 0.5);
    REQUIRE(p.probs(0, 1) == 0.5);
  }

  SECTION("logistic closed form at alpha 1") {
    Grid g(1, 2, 0.0);
    g(0, 0) = 1.0;
    PolicyTable p = boltzmann_policy(SoftQTable(std::move(g), Temperature(1.0)));
    REQUIRE(p.probs(0, 0) == Catch::Approx(0.731059).margin(1e-6));
    REQUIRE(p.probs(0, 1) == Catch::Approx(0.268941).margin(1e-6));
  }

  SECTION("sharp temperature concentrates the mass") {
    Grid g(1, 2, 0.0);
    g(0, 0) = 1.0;
    PolicyTable p = boltzmann_policy(SoftQTable(std::move(g), Temperature(0.01)));
    REQUIRE(p.probs(0, 0) >= 1.0 - 1e-9);
  }

  SECTION("rows are normalized") {
    std::mt19937_64 rng(89);
    Grid g(5, 4);
    for (double& v : g.data()) v = uniform(rng, -3.0, 3.0);
    PolicyTable p = boltzmann_policy(SoftQTable(std::move(g), Temperature(0.3)));
    for (int s = 0; s < 5; ++s) {
      double sum = 0.0;
      for (int a = 0; a < 4; ++a) sum += p.probs(s, a);
      REQUIRE(std::abs(sum - 1.0) <= 1e-12);
    }
  }

  SECTION("adding a constant to a row changes nothing") {
    std::mt19937_64 rng(97);
    Grid g(1, 4);
    for (double& v : g.data()) v = uniform(rng, -2.0, 2.0);
    Grid shifted = g;
    for (double& v : shifted.data()) v += 3.25;
    PolicyTable a = boltzmann_policy(SoftQTable(std::move(g), Temperature(0.7)));
    PolicyTable b = boltzmann_policy(SoftQTable(std::move(shifted), Temperature(0.7)));
    REQUIRE(sup_diff(a.probs, b.probs) <= 1e-12);
  }

  SECTION("permuting action labels and permuting back is a no-op") {
    std::mt19937_64 rng(101);
    FiniteMdp mdp = random_mdp(rng, 3, 2, 0.9);
    RewardTable r = random_reward(rng, 3, 2);
    PolicyTable p = boltzmann_policy(solve_soft_q(mdp, r, Temperature(0.5)));

    // Swap the two action labels everywhere, solve, swap back.
    std::vector<double> t(3 * 2 * 3);
    for (int s = 0; s < 3; ++s)
      for (int a = 0; a < 2; ++a)
        for (int s2 = 0; s2 < 3; ++s2)
          t[(static_cast<std::size_t>(s) * 2 + (1 - a)) * 3 + s2] = mdp.p(s, a, s2);
    FiniteMdp swapped(3, 2, std::move(t), 0.9);
    Grid rs(3, 2);
    for (int s = 0; s < 3; ++s)
      for (int a = 0; a < 2; ++a) rs(s, 1 - a) = r.values(s, a);
    PolicyTable ps = boltzmann_policy(solve_soft_q(swapped, RewardTable(std::move(rs)),
                                                   Temperature(0.5)));
    for (int s = 0; s < 3; ++s)
      for (int a = 0; a < 2; ++a) REQUIRE(p.probs(s, a) == ps.probs(s, 1 - a));
  }
}

TEST_CASE("softmax_l1_bound_report", "[soft_policy]") {
  SECTION("identical vectors have zero gap") {
    std::vector<double> x = {1.0, 2.0, 3.0};
    SoftmaxL1Report rep = softmax_l1_bound_report(x, x, Temperature(1.0));
    REQUIRE(rep.l1 == 0.0);
    REQUIRE(rep.holds);
  }

  SECTION("antisymmetric pair near the tie saturates the bound") {
    const double t = 5e-4;
    std::vector<double> x = {t, -t};
    std::vector<double> y = {-t, t};
    SoftmaxL1Report rep = softmax_l1_bound_report(x, y, Temperature(1.0));
    REQUIRE(rep.holds);
    REQUIRE(rep.l1 / rep.bound >= 0.99);
  }

  SECTION("randomized vectors always satisfy the bound") {
    std::mt19937_64 rng(103);
    for (double alpha : {0.1, 1.0, 10.0}) {
      for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> x(8), y(8);
        for (int i = 0; i < 8; ++i) {
          x[i] = uniform(rng, -4.0, 4.0);
          y[i] = uniform(rng, -4.0, 4.0);
        }
        SoftmaxL1Report rep = softmax_l1_bound_report(x, y, Temperature(alpha));
        REQUIRE(rep.holds);
      }
    }
  }

  SECTION("length mismatch throws") {
    std::vector<double> x = {1.0, 2.0};
    std::vector<double> y = {1.0};
    REQUIRE_THROWS_AS(softmax_l1_bound_report(x, y, Temperature(1.0)), DimensionError);
  }
}

TEST_CASE("soft_policy_stability_report", "[soft_policy]") {
  FiniteMdp mdp = two_path_mdp();
  RewardTable r0 = two_path_reward();

  SECTION("identical rewards give zero TV") {
    SoftStabilityReport rep = soft_policy_stability_report(mdp, r0, r0, Temperature(1.0));
    REQUIRE(rep.max_tv == 0.0);
    REQUIRE(rep.holds);
  }

  SECTION("tie-broken perturbation stays inside a shrinking bound") {
    double prev_bound = std::numeric_limits<double>::infinity();
    for (double eps : {0.19, 0.095, 0.0475}) {
      RewardTable r1 = tie_breaker(mdp, r0, 0, 0, 1, eps);
      SoftStabilityReport rep = soft_policy_stability_report(mdp, r0, r1, Temperature(1.0));
      REQUIRE(rep.holds);
      REQUIRE(rep.bound <= 0.95 + 1e-12);
      REQUIRE(rep.bound <= 0.55 * prev_bound + 1e-12);  // roughly halves
      prev_bound = rep.bound;
    }
  }

  SECTION("bound scales with 1/alpha on a fixed perturbation") {
    RewardTable r1 = tie_breaker(mdp, r0, 0, 0, 1, 0.19);
    SoftStabilityReport a1 = soft_policy_stability_report(mdp, r0, r1, Temperature(1.0));
    SoftStabilityReport a2 = soft_policy_stability_report(mdp, r0, r1, Temperature(2.0));
    REQUIRE(a1.bound == Catch::Approx(2.0 * a2.bound).margin(1e-12));
  }

  SECTION("random draws satisfy the global bound") {
    std::mt19937_64 rng(107);
    for (double alpha : {0.1, 1.0}) {
      for (int trial = 0; trial < 100; ++trial) {
        FiniteMdp m = random_mdp(rng, 4, 3, 0.9);
        RewardTable r1 = random_reward(rng, 4, 3);
        RewardTable r2 = random_reward(rng, 4, 3);
        SoftStabilityReport rep = soft_policy_stability_report(m, r1, r2, Temperature(alpha));
        REQUIRE(rep.holds);
      }
    }
  }
}

TEST_CASE("kl_objective", "[soft_policy]") {
  FiniteMdp mdp = two_path_mdp();
  RewardTable r = two_path_reward();
  std::vector<double> mu = {1.0, 0.0, 0.0, 0.0};

  Grid uniform_probs(4, 2, 0.5);
  PolicyTable pi(uniform_probs);

  SECTION("beta zero reduces to the policy value") {
    Grid base_probs(4, 2, 0.5);
    PolicyTable base(std::move(base_probs));
    double j = kl_objective(mdp, r, pi, base, 0.0, mu);
    PolicyValue pv = policy_evaluation(mdp, pi, r);
    REQUIRE(j == Catch::Approx(pv.v.values[0]).margin(1e-12));
  }

  SECTION("policy equal to base pays no penalty") {
    PolicyTable base = pi;
    double j0 = kl_objective(mdp, r, pi, base, 0.0, mu);
    double j5 = kl_objective(mdp, r, pi, base, 5.0, mu);
    REQUIRE(j0 == Catch::Approx(j5).margin(1e-12));
  }

  SECTION("zero-support base is a hard error") {
    Grid base_probs(4, 2, 0.5);
    base_probs(0, 0) = 1.0;
    base_probs(0, 1) = 0.0;  // pi puts mass on action 1 here
    PolicyTable base(std::move(base_probs));
    REQUIRE_THROWS_AS(kl_objective(mdp, r, pi, base, 1.0, mu), SupportViolationError);
  }

  SECTION("penalty lowers the objective for a diverging policy") {
    Grid base_probs(4, 2, 0.0);
    for (int s = 0; s < 4; ++s) {
      base_probs(s, 0) = 0.9;
      base_probs(s, 1) = 0.1;
    }
    PolicyTable base(std::move(base_probs));
    double j0 = kl_objective(mdp, r, pi, base, 0.0, mu);
    double j1 = kl_objective(mdp, r, pi, base, 1.0, mu);
    REQUIRE(j1 < j0);
  }
}
