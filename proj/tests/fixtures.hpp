#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mdplab/dp.hpp"
#include "mdplab/mdp.hpp"

namespace mdplab::testing {

// Degenerate branch fixture: s0 -a0-> sL, s0 -a1-> sR, both funnel into an
// absorbing terminal. Reward 1 on both branch actions, 0 elsewhere, so the
// optimal set at s0 is the exact tie {a0, a1}.
inline FiniteMdp two_path_mdp(double gamma = 0.9) {
  MdpBuilder b(4, 2, gamma);
  b.add(0, 0, 1, 1.0);
  b.add(0, 1, 2, 1.0);
  b.chain(1, 3);
  b.chain(2, 3);
  b.absorbing(3);
  return b.build();
}

inline RewardTable two_path_reward() {
  Grid r(4, 2, 0.0);
  r(0, 0) = 1.0;
  r(0, 1) = 1.0;
  return RewardTable(std::move(r));
}

// Three-action variant with a strictly suboptimal third action (value 0.5).
inline FiniteMdp two_path3_mdp(double gamma = 0.9) {
  MdpBuilder b(4, 3, gamma);
  b.add(0, 0, 1, 1.0);
  b.add(0, 1, 2, 1.0);
  b.add(0, 2, 3, 1.0);
  b.chain(1, 3);
  b.chain(2, 3);
  b.absorbing(3);
  return b.build();
}

inline RewardTable two_path3_reward() {
  Grid r(4, 3, 0.0);
  r(0, 0) = 1.0;
  r(0, 1) = 1.0;
  r(0, 2) = 0.5;
  return RewardTable(std::move(r));
}

inline FiniteMdp single_absorbing_mdp(double gamma) {
  MdpBuilder b(1, 1, gamma);
  b.absorbing(0);
  return b.build();
}

// Platform-stable uniform double in [lo, hi) from raw 64-bit draws.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

inline FiniteMdp random_mdp(std::mt19937_64& rng, int n_states, int n_actions, double gamma) {
  std::vector<double> t(static_cast<std::size_t>(n_states) * n_actions * n_states);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      double sum = 0.0;
      std::vector<double> row(n_states);
      for (int s2 = 0; s2 < n_states; ++s2) {
        row[s2] = uniform(rng, 0.01, 1.0);
        sum += row[s2];
      }
      // Renormalize so the row sums to 1 exactly enough for validation.
      double acc = 0.0;
      for (int s2 = 0; s2 < n_states; ++s2) {
        row[s2] /= sum;
        acc += row[s2];
      }
      row[n_states - 1] += 1.0 - acc;
      for (int s2 = 0; s2 < n_states; ++s2)
        t[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2] = row[s2];
    }
  }
  return FiniteMdp(n_states, n_actions, std::move(t), gamma);
}

inline RewardTable random_reward(std::mt19937_64& rng, int n_states, int n_actions,
                                 double magnitude = 1.0) {
  Grid r(n_states, n_actions);
  for (double& v : r.data()) v = uniform(rng, -magnitude, magnitude);
  return RewardTable(std::move(r));
}

inline QTable random_q(std::mt19937_64& rng, int n_states, int n_actions,
                       double magnitude = 1.0) {
  Grid q(n_states, n_actions);
  for (double& v : q.data()) v = uniform(rng, -magnitude, magnitude);
  return QTable(std::move(q));
}

}  // namespace mdplab::testing
