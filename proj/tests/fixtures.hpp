#pragma once

#include <random>
#include <string>
#include <vector>

#include "repgame/model.hpp"
#include "repgame/stage_game.hpp"

namespace fixtures {

// Random game with u1 decreasing in a, increasing in b, strictly supermodular, and single-peaked
// consumer payoffs u2(a, b) = -(pos_b - peak_a)^2 + row_a with increasing peaks.
inline repgame::StageGame random_msm_game(std::mt19937_64& rng, int n1, int n2) {
  std::uniform_real_distribution<double> u(0, 1);
  repgame::StageGame g;
  for (int a = 0; a < n1; ++a) g.actions1.push_back("a" + std::to_string(a));
  for (int b = 0; b < n2; ++b) g.actions2.push_back("b" + std::to_string(b));
  g.payoff1.assign(n1 * n2, 0.0);
  g.payoff2.assign(n1 * n2, 0.0);
  const double lambda = 0.2 + u(rng);
  std::vector<double> beta(n2), gamma(n1), pos(n2), peak(n1), row(n1);
  double acc = 0;
  for (int b = 0; b < n2; ++b) {
    acc += 0.3 + u(rng);
    beta[b] = acc;
    pos[b] = b + 0.4 * (u(rng) - 0.5);
  }
  acc = 0;
  for (int a = 0; a < n1; ++a) {
    if (a) acc += lambda * (n2 - 1) + 0.1 + u(rng);
    gamma[a] = acc;
    row[a] = u(rng);
  }
  // peaks spread across the consumer actions so the lowest and highest actions both get used
  for (int a = 0; a < n1; ++a) peak[a] = (n2 - 1) * (a + 0.3 * u(rng)) / (n1 - 1 + 0.3);
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n2; ++b) {
      g.u1(a, b) = beta[b] - gamma[a] + lambda * a * b;
      g.u2(a, b) = -(pos[b] - peak[a]) * (pos[b] - peak[a]) + row[a];
    }
  g.check();
  return g;
}

inline std::vector<double> random_mixture(std::mt19937_64& rng, int n, const std::vector<int>& support) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> out(n, 0.0);
  if (support.size() == 1 || rng() % 3 == 0) {
    out[support[rng() % support.size()]] = 1;
    return out;
  }
  double z = 0;
  for (int b : support) z += (out[b] = u(rng));
  for (double& x : out) x /= z;
  return out;
}

// Per-observation mixtures drawn from the recorded best-reply sets, so every value lies in B*.
inline repgame::ConsumerPolicy<double> random_bstar_policy(const repgame::Model& m,
                                                           const std::vector<std::vector<int>>& sets,
                                                           std::mt19937_64& rng) {
  repgame::ConsumerPolicy<double> out(m.num_observations());
  for (auto& row : out) row = random_mixture(rng, m.n2(), sets[rng() % sets.size()]);
  return out;
}

}  // namespace fixtures
