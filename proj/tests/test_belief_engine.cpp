#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "repgame/belief_engine.hpp"
#include "repgame/best_reply.hpp"
#include "repgame/errors.hpp"

using namespace repgame;

namespace {

Model pc_model(int K, double delta_bar, double pi0 = 0.1, ObservationMode mode = ObservationMode::counts) {
  ModelParams p;
  p.K = K;
  p.mode = mode;
  p.delta = delta_bar;
  p.pi0 = pi0;
  return make_model(product_choice(0.5, 1.0, 0.5), p);
}

// a' once every K periods: a' whenever the last K - 1 entries are all a*
oracle::Mixed once_per_cycle(const oracle::Window& w, int K, int n) {
  oracle::Mixed m(n, 0.0);
  bool fire = static_cast<int>(w.size()) >= K - 1;
  for (int i = static_cast<int>(w.size()) - (K - 1); fire && i < static_cast<int>(w.size()); ++i)
    if (w[i] != n - 1) fire = false;
  m[fire ? 0 : n - 1] = 1;
  return m;
}

Strategy1<double> table(const Model& m, const oracle::Lookup& f) {
  Strategy1<double> s(m.num_states());
  for (const auto& w : oracle::all_windows(m.n1(), m.K)) s[oracle::window_index(w, m.n1())] = f(w);
  return s;
}

Strategy1<double> random_strategy(const Model& m, std::mt19937_64& rng, bool pure) {
  std::uniform_real_distribution<double> u(0, 1);
  Strategy1<double> s(m.num_states(), std::vector<double>(m.n1()));
  for (auto& row : s) {
    if (pure) {
      row.assign(m.n1(), 0.0);
      row[rng() % m.n1()] = 1;
      continue;
    }
    double z = 0;
    for (double& x : row) z += (x = u(rng));
    for (double& x : row) x /= z;
  }
  return s;
}

Model random_model(std::mt19937_64& rng, int n, int K, double delta_bar) {
  StageGame g;
  for (int a = 0; a < n; ++a) g.actions1.push_back("a" + std::to_string(a));
  g.actions2 = {"N", "T"};
  g.payoff1.assign(n * 2, 0.0);
  g.payoff2.assign(n * 2, 0.0);
  for (int a = 0; a < n; ++a) {
    g.u1(a, 0) = -a;
    g.u1(a, 1) = 2 - 0.5 * a;
    g.u2(a, 1) = a;
  }
  ModelParams p;
  p.K = K;
  p.delta = delta_bar;
  p.pi0 = 0.2;
  (void)rng;
  return make_model(g, p);
}

std::vector<int> s_row(const Model& m, int k) {
  std::vector<int> out;
  for (int s : m.space.full_states())
    if (category(m.space.state(s), m.top(), m.K) == k) out.push_back(s);
  return out;
}

double residual_by_hand(const OccupationMeasure<double>& om, const std::vector<double>& mu) {
  double worst = 0;
  for (size_t j = 0; j < mu.size(); ++j) {
    double r = mu[j] - (1 - om.delta_bar) * om.p[j];
    for (size_t i = 0; i < mu.size(); ++i) r -= om.delta_bar * mu[i] * om.Q[i][j];
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace

TEST_CASE("always a* concentrates the occupation measure on the all-a* state") {
  auto m = pc_model(2, 0.9);
  auto om = stationary_occupation(m, constant_strategy(m, 1));
  for (size_t i = 0; i < om.states.size(); ++i)
    CHECK(om.mu[i] == doctest::Approx(om.states[i] == m.space.star() ? 1.0 : 0.0));
  CHECK(recursion_residual(om) <= 1e-12);
  auto f = flows(om, {m.space.star()});
  CHECK(f.inflow == 0.0);
  CHECK(f.outflow == 0.0);
}

TEST_CASE("a stationary p is its own occupation measure") {
  auto m = pc_model(3, 0.9);
  Strategy1<double> iid(m.num_states(), {0.3, 0.7});
  auto om = stationary_occupation(m, iid);
  for (size_t i = 0; i < om.mu.size(); ++i) CHECK(om.mu[i] == doctest::Approx(om.p[i]).epsilon(1e-12));
}

TEST_CASE("occupation matches the truncated series for the once-per-cycle strategy") {
  for (int K : {2, 3}) {
    for (double db : {0.9, 0.99}) {
      auto m = pc_model(K, db);
      oracle::Lookup f = [K](const oracle::Window& w) { return once_per_cycle(w, K, 2); };
      auto om = stationary_occupation(m, table(m, f));
      const int T = oracle::horizon_for(db);
      auto dist = oracle::forward(2, K, f, 0, {}, T + K);
      std::vector<double> mu(om.states.size(), 0.0);
      double w = 1 - db;
      for (int t = K; t <= T + K; ++t, w *= db)
        for (const auto& [win, p] : dist[t]) mu[om.position[oracle::window_index(win, 2)]] += w * p;
      for (size_t i = 0; i < mu.size(); ++i) CHECK(om.mu[i] == doctest::Approx(mu[i]).epsilon(1e-8));
      // support is the K-cycle of single-a' windows
      for (size_t i = 0; i < mu.size(); ++i)
        if (category(m.space.state(om.states[i]), 1, K) != 1) CHECK(om.mu[i] == 0.0);
      CHECK(recursion_residual(om) <= 1e-12);
    }
  }
}

TEST_CASE("recursion residual responds to perturbations") {
  auto m = pc_model(2, 0.9);
  std::mt19937_64 rng(1);
  auto om = stationary_occupation(m, random_strategy(m, rng, false));
  const double base = recursion_residual(om);
  CHECK(base <= 1e-10);
  CHECK(residual_by_hand(om, om.mu) == doctest::Approx(base).epsilon(1e-6));
  auto bumped = om;
  bumped.mu[1] += 1e-3;
  const double r = recursion_residual(bumped);
  CHECK(r == doctest::Approx(residual_by_hand(bumped, bumped.mu)).epsilon(1e-12));
  CHECK(r >= 1e-3 * (1 - om.delta_bar * om.Q[1][1]) - base);

  auto uniform = om;
  uniform.p = {0.7, 0.1, 0.1, 0.1};
  uniform.mu.assign(4, 0.25);
  CHECK(recursion_residual(uniform) > 1e-3);
  CHECK(recursion_residual(uniform) == doctest::Approx(residual_by_hand(uniform, uniform.mu)));
}

TEST_CASE("flows") {
  auto m = pc_model(2, 0.9);
  oracle::Lookup f = [](const oracle::Window& w) { return once_per_cycle(w, 2, 2); };
  auto om = stationary_occupation(m, table(m, f));
  auto everything = flows(om, m.space.full_states(), 1e-10, false);
  CHECK(everything.inflow == 0.0);
  CHECK(everything.outflow == 0.0);
  CHECK_THROWS_AS(flows(om, m.space.full_states()), FullSet);
  CHECK_THROWS_AS(flows(om, {}), EmptySubset);
  CHECK_THROWS_AS(flows(om, {m.space.empty()}), FormatError);

  auto s0 = flows(om, s_row(m, 0));
  CHECK(s0.bound == doctest::Approx(0.1 / 0.9));
  CHECK(s0.bound_holds);
  CHECK(std::abs(s0.inflow - s0.outflow) <= (1 - 0.9) / 0.9 + 1e-10);

  // (H,H) cannot reach (L,L) in one step
  CHECK(flow_between(om, {m.space.index({1, 1})}, {m.space.index({0, 0})}) == 0.0);
  CHECK_THROWS_AS(flow_between(om, s_row(m, 1), {m.space.index({0, 1})}), Overlap);

  const int star = m.space.star();
  const double mu_star = om.mu[om.position[star]];
  const double stay = om.mu[om.position[star]] * om.Q[om.position[star]][om.position[star]];
  CHECK(flow_between(om, s_row(m, 0), s_row(m, 1)) + stay == doctest::Approx(mu_star));
  CHECK(flow_between(om, s_row(m, 0), s_row(m, 1)) == doctest::Approx(mu_star * 1.0));

  // a strategy that visits s*: a' with probability 0.3 there, a* elsewhere
  Strategy1<double> mix = constant_strategy(m, 1);
  mix[star] = {0.3, 0.7};
  auto om2 = stationary_occupation(m, mix);
  const double mu2 = om2.mu[om2.position[star]];
  CHECK(mu2 > 0.5);
  CHECK(flow_between(om2, s_row(m, 0), s_row(m, 1)) == doctest::Approx(0.3 * mu2).epsilon(1e-12));
  CHECK(flow_between(om2, s_row(m, 0), s_row(m, 1)) + mu2 * om2.Q[om2.position[star]][om2.position[star]] ==
        doctest::Approx(mu2).epsilon(1e-12));
}

TEST_CASE("inflow and outflow stay within the bound on random subsets") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 2, K = 1 + trial % 3;
    const double db = trial % 4 < 2 ? 0.9 : 0.99;
    auto m = random_model(rng, n, K, db);
    auto om = stationary_occupation(m, random_strategy(m, rng, trial % 5 == 0));
    CHECK(recursion_residual(om) <= 1e-10);
    const auto& full = m.space.full_states();
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<int> sub;
      for (int s : full)
        if (rng() % 2) sub.push_back(s);
      if (sub.empty() || sub.size() == full.size()) continue;
      auto fr = flows(om, sub);
      CHECK(fr.bound_holds);
      CHECK(std::abs(fr.inflow - fr.outflow) <= (1 - db) / db + 1e-10);
    }
  }
}

TEST_CASE("posterior on the all-a* observation when both types play a*") {
  auto m = pc_model(2, 0.9);
  auto s = constant_strategy(m, 1);
  auto r = posterior(m, s, m.obs.of(m.space.star()));
  CHECK(r.action_belief[1] == doctest::Approx(1.0));
  CHECK(r.commitment_prob == doctest::Approx(0.1));
  auto empty = posterior(m, s, m.obs.of(m.space.empty()));
  CHECK(empty.commitment_prob == doctest::Approx(0.1));
  CHECK_THROWS_AS(posterior(m, s, m.obs.of(m.space.index({0, 0}))), ZeroProbabilityObservation);
}

TEST_CASE("belief about the position of the single a' under the once-per-cycle strategy") {
  for (int K : {2, 3, 4})
    for (double db : {0.9, 0.99}) {
      auto m = pc_model(K, db);
      oracle::Lookup f = [K](const oracle::Window& w) { return once_per_cycle(w, K, 2); };
      std::vector<int> oldest(K, 1);
      oldest[0] = 0;
      const int s_old = m.space.index(oldest);
      auto r = posterior(m, table(m, f), m.obs.of(s_old));
      double num = std::pow(db, K - 1), den = 0;
      for (int i = 0; i < K; ++i) den += std::pow(db, i);
      double got = 0;
      for (const auto& [s, p] : r.state_belief)
        if (s == s_old) got = p;
      CHECK(got == doctest::Approx(num / den).epsilon(1e-12));
      CHECK(r.commitment_prob == 0.0);
      if (K == 2 && db == 0.9) CHECK(got == doctest::Approx(0.9 / 1.9).epsilon(1e-12));
    }
}

TEST_CASE("posterior matches the truncated joint-distribution oracle") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 24; ++trial) {
    const int n = 2 + trial % 2, K = 1 + (trial / 2) % 3;
    const bool seq = trial % 6 == 5;
    const double eps = trial % 4 == 3 ? 0.1 : 0.0;
    ModelParams p;
    p.K = K;
    p.delta = 0.9;
    p.pi0 = 0.3;
    p.epsilon = eps;
    p.mode = seq ? ObservationMode::sequence : ObservationMode::counts;
    auto m = make_model(random_model(rng, n, K, 0.9).game, p);
    auto s = random_strategy(m, rng, trial % 3 == 0);
    oracle::Lookup f = [&](const oracle::Window& w) { return s[oracle::window_index(w, n)]; };
    std::vector<int> cell_of(n);
    for (int a = 0; a < n; ++a) cell_of[a] = a;
    auto ref = oracle::posteriors(n, K, f, eps, {}, 0.9, 0.3, cell_of, seq);
    auto w = joint_weights(m, s);
    int checked = 0;
    for (int o = 0; o < m.num_observations(); ++o) {
      const auto& win = m.space.history(m.obs.states(o).front());
      auto it = ref.find(oracle::obs_key(win, K, cell_of, seq));
      const bool on = it != ref.end() && it->second.mass > 0;
      CHECK(observation_reached(m, w, o) == on);
      if (!on) continue;
      auto r = posterior(m, s, w, o);
      CHECK(r.mass == doctest::Approx(it->second.mass).epsilon(1e-9));
      CHECK(r.commitment_prob == doctest::Approx(it->second.commitment).epsilon(1e-8));
      for (int a = 0; a < n; ++a) CHECK(r.action_belief[a] == doctest::Approx(it->second.action[a]).epsilon(1e-8));
      ++checked;
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("no-back-loop strategies keep the all-a* posterior near a*") {
  std::mt19937_64 rng(5);
  int tested = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int K = 1 + trial % 3;
    const double db = trial % 2 ? 0.9 : 0.99, pi0 = 0.2;
    auto m = pc_model(K, db, pi0);
    CanonicalStrategy pure(m.num_states());
    for (int& a : pure) a = static_cast<int>(rng() % 2);
    if (detect_back_loop(m, pure)) continue;
    auto s = to_mixed(m, pure);
    auto r = posterior(m, s, m.obs.of(m.space.star()));
    CHECK(1 - r.action_belief[1] <= (1 - db) * (1 - pi0) / pi0 + 1e-12);
    ++tested;
  }
  CHECK(tested > 50);
}

TEST_CASE("commitment occupation closed form") {
  auto m = pc_model(3, 0.9);
  auto nu = commitment_occupation(m);
  CHECK(nu[m.space.empty()] == doctest::Approx(0.1));
  CHECK(nu[m.space.index({1})] == doctest::Approx(0.09));
  CHECK(nu[m.space.index({1, 1})] == doctest::Approx(0.081));
  CHECK(nu[m.space.star()] == doctest::Approx(0.729));
  auto nu2 = discounted_occupation(m, constant_strategy(m, 1));
  for (size_t i = 0; i < nu.size(); ++i) CHECK(nu[i] == doctest::Approx(nu2[i]).epsilon(1e-12));
}

TEST_CASE("exact occupation in rational arithmetic") {
  ExactStageGame g = product_choice<Rational>(Rational(1, 2), Rational(1), Rational(1, 2));
  ModelParams p;
  p.K = 2;
  p.delta = 0.9;
  p.pi0 = 0.1;
  auto m = make_model(g, p, Tolerance::exact());
  CHECK(m.delta_bar == Rational(9, 10));
  Strategy1<Rational> s(m.num_states());
  for (const auto& w : oracle::all_windows(2, 2)) {
    auto d = once_per_cycle(w, 2, 2);
    s[oracle::window_index(w, 2)] = {Rational(static_cast<int>(d[0])), Rational(static_cast<int>(d[1]))};
  }
  auto om = stationary_occupation(m, s);
  CHECK(recursion_residual(om) == Rational(0));
  auto r = posterior(m, s, m.obs.of(m.space.index({0, 1})));
  for (const auto& [st, pr] : r.state_belief)
    if (st == m.space.index({0, 1})) CHECK(pr == Rational(9, 19));
}

TEST_CASE("block diagnostics") {
  auto m = pc_model(3, 0.99);
  oracle::Lookup f = [](const oracle::Window& w) { return once_per_cycle(w, 3, 2); };
  auto om = stationary_occupation(m, table(m, f));
  auto d = block_diagnostics(m, om, 2.0, 2.0);
  REQUIRE_FALSE(d.empty());
  const double db = 0.99, z = 1 + db + db * db;
  for (const auto& b : d) {
    CHECK(b.category >= 1);
    if (b.category != 1) {
      CHECK(b.mass == 0.0);
      continue;
    }
    // the single-a' block carries all the mass and has no flow to or from S0
    CHECK(b.mass == doctest::Approx(1.0));
    CHECK(b.flow_to_lower == 0.0);
    CHECK(b.flow_from_lower == 0.0);
    CHECK(b.hypothesis);
    CHECK_FALSE(b.mass_small);
    // S* side (H,H,L), (H,L,H) stays in the block; the S' side (L,H,H) moves to (H,H,L)
    CHECK(b.odds_numerator == doctest::Approx((1 + db) / z).epsilon(1e-9));
    CHECK(b.odds_denominator == doctest::Approx(db * db / z).epsilon(1e-9));
    CHECK_FALSE(b.odds_below);
  }
}
