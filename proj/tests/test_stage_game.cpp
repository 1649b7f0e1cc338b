#include <cmath>
#include <random>

#include "doctest.h"
#include "repgame/errors.hpp"
#include "repgame/stage_game.hpp"

using namespace repgame;

namespace {

StageGame make_game(std::vector<std::string> a1, std::vector<std::string> a2, std::vector<double> u1,
                    std::vector<double> u2) {
  StageGame g;
  g.actions1 = std::move(a1);
  g.actions2 = std::move(a2);
  g.payoff1 = std::move(u1);
  g.payoff2 = std::move(u2);
  g.check();
  return g;
}

// 2x3 game with single-peaked consumer preferences: b1, b2, b3 best in turn as the weight on H rises.
StageGame single_peaked() {
  return make_game({"L", "H"}, {"b1", "b2", "b3"}, {2, 3, 4, 0, 1.5, 3}, {2, 1.5, 0, 0, 1.5, 2});
}

int ceil_ratio(int num, int den) { return (num + den - 1) / den; }

}  // namespace

TEST_CASE("product choice payoffs") {
  auto g = product_choice(0.5, 1.0, 0.5);
  CHECK(g.actions1 == std::vector<std::string>{"L", "H"});
  CHECK(g.actions2 == std::vector<std::string>{"N", "T"});
  CHECK(g.u1(1, 1) == 1.0);
  CHECK(g.u1(0, 1) == 1.5);
  CHECK(g.u1(1, 0) == -1.0);
  CHECK(g.u1(0, 0) == 0.0);
  CHECK(g.u2(0, 1) == -0.5);
  CHECK(g.u2(1, 0) == 0.5);
}

TEST_CASE("game validation rejects malformed input") {
  StageGame g;
  g.actions1 = {"L"};
  g.actions2 = {"N", "T"};
  g.payoff1 = {0, 1};
  g.payoff2 = {0, 1};
  CHECK_THROWS_AS(g.check(), FormatError);
  auto h = product_choice(0.5, 1.0, 0.5);
  h.payoff2.pop_back();
  CHECK_THROWS_AS(h.check(), FormatError);
}

TEST_CASE("validate_msm") {
  auto ok = validate_msm(product_choice(0.5, 1.0, 0.5));
  CHECK(ok.ok());
  CHECK(ok.u1_differences_witnesses.empty());

  auto tie = validate_msm(product_choice(1.0, 1.0, 0.5));
  CHECK_FALSE(tie.u1_increasing_differences);
  CHECK(tie.decreasing_in_a);
  CHECK(tie.increasing_in_b);
  CHECK(tie.u2_increasing_differences);

  auto g = product_choice(3.0, 1.0, 0.5);
  // differences in a at T and at N, computed straight from the matrix
  const double at_T = g.u1(1, 1) - g.u1(0, 1);
  const double at_N = g.u1(1, 0) - g.u1(0, 0);
  CHECK_FALSE(at_T > at_N);
  auto sub = validate_msm(g);
  CHECK_FALSE(sub.u1_increasing_differences);
  REQUIRE(sub.u1_differences_witnesses.size() == 1);
  CHECK(sub.u1_differences_witnesses[0] == std::pair<int, int>{0, 0});
}

TEST_CASE("msm flags agree with witness lists") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p1(6), p2(6);
    for (auto& x : p1) x = u(rng);
    for (auto& x : p2) x = u(rng);
    auto g = make_game({"a", "b"}, {"x", "y", "z"}, p1, p2);
    auto r = validate_msm(g);
    CHECK(r.decreasing_in_a == r.decreasing_in_a_witnesses.empty());
    CHECK(r.increasing_in_b == r.increasing_in_b_witnesses.empty());
    CHECK(r.u1_increasing_differences == r.u1_differences_witnesses.empty());
    CHECK(r.u2_increasing_differences == r.u2_differences_witnesses.empty());
  }
}

TEST_CASE("pure best replies") {
  auto g = product_choice(0.5, 1.0, 0.5);
  CHECK(pure_best_replies(g, std::vector<double>{0, 1}) == std::vector<int>{1});
  CHECK(pure_best_replies(g, std::vector<double>{0.5, 0.5}) == std::vector<int>{0, 1});
  CHECK(pure_best_replies(g, std::vector<double>{1, 0}) == std::vector<int>{0});
  auto dom = make_game({"L", "H"}, {"N", "T"}, {0, 1, -1, 1}, {0, 1, 0, 1});
  CHECK(pure_best_replies(dom, std::vector<double>{1, 0}) == std::vector<int>{1});
  CHECK(lowest_best_reply(g, std::vector<double>{0, 1}) == 1);
  CHECK(lowest_best_reply(g, std::vector<double>{1, 0}) == 0);
  CHECK(b_star(g) == 1);
  CHECK(b_low(g) == 0);
}

TEST_CASE("best replies shift up with the mixed action in msm games") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  const std::vector<StageGame> games = {product_choice(0.5, 1.0, 0.5), product_choice(0.2, 0.9, 0.7),
                                        single_peaked()};
  for (const auto& g : games) {
    REQUIRE(validate_msm(g).ok());
    for (int trial = 0; trial < 500; ++trial) {
      double w1 = u(rng), w2 = u(rng);
      if (w1 > w2) std::swap(w1, w2);
      auto lo = pure_best_replies(g, std::vector<double>{1 - w1, w1});
      auto hi = pure_best_replies(g, std::vector<double>{1 - w2, w2});
      CHECK(lo.front() <= hi.front());
      CHECK(lo.back() <= hi.back());
    }
  }
}

TEST_CASE("fosd chain") {
  CHECK(check_fosd_chain(product_choice(0.5, 1.0, 0.5)).ranked);
  auto sp = check_fosd_chain(single_peaked());
  CHECK(sp.ranked);
  CHECK_FALSE(sp.mesh_too_coarse);

  // b2 is never a best reply while 0.5 b1 + 0.5 b3 is one. Every mixed best reply then has support in
  // {b1, b3}, and two such mixtures are always ranked.
  auto chord = make_game({"L", "H"}, {"b1", "b2", "b3"}, {1, 2, 3, 0, 1, 2}, {1, 0, 0, 0, 0, 1});
  for (double w = 0; w <= 1.0; w += 0.01) {
    auto br = pure_best_replies(chord, std::vector<double>{1 - w, w});
    CHECK(std::find(br.begin(), br.end(), 1) == br.end());
  }
  CHECK(pure_best_replies(chord, std::vector<double>{0.5, 0.5}) == std::vector<int>{0, 2});
  CHECK(check_fosd_chain(chord).ranked);

  // best replies run b2, b1, b3 as the weight on H rises
  auto zigzag = make_game({"L", "H"}, {"b1", "b2", "b3"}, {1, 2, 3, 0, 1, 2}, {1.5, 2, 0, 1.5, 0, 2});
  auto z = check_fosd_chain(zigzag);
  CHECK_FALSE(z.ranked);
  REQUIRE(z.beta.size() == 3);
  REQUIRE(z.beta_prime.size() == 3);
  CHECK_FALSE(fosd_geq(z.beta, z.beta_prime));
  CHECK_FALSE(fosd_geq(z.beta_prime, z.beta));
}

TEST_CASE("fosd order") {
  CHECK(fosd_geq({0, 0, 1}, {1, 0, 0}));
  CHECK_FALSE(fosd_geq({1, 0, 0}, {0, 0, 1}));
  CHECK(fosd_geq({0.5, 0, 0.5}, {0.5, 0.5, 0}));
  CHECK_FALSE(fosd_geq({0.5, 0, 0.5}, {0, 1, 0}));
  CHECK_FALSE(fosd_geq({0, 1, 0}, {0.5, 0, 0.5}));
}

TEST_CASE("optimal pure commitment") {
  CHECK(is_optimal_pure_commitment(product_choice(0.5, 1.0, 0.5)));
  // u1(L, N) equals u1(H, T)
  auto tie = make_game({"L", "H"}, {"N", "T"}, {1, 2, 0, 1}, {0, -0.5, 0.5, 1});
  CHECK_FALSE(is_optimal_pure_commitment(tie));
  // x > 1 makes N the reply to H, so b* = N and u1(H, N) = -1 < u1(L, N) = 0
  auto g = product_choice(0.5, 1.0, 1.5);
  CHECK(pure_best_replies(g, std::vector<double>{0, 1}) == std::vector<int>{0});
  CHECK(pure_best_replies(g, std::vector<double>{1, 0}) == std::vector<int>{0});
  CHECK_FALSE(is_optimal_pure_commitment(g));
}

TEST_CASE("cutoff matches the closed form in the product choice game") {
  for (int tenths : {3, 5, 6, 8, 9}) {
    const double x = tenths / 10.0;
    const int expected = ceil_ratio(10, 10 - tenths);
    CHECK(cutoff_K(product_choice(0.5, 1.0, x)) == expected);
    ExactStageGame eg = product_choice<Rational>(Rational(1, 2), Rational(1), Rational(tenths, 10));
    CHECK(cutoff_K(eg, Tolerance::exact()) == expected);
  }
  auto r = cutoff_report(product_choice(0.5, 1.0, 0.5));
  CHECK(r.weak == 2);
  CHECK(r.strict == 3);
  CHECK(r.deviation_action == 0);
  CHECK(cutoff_K(product_choice(0.5, 1.0, 1.5)) == 1);
}

TEST_CASE("eta star") {
  CHECK(eta_star(product_choice(0.5, 1.0, 0.5)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(eta_star(product_choice(0.5, 1.0, 0.8)) == doctest::Approx(0.2).epsilon(1e-12));
  auto dom = make_game({"L", "H"}, {"N", "T"}, {0, 1.5, -1, 1}, {0, 1, 0, 1});
  CHECK(eta_star(dom) == 1.0);
  ExactStageGame eg = product_choice<Rational>(Rational(1, 2), Rational(1), Rational(4, 5));
  CHECK(eta_star(eg, Tolerance::exact()) == Rational(1, 5));
}

TEST_CASE("cutoff and eta properties") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int trial = 0; trial < 300; ++trial) {
    const double cn = u(rng) + 0.5, ct = u(rng) * cn, x = u(rng);
    auto g = product_choice(ct, cn, x);
    if (!is_optimal_pure_commitment(g)) continue;
    const int k = cutoff_K(g);
    CHECK(k >= 2);
    const double eta = eta_star(g);
    CHECK(eta >= 1.0 / k - 1e-10);
    CHECK(eta < 1.0 / (k - 1) + 1e-10);
  }
}

TEST_CASE("delta lower") {
  auto g = product_choice(0.5, 1.0, 0.5);
  CHECK(delta_lower(g, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(delta_lower(g, 0.1) == doctest::Approx(1 - 0.5 / 9).epsilon(1e-12));
  CHECK(delta_lower(g, 0.999999) < 1e-5);
  CHECK_THROWS_AS(delta_lower(g, 0.0), InvalidPrior);
  CHECK_THROWS_AS(delta_lower(g, 1.0), InvalidPrior);
  auto rep = delta_lower_report(g, 0.5);
  CHECK(rep.weight_weak == doctest::Approx(0.5));
  CHECK(rep.strict <= rep.weak + 1e-12);
  ExactStageGame eg = product_choice<Rational>(Rational(1, 2), Rational(1), Rational(1, 2));
  CHECK(delta_lower(eg, Rational(1, 10), Tolerance::exact()) == Rational(17, 18));
  double prev = 2.0;
  for (int i = 1; i < 100; ++i) {
    const double d = delta_lower(g, i / 100.0);
    CHECK(d <= prev + 1e-15);
    CHECK(d < 1.0);
    prev = d;
  }
}
