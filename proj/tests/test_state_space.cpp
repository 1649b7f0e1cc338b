#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "repgame/errors.hpp"
#include "repgame/state_space.hpp"

using namespace repgame;

namespace {

const std::vector<std::string> LH = {"L", "H"};

std::vector<std::vector<int>> all_windows(int n, int K) {
  std::vector<std::vector<int>> out = {{}};
  for (int l = 0; l < K; ++l) {
    std::vector<std::vector<int>> next;
    for (const auto& w : out)
      for (int a = 0; a < n; ++a) {
        auto v = w;
        v.push_back(a);
        next.push_back(v);
      }
    out = next;
  }
  return out;
}

}  // namespace

TEST_CASE("advance is a shift register") {
  auto s = advance(make_state({1, 1}, 2), 0, 2);
  CHECK(s.history == std::vector<int>{1, 0});
  CHECK_FALSE(s.initial_segment);
  auto t = advance(make_state({1}, 2), 1, 2);
  CHECK(t.history == std::vector<int>{1, 1});
  CHECK_FALSE(t.initial_segment);
  CHECK(make_state({1}, 2).initial_segment);
  auto u = advance(make_state({2, 2, 2}, 3), 0, 3);
  CHECK(category(u, 2, 3) == 1);
  CHECK(u.history.back() == 0);
  CHECK_THROWS_AS(make_state({1, 1, 1}, 2), FormatError);
}

TEST_CASE("counts observations") {
  auto fine = ActionPartition::finest(2);
  auto hl = observe(make_state({1, 0}, 2), fine, ObservationMode::counts, 2);
  auto lh = observe(make_state({0, 1}, 2), fine, ObservationMode::counts, 2);
  CHECK(hl == lh);
  CHECK(hl.summary.counts == std::vector<int>{1, 1});
  CHECK_FALSE(hl.summary.known_time.has_value());
  auto seq_hl = observe(make_state({1, 0}, 2), fine, ObservationMode::sequence, 2);
  auto seq_lh = observe(make_state({0, 1}, 2), fine, ObservationMode::sequence, 2);
  CHECK_FALSE(seq_hl == seq_lh);
  auto early = observe(make_state({1}, 2), fine, ObservationMode::counts, 2);
  REQUIRE(early.summary.known_time.has_value());
  CHECK(*early.summary.known_time == 1);
}

TEST_CASE("observation labels") {
  StateSpace space(2, 2);
  ObservationMap obs(space, ActionPartition::finest(2), ObservationMode::counts);
  CHECK(space.label(space.index({1, 0}), LH) == "(H,L)");
  CHECK(space.label(space.empty(), LH) == "()");
  CHECK(space.parse_label("(H,L)", LH) == space.index({1, 0}));
  CHECK(obs.label(obs.of(space.index({1, 0})), LH) == "{L:1,H:1}");
  CHECK(obs.label(obs.of(space.index({1})), LH) == "{L:0,H:1|t=1}");
  for (int o = 0; o < obs.size(); ++o) CHECK(obs.parse_label(obs.label(o, LH), LH) == o);
  CHECK_THROWS_AS(space.parse_label("(H,X)", LH), FormatError);
  CHECK_THROWS_AS(obs.parse_label("{L:3,H:0}", LH), FormatError);
}

TEST_CASE("counts observations are permutation invariant") {
  std::mt19937_64 rng(3);
  for (int n : {2, 3})
    for (int K : {1, 2, 3, 4}) {
      auto part = n == 3 ? ActionPartition::from_cells({{0, 1}, {2}}, 3) : ActionPartition::finest(n);
      for (const auto& w : all_windows(n, K)) {
        auto p = w;
        std::shuffle(p.begin(), p.end(), rng);
        CHECK(observe(make_state(w, K), part, ObservationMode::counts, K) ==
              observe(make_state(p, K), part, ObservationMode::counts, K));
      }
    }
}

TEST_CASE("category") {
  CHECK(category(make_state({1, 1, 1}, 3), 1, 3) == 0);
  CHECK(category(make_state({0, 1, 1}, 3), 1, 3) == 1);
  CHECK(category(make_state({0, 0, 1}, 3), 1, 3) == 2);
  CHECK_THROWS_AS(category(make_state({0, 1}, 3), 1, 3), InitialSegment);
}

TEST_CASE("category moves by at most one step, as the oldest entry and the new action dictate") {
  for (int n : {2, 3})
    for (int K : {1, 2, 3}) {
      const int top = n - 1;
      for (const auto& w : all_windows(n, K))
        for (int a = 0; a < n; ++a) {
          auto s = make_state(w, K);
          const int before = category(s, top, K);
          const int after = category(advance(s, a, K), top, K);
          const int expected = (w.front() != top ? -1 : 0) + (a != top ? 1 : 0);
          CHECK(after - before == expected);
        }
    }
}

TEST_CASE("state space indexing") {
  for (int n : {2, 3})
    for (int K : {1, 2, 3}) {
      StateSpace space(n, K);
      int expected = 0, pow = 1;
      for (int l = 0; l <= K; ++l, pow *= n) expected += pow;
      CHECK(space.size() == expected);
      CHECK(space.history(space.empty()).empty());
      CHECK(space.history(space.star()) == std::vector<int>(K, n - 1));
      for (int s = 0; s < space.size(); ++s) {
        CHECK(space.index(space.history(s)) == s);
        for (int a = 0; a < n; ++a)
          CHECK(space.history(space.advance(s, a)) == advance(space.state(s), a, K).history);
      }
      CHECK(static_cast<int>(space.full_states().size()) == pow / n);
    }
}

TEST_CASE("every full window is reachable in exactly K steps from any start") {
  for (int n : {2, 3})
    for (int K : {1, 2, 3}) {
      StateSpace space(n, K);
      for (int start = 0; start < space.size(); ++start) {
        std::set<int> frontier = {start};
        for (int step = 0; step < K; ++step) {
          std::set<int> next;
          for (int s : frontier)
            for (int a = 0; a < n; ++a) next.insert(space.advance(s, a));
          frontier = next;
        }
        CHECK(frontier.size() == space.full_states().size());
        for (int s : frontier) CHECK(space.full(s));
      }
    }
}

TEST_CASE("blocks for K = 2 with two actions") {
  StateSpace space(2, 2);
  ObservationMap obs(space, ActionPartition::finest(2), ObservationMode::counts);
  auto bs = blocks(space, obs, 1);
  REQUIRE(bs.size() == 3);
  CHECK(bs[0].category == 0);
  CHECK(bs[0].states == std::vector<int>{space.index({1, 1})});
  CHECK(bs[1].category == 1);
  CHECK(bs[1].states.size() == 2);
  CHECK(bs[1].star_part == std::vector<int>{space.index({1, 0})});
  CHECK(bs[1].prime_part == std::vector<int>{space.index({0, 1})});
  CHECK(bs[2].states == std::vector<int>{space.index({0, 0})});
  auto via_game = blocks(2, product_choice(0.5, 1.0, 0.5), ActionPartition::finest(2));
  CHECK(via_game.size() == 3);
}

TEST_CASE("blocks for K = 1 are singletons") {
  auto bs = blocks(1, product_choice(0.5, 1.0, 0.5), ActionPartition::finest(2));
  for (const auto& b : bs) {
    CHECK(b.states.size() == 1);
    CHECK((b.star_part.empty() || b.prime_part.empty()));
  }
}

TEST_CASE("blocks under a coarse partition follow total counts per cell") {
  StateSpace space(3, 2);
  auto part = ActionPartition::from_cells({{0, 1}, {2}}, 3);
  ObservationMap obs(space, part, ObservationMode::counts);
  auto bs = blocks(space, obs, 2);
  // categories 0, 1, 2 each collapse to one observation: {0}: (2,2); {1}: four windows; {2}: four windows
  REQUIRE(bs.size() == 3);
  CHECK(bs[0].states.size() == 1);
  CHECK(bs[1].states.size() == 4);
  CHECK(bs[2].states.size() == 4);
}

TEST_CASE("blocks partition the full windows and split disjointly") {
  for (int n : {2, 3})
    for (int K : {1, 2, 3}) {
      StateSpace space(n, K);
      for (auto mode : {ObservationMode::counts, ObservationMode::sequence}) {
        ObservationMap obs(space, ActionPartition::finest(n), mode);
        std::multiset<int> seen;
        for (const auto& b : blocks(space, obs, n - 1)) {
          CHECK(b.star_part.size() + b.prime_part.size() == b.states.size());
          for (int s : b.states) seen.insert(s);
          for (int s : b.star_part) CHECK(space.history(s).front() == n - 1);
          for (int s : b.prime_part) CHECK(space.history(s).front() != n - 1);
        }
        CHECK(seen.size() == space.full_states().size());
        CHECK(std::set<int>(seen.begin(), seen.end()).size() == seen.size());
      }
    }
}

TEST_CASE("partitions") {
  auto p = ActionPartition::from_cells({{2}, {1, 0}}, 3);
  CHECK(p.cells[0] == std::vector<int>{0, 1});
  CHECK(p.minima() == std::vector<int>{0, 2});
  CHECK_FALSE(p.is_finest());
  CHECK(ActionPartition::finest(3).is_finest());
  CHECK_THROWS_AS(ActionPartition::from_cells({{0}, {0, 1}}, 3), FormatError);
  CHECK_THROWS_AS(ActionPartition::from_cells({{0}, {1}}, 3), FormatError);
  auto g = reduced_game(product_choice(0.5, 1.0, 0.5), ActionPartition::finest(2));
  CHECK(g.payoff1 == product_choice(0.5, 1.0, 0.5).payoff1);
}

TEST_CASE("signal advance") {
  SignalModel<double> clean;
  auto d0 = signal_advance(make_state({1}, 2), 0, clean, 2);
  REQUIRE(d0.size() == 1);
  CHECK(d0[0].first.history == std::vector<int>{1, 0});
  CHECK(d0[0].second == 1.0);

  SignalModel<double> noisy{0.1, {0.5, 0.5}};
  auto d = signal_advance(make_state({1}, 2), 1, noisy, 2);
  REQUIRE(d.size() == 2);
  for (const auto& [s, p] : d) {
    if (s.history.back() == 1) CHECK(p == doctest::Approx(0.95));
    if (s.history.back() == 0) CHECK(p == doctest::Approx(0.05));
  }
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> alpha = {u(rng), u(rng), u(rng)};
    double z = alpha[0] + alpha[1] + alpha[2];
    for (auto& x : alpha) x /= z;
    SignalModel<double> m{u(rng) * 0.99, alpha};
    double total = 0;
    for (const auto& [s, p] : signal_advance(make_state({2, 0}, 2), trial % 3, m, 2)) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  SignalModel<double> broken{0.1, {}};
  CHECK_THROWS_AS(signal_advance(make_state({}, 2), 0, broken, 2), FormatError);
}
