#include "repgame/stage_game.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "repgame/errors.hpp"

namespace repgame {

template <class T>
int BasicStageGame<T>::action1_index(const std::string& name) const {
  for (int i = 0; i < n1(); ++i)
    if (actions1[i] == name) return i;
  throw FormatError("unknown player-1 action '" + name + "'");
}

template <class T>
int BasicStageGame<T>::action2_index(const std::string& name) const {
  for (int i = 0; i < n2(); ++i)
    if (actions2[i] == name) return i;
  throw FormatError("unknown player-2 action '" + name + "'");
}

template <class T>
void BasicStageGame<T>::check() const {
  if (n1() < 2 || n2() < 2) throw FormatError("each player needs at least two actions");
  const size_t cells = static_cast<size_t>(n1()) * n2();
  if (payoff1.size() != cells || payoff2.size() != cells)
    throw FormatError("payoff matrices must be |actions1| x |actions2|");
  std::set<std::string> s1(actions1.begin(), actions1.end());
  std::set<std::string> s2(actions2.begin(), actions2.end());
  if (static_cast<int>(s1.size()) != n1() || static_cast<int>(s2.size()) != n2())
    throw FormatError("action names must be distinct");
}

template <class T>
BasicStageGame<T> product_choice(T c_T, T c_N, T x) {
  BasicStageGame<T> g;
  g.actions1 = {"L", "H"};
  g.actions2 = {"N", "T"};
  // rows L, H; columns N, T
  g.payoff1 = {T(0), T(1) + c_T, T(-c_N), T(1)};
  g.payoff2 = {T(0), T(-x), x, T(1)};
  return g;
}

StageGame product_choice(double c_T, double c_N, double x) {
  return product_choice<double>(c_T, c_N, x);
}

template <class T>
bool is_distribution(const std::vector<T>& v, double tol) {
  T sum(0);
  for (const T& x : v) {
    if (x < T(0)) return false;
    sum += x;
  }
  return scalar_abs(T(sum - T(1))) <= from_double<T>(tol);
}

template <class T>
T expected_u1(const BasicStageGame<T>& g, int a, const std::vector<T>& beta) {
  T s(0);
  for (int b = 0; b < g.n2(); ++b)
    if (beta[b] != T(0)) s += beta[b] * g.u1(a, b);
  return s;
}

template <class T>
T expected_u2(const BasicStageGame<T>& g, const std::vector<T>& alpha, int b) {
  T s(0);
  for (int a = 0; a < g.n1(); ++a)
    if (alpha[a] != T(0)) s += alpha[a] * g.u2(a, b);
  return s;
}

template <class T>
MsmReport validate_msm(const BasicStageGame<T>& g, const Tolerance& tol) {
  MsmReport r;
  auto strictly_less = [&](const T& lo, const T& hi) { return hi - lo > band(lo, hi, tol.tie); };
  for (int a = 0; a + 1 < g.n1(); ++a)
    for (int b = 0; b < g.n2(); ++b)
      if (!strictly_less(g.u1(a + 1, b), g.u1(a, b))) r.decreasing_in_a_witnesses.push_back({a, b});
  for (int a = 0; a < g.n1(); ++a)
    for (int b = 0; b + 1 < g.n2(); ++b)
      if (!strictly_less(g.u1(a, b), g.u1(a, b + 1))) r.increasing_in_b_witnesses.push_back({a, b});
  for (int a = 0; a + 1 < g.n1(); ++a)
    for (int b = 0; b + 1 < g.n2(); ++b) {
      T lo1 = g.u1(a, b + 1) - g.u1(a, b);
      T hi1 = g.u1(a + 1, b + 1) - g.u1(a + 1, b);
      if (!strictly_less(lo1, hi1)) r.u1_differences_witnesses.push_back({a, b});
      T lo2 = g.u2(a, b + 1) - g.u2(a, b);
      T hi2 = g.u2(a + 1, b + 1) - g.u2(a + 1, b);
      if (!strictly_less(lo2, hi2)) r.u2_differences_witnesses.push_back({a, b});
    }
  r.decreasing_in_a = r.decreasing_in_a_witnesses.empty();
  r.increasing_in_b = r.increasing_in_b_witnesses.empty();
  r.u1_increasing_differences = r.u1_differences_witnesses.empty();
  r.u2_increasing_differences = r.u2_differences_witnesses.empty();
  return r;
}

template <class T>
std::vector<int> pure_best_replies(const BasicStageGame<T>& g, const std::vector<T>& alpha,
                                   const Tolerance& tol) {
  std::vector<T> eu(g.n2());
  for (int b = 0; b < g.n2(); ++b) eu[b] = expected_u2(g, alpha, b);
  T best = *std::max_element(eu.begin(), eu.end());
  std::vector<int> out;
  for (int b = 0; b < g.n2(); ++b)
    if (best - eu[b] <= band(best, eu[b], tol.tie)) out.push_back(b);
  return out;
}

template <class T>
int lowest_best_reply(const BasicStageGame<T>& g, const std::vector<T>& alpha, const Tolerance& tol) {
  return pure_best_replies(g, alpha, tol).front();
}

template <class T>
int b_star(const BasicStageGame<T>& g, const Tolerance& tol) {
  return lowest_best_reply(g, pure_action<T>(g.n1(), g.top()), tol);
}

template <class T>
int b_low(const BasicStageGame<T>& g, const Tolerance& tol) {
  return lowest_best_reply(g, pure_action<T>(g.n1(), 0), tol);
}

bool fosd_geq(const std::vector<double>& beta, const std::vector<double>& other, double tol) {
  double ca = 0, cb = 0;
  for (size_t b = 0; b < beta.size(); ++b) {
    ca += beta[b];
    cb += other[b];
    if (ca > cb + tol) return false;
  }
  return true;
}

namespace {

void enumerate_mesh(int n, int steps, std::vector<int>& cur, int pos, int left,
                    const std::function<void(const std::vector<int>&)>& f) {
  if (pos == n - 1) {
    cur[pos] = left;
    f(cur);
    return;
  }
  for (int k = 0; k <= left; ++k) {
    cur[pos] = k;
    enumerate_mesh(n, steps, cur, pos + 1, left - k, f);
  }
}

}  // namespace

FosdReport check_fosd_chain(const StageGame& g, int mesh_steps, const Tolerance& tol) {
  FosdReport rep;
  const int n = g.n1();
  std::set<std::vector<int>> sets;
  auto br_at = [&](const std::vector<double>& alpha, double t) {
    Tolerance tt = tol;
    tt.tie = t;
    return pure_best_replies(g, alpha, tt);
  };
  auto to_alpha = [&](const std::vector<int>& p) {
    std::vector<double> a(n);
    for (int i = 0; i < n; ++i) a[i] = static_cast<double>(p[i]) / mesh_steps;
    return a;
  };
  std::vector<std::pair<std::vector<int>, std::vector<int>>> boundaries;
  std::vector<int> cur(n);
  enumerate_mesh(n, mesh_steps, cur, 0, mesh_steps, [&](const std::vector<int>& p) {
    auto here = br_at(to_alpha(p), tol.tie);
    sets.insert(here);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j || p[j] == 0) continue;
        std::vector<int> q = p;
        q[i] += 1;
        q[j] -= 1;
        if (q < p) continue;  // visit each edge once
        auto there = br_at(to_alpha(q), tol.tie);
        std::vector<int> common;
        std::set_intersection(here.begin(), here.end(), there.begin(), there.end(),
                              std::back_inserter(common));
        if (!common.empty()) continue;
        // locate the switching point between the two mesh points
        std::vector<double> lo = to_alpha(p), hi = to_alpha(q);
        for (int it = 0; it < 60; ++it) {
          std::vector<double> mid(n);
          for (int k = 0; k < n; ++k) mid[k] = 0.5 * (lo[k] + hi[k]);
          if (br_at(mid, tol.tie) == here)
            lo = mid;
          else
            hi = mid;
        }
        auto edge = br_at(lo, std::max(tol.tie, 1e-9));
        std::vector<int> with_here, with_there;
        std::set_intersection(edge.begin(), edge.end(), here.begin(), here.end(),
                              std::back_inserter(with_here));
        std::set_intersection(edge.begin(), edge.end(), there.begin(), there.end(),
                              std::back_inserter(with_there));
        if (with_here.empty() || with_there.empty()) rep.mesh_too_coarse = true;
        sets.insert(edge);
      }
  });
  rep.best_reply_sets.assign(sets.begin(), sets.end());
  // Mixtures over any set S are pairwise ranked with mixtures over S' unless some element of
  // one set lies strictly between the extremes of another.
  for (const auto& s : sets)
    for (const auto& other : sets)
      for (int t : other)
        if (t > s.front() && t < s.back()) {
          rep.ranked = false;
          rep.beta.assign(g.n2(), 0.0);
          rep.beta[s.front()] += 0.5;
          rep.beta[s.back()] += 0.5;
          rep.beta_prime.assign(g.n2(), 0.0);
          rep.beta_prime[t] = 1.0;
          return rep;
        }
  return rep;
}

template <class T>
bool is_optimal_pure_commitment(const BasicStageGame<T>& g, const Tolerance& tol) {
  const int bs = b_star(g, tol);
  const T v = g.u1(g.top(), bs);
  bool have = false;
  T best(0);
  for (int a = 0; a < g.top(); ++a)
    for (int b : pure_best_replies(g, pure_action<T>(g.n1(), a), tol))
      if (!have || g.u1(a, b) > best) {
        best = g.u1(a, b);
        have = true;
      }
  return v - best > band(v, best, tol.tie);
}

template <class T>
T eta_for(const BasicStageGame<T>& g, int other, const Tolerance& tol) {
  const int top = g.top();
  const int bs = b_star(g, tol);
  T eta(1);
  for (int b = 0; b < g.n2(); ++b) {
    if (b == bs) continue;
    T d0 = g.u2(top, bs) - g.u2(top, b);
    T d1 = g.u2(other, bs) - g.u2(other, b);
    if (d0 < T(0)) d0 = T(0);
    if (d1 >= T(0)) continue;
    T w = d0 / (d0 - d1);
    if (w < eta) eta = w;
  }
  return eta;
}

template <class T>
T eta_star(const BasicStageGame<T>& g, const Tolerance& tol) {
  T best(0);
  for (int a = 0; a < g.top(); ++a) {
    T e = eta_for(g, a, tol);
    if (e > best) best = e;
  }
  return best;
}

template <class T>
CutoffReport cutoff_report(const BasicStageGame<T>& g, const Tolerance& tol,
                           const std::vector<int>& candidates) {
  CutoffReport rep;
  rep.candidate_actions = candidates;
  if (rep.candidate_actions.empty())
    for (int a = 0; a < g.top(); ++a) rep.candidate_actions.push_back(a);
  if (!is_optimal_pure_commitment(g, tol)) return rep;
  const int bs = b_star(g, tol);
  T eta(0);
  for (int a : rep.candidate_actions) {
    T e = eta_for(g, a, tol);
    if (e > eta) eta = e;
  }
  if (eta <= T(0)) throw Unbounded("b* stops being a best reply at every positive weight on a'");
  const int bound = static_cast<int>(std::floor(to_double(T(T(1) / eta)))) + 2;
  rep.weak = -1;
  rep.strict = -1;
  for (int k = 1; k <= 4 * bound && rep.strict < 0; ++k) {
    for (int a : rep.candidate_actions) {
      std::vector<T> mix(g.n1(), T(0));
      mix[g.top()] = T(k - 1) / T(k);
      mix[a] += T(1) / T(k);
      auto br = pure_best_replies(g, mix, tol);
      bool has_bs = std::find(br.begin(), br.end(), bs) != br.end();
      if (rep.weak < 0 && has_bs && k <= bound) {
        rep.weak = k;
        rep.deviation_action = a;
      }
      if (rep.strict < 0 && br.front() >= bs) rep.strict = k;
    }
  }
  if (rep.weak < 0) throw Unbounded("no cutoff within the search bound");
  return rep;
}

template <class T>
int cutoff_K(const BasicStageGame<T>& g, const Tolerance& tol) {
  return cutoff_report(g, tol).weak;
}

template <class T>
DeltaLowerReport<T> delta_lower_report(const BasicStageGame<T>& g, const T& pi0, const Tolerance& tol) {
  if (!(pi0 > T(0) && pi0 < T(1))) throw InvalidPrior("prior must lie in (0, 1)");
  const int top = g.top();
  const int bs = b_star(g, tol);
  DeltaLowerReport<T> rep;
  rep.weight_weak = eta_for(g, 0, tol);
  // First weight on a_low at which some action below b* becomes a best reply.
  std::vector<T> points = {T(0), T(1)};
  for (int b1 = 0; b1 < g.n2(); ++b1)
    for (int b2 = b1 + 1; b2 < g.n2(); ++b2) {
      T d0 = g.u2(top, b1) - g.u2(top, b2);
      T d1 = g.u2(0, b1) - g.u2(0, b2);
      if (d0 == d1) continue;
      T w = d0 / (d0 - d1);
      if (w > T(0) && w < T(1)) points.push_back(w);
    }
  std::sort(points.begin(), points.end());
  rep.weight_strict = T(1);
  for (const T& w : points) {
    auto br = pure_best_replies(g, two_point<T>(g.n1(), 0, top, w), tol);
    if (br.front() < bs) {
      rep.weight_strict = w;
      break;
    }
  }
  auto invert = [&](const T& w) {
    T d = T(1) - w * pi0 / (T(1) - pi0);
    return d < T(0) ? T(0) : d;
  };
  rep.weak = invert(rep.weight_weak);
  rep.strict = invert(rep.weight_strict);
  return rep;
}

template <class T>
T delta_lower(const BasicStageGame<T>& g, const T& pi0, const Tolerance& tol) {
  return delta_lower_report(g, pi0, tol).weak;
}

#define REPGAME_STAGE_GAME(T)                                                                   \
  template struct BasicStageGame<T>;                                                            \
  template BasicStageGame<T> product_choice<T>(T, T, T);                                        \
  template bool is_distribution<T>(const std::vector<T>&, double);                             \
  template T expected_u1<T>(const BasicStageGame<T>&, int, const std::vector<T>&);              \
  template T expected_u2<T>(const BasicStageGame<T>&, const std::vector<T>&, int);              \
  template MsmReport validate_msm<T>(const BasicStageGame<T>&, const Tolerance&);               \
  template std::vector<int> pure_best_replies<T>(const BasicStageGame<T>&, const std::vector<T>&, \
                                                 const Tolerance&);                             \
  template int lowest_best_reply<T>(const BasicStageGame<T>&, const std::vector<T>&,            \
                                    const Tolerance&);                                          \
  template int b_star<T>(const BasicStageGame<T>&, const Tolerance&);                           \
  template int b_low<T>(const BasicStageGame<T>&, const Tolerance&);                            \
  template bool is_optimal_pure_commitment<T>(const BasicStageGame<T>&, const Tolerance&);      \
  template T eta_for<T>(const BasicStageGame<T>&, int, const Tolerance&);                       \
  template T eta_star<T>(const BasicStageGame<T>&, const Tolerance&);                           \
  template CutoffReport cutoff_report<T>(const BasicStageGame<T>&, const Tolerance&,            \
                                         const std::vector<int>&);                              \
  template int cutoff_K<T>(const BasicStageGame<T>&, const Tolerance&);                         \
  template DeltaLowerReport<T> delta_lower_report<T>(const BasicStageGame<T>&, const T&,        \
                                                     const Tolerance&);                         \
  template T delta_lower<T>(const BasicStageGame<T>&, const T&, const Tolerance&);

REPGAME_STAGE_GAME(double)
REPGAME_STAGE_GAME(Rational)

}  // namespace repgame
