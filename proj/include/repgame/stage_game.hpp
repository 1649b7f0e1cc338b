#pragma once

#include <string>
#include <utility>
#include <vector>

#include "repgame/scalar.hpp"

namespace repgame {

struct Tolerance {
  double tie = 1e-10;  // best-reply membership, relative
  double opt = 1e-9;   // optimal-action band for player 1
  static Tolerance exact() { return {0.0, 0.0}; }
};

// Action lists are ascending: actions1.back() is the commitment action a*, actions1.front() is a_low.
template <class T>
struct BasicStageGame {
  std::vector<std::string> actions1;
  std::vector<std::string> actions2;
  std::vector<T> payoff1;  // row-major |A| x |B|
  std::vector<T> payoff2;

  int n1() const { return static_cast<int>(actions1.size()); }
  int n2() const { return static_cast<int>(actions2.size()); }
  int top() const { return n1() - 1; }
  const T& u1(int a, int b) const { return payoff1[a * n2() + b]; }
  const T& u2(int a, int b) const { return payoff2[a * n2() + b]; }
  T& u1(int a, int b) { return payoff1[a * n2() + b]; }
  T& u2(int a, int b) { return payoff2[a * n2() + b]; }

  int action1_index(const std::string& name) const;
  int action2_index(const std::string& name) const;
  void check() const;
};

using StageGame = BasicStageGame<double>;
using ExactStageGame = BasicStageGame<Rational>;

template <class U, class T>
BasicStageGame<U> convert_game(const BasicStageGame<T>& g) {
  BasicStageGame<U> out;
  out.actions1 = g.actions1;
  out.actions2 = g.actions2;
  for (const T& x : g.payoff1) {
    if constexpr (std::is_same_v<U, T>)
      out.payoff1.push_back(x);
    else if constexpr (is_exact_v<U>)
      out.payoff1.push_back(rationalize(to_double(x)));
    else
      out.payoff1.push_back(to_double(x));
  }
  for (const T& x : g.payoff2) {
    if constexpr (std::is_same_v<U, T>)
      out.payoff2.push_back(x);
    else if constexpr (is_exact_v<U>)
      out.payoff2.push_back(rationalize(to_double(x)));
    else
      out.payoff2.push_back(to_double(x));
  }
  return out;
}

// Product choice game: A = {L, H}, B = {N, T}.
template <class T>
BasicStageGame<T> product_choice(T c_T, T c_N, T x);
StageGame product_choice(double c_T, double c_N, double x);

template <class T>
std::vector<T> pure_action(int n, int i) {
  std::vector<T> v(n, T(0));
  v[i] = T(1);
  return v;
}

// weight on `a`, remainder on `other`
template <class T>
std::vector<T> two_point(int n, int a, int other, const T& weight) {
  std::vector<T> v(n, T(0));
  v[a] += weight;
  v[other] += T(1) - weight;
  return v;
}

template <class T>
bool is_distribution(const std::vector<T>& v, double tol = 1e-12);

template <class T>
T expected_u1(const BasicStageGame<T>& g, int a, const std::vector<T>& beta);
template <class T>
T expected_u2(const BasicStageGame<T>& g, const std::vector<T>& alpha, int b);

struct MsmReport {
  bool decreasing_in_a = true;
  bool increasing_in_b = true;
  bool u1_increasing_differences = true;
  bool u2_increasing_differences = true;
  // (a, b) index of the adjacent pair / adjacent rectangle's lower corner
  std::vector<std::pair<int, int>> decreasing_in_a_witnesses;
  std::vector<std::pair<int, int>> increasing_in_b_witnesses;
  std::vector<std::pair<int, int>> u1_differences_witnesses;
  std::vector<std::pair<int, int>> u2_differences_witnesses;
  bool ok() const {
    return decreasing_in_a && increasing_in_b && u1_increasing_differences &&
           u2_increasing_differences;
  }
};

template <class T>
MsmReport validate_msm(const BasicStageGame<T>& g, const Tolerance& tol = {});

template <class T>
std::vector<int> pure_best_replies(const BasicStageGame<T>& g, const std::vector<T>& alpha,
                                   const Tolerance& tol = {});
template <class T>
int lowest_best_reply(const BasicStageGame<T>& g, const std::vector<T>& alpha,
                      const Tolerance& tol = {});

// lowest best reply to a* and to a_low
template <class T>
int b_star(const BasicStageGame<T>& g, const Tolerance& tol = {});
template <class T>
int b_low(const BasicStageGame<T>& g, const Tolerance& tol = {});

struct FosdReport {
  bool ranked = true;
  bool mesh_too_coarse = false;
  std::vector<double> beta;  // violating pair, empty when ranked
  std::vector<double> beta_prime;
  std::vector<std::vector<int>> best_reply_sets;  // distinct sets found
};

// true iff beta first-order stochastically dominates other (weakly)
bool fosd_geq(const std::vector<double>& beta, const std::vector<double>& other, double tol = 1e-12);
FosdReport check_fosd_chain(const StageGame& g, int mesh_steps = 200, const Tolerance& tol = {});

template <class T>
bool is_optimal_pure_commitment(const BasicStageGame<T>& g, const Tolerance& tol = {});

// Largest weight on `other` in (1 - w) a* + w other keeping b* a weak best reply.
template <class T>
T eta_for(const BasicStageGame<T>& g, int other, const Tolerance& tol = {});
template <class T>
T eta_star(const BasicStageGame<T>& g, const Tolerance& tol = {});

struct CutoffReport {
  int weak = 1;    // b* is a best reply to the mixture
  int strict = 1;  // every best reply to the mixture is at least b*
  int deviation_action = -1;             // a' attaining the weak cutoff
  std::vector<int> candidate_actions;  // a' to consider, default all a != a*
};

template <class T>
int cutoff_K(const BasicStageGame<T>& g, const Tolerance& tol = {});
template <class T>
CutoffReport cutoff_report(const BasicStageGame<T>& g, const Tolerance& tol = {},
                           const std::vector<int>& candidates = {});

template <class T>
struct DeltaLowerReport {
  T weak;    // b* weakly optimal at the threshold mixture
  T strict;  // every best reply at least b* below the threshold weight
  T weight_weak;
  T weight_strict;
};

template <class T>
T delta_lower(const BasicStageGame<T>& g, const T& pi0, const Tolerance& tol = {});
template <class T>
DeltaLowerReport<T> delta_lower_report(const BasicStageGame<T>& g, const T& pi0,
                                       const Tolerance& tol = {});

}  // namespace repgame
