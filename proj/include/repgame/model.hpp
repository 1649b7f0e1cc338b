#pragma once

#include <utility>
#include <vector>

#include "repgame/stage_game.hpp"
#include "repgame/state_space.hpp"

namespace repgame {

// Per-state mixed action of the strategic type. Indexed by StateSpace state.
template <class T>
using Strategy1 = std::vector<std::vector<T>>;
// Per-observation mixed action of the short-run players. Indexed by ObservationMap observation.
template <class T>
using ConsumerPolicy = std::vector<std::vector<T>>;
// Pure state-dependent strategy.
using CanonicalStrategy = std::vector<int>;

struct ModelParams {
  int K = 1;
  ObservationMode mode = ObservationMode::counts;
  std::vector<std::vector<int>> partition;  // empty: finest
  double epsilon = 0.0;
  std::vector<double> noise_dist;  // empty: uniform
  double delta = 0.9;
  double delta_bar = -1.0;  // negative: same as delta
  double pi0 = 0.1;
};

// Game plus monitoring structure and discounting. States are recorded-signal windows, which
// coincide with action windows when epsilon is zero.
template <class T>
struct BasicModel {
  BasicStageGame<T> game;
  int K = 1;
  ObservationMode mode = ObservationMode::counts;
  ActionPartition partition;
  SignalModel<T> signals;
  T delta;
  T delta_bar;
  T pi0;
  Tolerance tol;
  StateSpace space;
  ObservationMap obs;
  std::vector<std::vector<T>> signal_prob;  // [true action][recorded signal]

  int num_states() const { return space.size(); }
  int num_observations() const { return obs.size(); }
  int n1() const { return game.n1(); }
  int n2() const { return game.n2(); }
  int top() const { return game.top(); }
  bool noisy() const { return signals.epsilon != T(0); }

  // successor states and probabilities when the true action is a
  std::vector<std::pair<int, T>> successors(int s, int a) const;
  const std::vector<T>& policy_at(const ConsumerPolicy<T>& sigma2, int s) const {
    return sigma2[obs.of(s)];
  }
};

using Model = BasicModel<double>;
using ExactModel = BasicModel<Rational>;

template <class T>
BasicModel<T> make_model(const BasicStageGame<T>& g, int K, ObservationMode mode, const ActionPartition& partition,
                         const SignalModel<T>& signals, const T& delta, const T& delta_bar, const T& pi0,
                         const Tolerance& tol = {});

template <class T>
BasicModel<T> make_model(const BasicStageGame<T>& g, const ModelParams& p, const Tolerance& tol = {});

// Same monitoring structure over another scalar type.
template <class U, class T>
BasicModel<U> convert_model(const BasicModel<T>& m, const Tolerance& tol);

// Copy of m with a different memory length or discounting.
template <class T>
BasicModel<T> with_K(const BasicModel<T>& m, int K);
template <class T>
BasicModel<T> with_discount(const BasicModel<T>& m, const T& delta, const T& delta_bar);

template <class T>
Strategy1<T> constant_strategy(const BasicModel<T>& m, int action);
template <class T>
Strategy1<T> to_mixed(const BasicModel<T>& m, const CanonicalStrategy& s);
template <class T>
ConsumerPolicy<T> constant_policy(const BasicModel<T>& m, int action);

template <class U, class T>
std::vector<std::vector<U>> convert_table(const std::vector<std::vector<T>>& t) {
  std::vector<std::vector<U>> out(t.size());
  for (size_t i = 0; i < t.size(); ++i)
    for (const T& x : t[i]) {
      if constexpr (std::is_same_v<U, T>)
        out[i].push_back(x);
      else if constexpr (is_exact_v<U>)
        out[i].push_back(rationalize(to_double(x)));
      else
        out[i].push_back(to_double(x));
    }
  return out;
}

}  // namespace repgame
