#pragma once

#include <optional>
#include <string>
#include <vector>

#include "repgame/model.hpp"

namespace repgame {

enum class SolveMethod { policy_iteration, value_iteration };

template <class T>
struct BestReplyResult {
  std::vector<T> value;                // V(s), discounted average units
  std::vector<std::vector<T>> q;       // (1 - delta) u1 + delta E V, per state and action
  std::vector<std::vector<int>> optimal;  // actions within the optimality band
  int iterations = 0;
};

// Expected stage payoff of action a at state s.
template <class T>
T stage_payoff(const BasicModel<T>& m, const ConsumerPolicy<T>& sigma2, int s, int a);

// Exact value of a state-stationary strategy by linear solve.
template <class T>
std::vector<T> policy_value(const BasicModel<T>& m, const Strategy1<T>& sigma1, const ConsumerPolicy<T>& sigma2);

template <class T>
std::vector<std::vector<T>> action_values(const BasicModel<T>& m, const ConsumerPolicy<T>& sigma2,
                                          const std::vector<T>& value);

template <class T>
BestReplyResult<T> solve_best_reply(const BasicModel<T>& m, const ConsumerPolicy<T>& sigma2,
                                    SolveMethod method = SolveMethod::policy_iteration);

struct CanonicalEnumeration {
  std::vector<CanonicalStrategy> strategies;
  bool truncated = false;
};

template <class T>
CanonicalEnumeration canonical_best_replies(const BasicModel<T>& m, const BestReplyResult<T>& br,
                                            long long cap = 100000);

struct BackLoopWitness {
  std::vector<std::pair<int, int>> path;  // (state, action), starting at the all-a* state
  bool on_path = false;
};

// Deterministic trajectory from the all-a* state under `strategy` (true actions, no noise).
template <class T>
std::optional<BackLoopWitness> detect_back_loop(const BasicModel<T>& m, const CanonicalStrategy& strategy,
                                                bool restrict_on_path = false);

// Searches every selection from the optimal-action sets at once: some canonical best reply has an
// on-path back loop iff the all-a* state is reachable from the empty history and some non-a* optimal
// action at the all-a* state leads back to it, all along optimal actions.
template <class T>
std::optional<BackLoopWitness> find_on_path_back_loop(const BasicModel<T>& m, const BestReplyResult<T>& br);

// Chain of transitions each of probability above 1 - epsilon, leaving and re-entering the all-a* state.
template <class T>
std::optional<BackLoopWitness> detect_eps_back_loop(const BasicModel<T>& m, const CanonicalStrategy& strategy);

template <class T>
struct DeviationReport {
  int green = -1;  // all-a* state
  int white = -1;  // last state before the first return
  int loop_action = -1;     // a'
  int white_oldest = -1;    // a''
  T strategy_value;         // V at white
  T deviation_a;            // a' once at white, then the strategy
  T deviation_a_repeated;   // a' at white every visit
  T deviation_b;            // a'' then K - 1 copies of a*, then the strategy
  T deviation_b_repeated;   // the K-cycle repeated forever
  T star_at_green;          // a* once at the all-a* state, then the strategy
  T green_value;            // V at the all-a* state
  bool holds_3_1 = false;   // a* weakly preferred to a' at white
  bool holds_3_2 = false;   // a' weakly preferred to a* at the all-a* state
  bool a_improves = false;
  bool b_improves = false;
  bool star_improves = false;
};

template <class T>
DeviationReport<T> deviation_oracle(const BasicModel<T>& m, const CanonicalStrategy& strategy,
                                    const ConsumerPolicy<T>& sigma2, double margin = 1e-9);

}  // namespace repgame
