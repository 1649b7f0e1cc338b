#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "repgame/belief_engine.hpp"
#include "repgame/best_reply.hpp"
#include "repgame/model.hpp"

namespace repgame {

// One support point of a consumer belief at an unreached observation.
template <class T>
struct BeliefAtom {
  int state = -1;
  bool commitment = false;
  T weight;
};

template <class T>
struct EquilibriumProfile {
  BasicModel<T> model;
  Strategy1<T> sigma1;
  ConsumerPolicy<T> sigma2;
  std::map<int, std::vector<BeliefAtom<T>>> off_path_beliefs;  // keyed by observation
  std::string family;
  std::vector<std::pair<std::string, T>> constants;  // named mixing weights and values of the construction

  const T* constant(const std::string& name) const {
    for (const auto& [k, v] : constants)
      if (k == name) return &v;
    return nullptr;
  }
};

struct FailingSite {
  std::string player;  // "1" for a state, "2" for an observation
  int site = -1;
  std::string label;
  bool on_path = false;
  int alternative = -1;
  double gain = 0;
};

struct VerificationReport {
  bool is_nash = false;
  bool is_pbe = false;
  bool off_path_checked = false;
  double worst_p1_deviation_gain = 0;  // over every state
  double worst_p2_regret = 0;          // over every checked observation
  double worst_p1_on_path = 0;
  double worst_p2_on_path = 0;
  double strategic_value = 0;  // V at the empty history
  std::vector<FailingSite> failing_sites;
};

// Player 1: best-reply value against the profile's value, plus the best one-shot gain, per state.
// Player 2: support of sigma2 against best replies to the posterior, or to the supplied belief when
// the observation has zero probability. With check_off_path false only on-path sites are examined
// and no beliefs are required.
template <class T>
VerificationReport verify(const EquilibriumProfile<T>& profile, double tol, bool check_off_path = true);

// Consumer's action belief at an observation: Bayes posterior when reached, else the stored belief.
template <class T>
std::vector<T> consumer_belief(const EquilibriumProfile<T>& profile, const JointWeights<T>& w, int observation);

template <class T>
T theorem1_bound(const BasicStageGame<T>& g, const T& delta, int K, const Tolerance& tol = {});

struct SecurityReport {
  double bound = 0;
  double always_top_value = 0;
  double delta_lower = 0;
  bool applies = false;  // delta above delta_lower
  bool top_trusted = false;  // sigma2 at the all-a* observation puts all mass on b* or above
  bool holds = false;
};

template <class T>
SecurityReport assert_security(const EquilibriumProfile<T>& profile, double slack = 1e-6);

// Equilibrium constructions. Each returns the full profile including its off-path beliefs and
// throws PreconditionFailed naming the violated requirement.
template <class T>
EquilibriumProfile<T> construct_cycle_equilibrium(const BasicModel<T>& m);
template <class T>
EquilibriumProfile<T> construct_noncommitment_equilibrium(const BasicModel<T>& m);

enum class SequenceVariant { good, cycle };

template <class T>
EquilibriumProfile<T> construct_sequence_equilibria(const BasicModel<T>& m, SequenceVariant which);

template <class T>
EquilibriumProfile<T> construct_submodular_cycle(const BasicModel<T>& m);

struct CycleMemorySearch {
  int K = -1;  // smallest memory at which the cycle family verifies, -1 if none up to the limit
  std::vector<std::pair<int, std::string>> attempts;  // memory length and outcome
};

// Tries K = 2, 3, ... up to max_K for the sequence-mode cycle family.
CycleMemorySearch locate_cycle_memory(const Model& base, int max_K, double tol = 1e-6);

// Strict upper bound of the player-1 payoff and of the consumer payoff below the a*-b* outcome.
struct PayoffGap {
  double strategic_value = 0;
  double consumer_welfare = 0;
  double eta = 0;
};

template <class T>
PayoffGap payoff_gap(const EquilibriumProfile<T>& profile);

struct PureSearch {
  long long consumer_policies = 0;
  long long candidates = 0;
  bool truncated = false;
  std::vector<EquilibriumProfile<double>> verified;
};

// Exhaustive over pure consumer policies on observations; for each, every canonical best reply
// (up to br_cap) is checked as a Nash profile.
PureSearch search_pure_equilibria(const Model& m, double tol = 1e-6, long long policy_cap = 1 << 16,
                                  long long br_cap = 64);

EquilibriumProfile<double> to_double_profile(const EquilibriumProfile<Rational>& p);

}  // namespace repgame
