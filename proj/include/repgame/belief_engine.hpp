#pragma once

#include <vector>

#include "repgame/model.hpp"

namespace repgame {

// Support of the state process started from the empty history.
template <class T>
std::vector<bool> reachable(const BasicModel<T>& m, const Strategy1<T>& sigma1);

// nu(s) = sum_t (1 - delta_bar) delta_bar^t P(state_t = s), over every state including initial segments.
template <class T>
std::vector<T> discounted_occupation(const BasicModel<T>& m, const Strategy1<T>& sigma1);

// The commitment type's discounted occupation; closed form without noise.
template <class T>
std::vector<T> commitment_occupation(const BasicModel<T>& m);

template <class T>
struct OccupationMeasure {
  std::vector<int> states;          // full-length state indices
  std::vector<T> mu;                // conditional on t >= K
  std::vector<T> p;                 // distribution at t = K
  std::vector<std::vector<T>> Q;    // kernel over `states`
  T delta_bar;
  std::vector<int> position;        // state index -> position in `states`, -1 otherwise
};

template <class T>
OccupationMeasure<T> stationary_occupation(const BasicModel<T>& m, const Strategy1<T>& sigma1);

template <class T>
T recursion_residual(const OccupationMeasure<T>& om);

template <class T>
struct FlowReport {
  T inflow;
  T outflow;
  T bound;  // (1 - delta_bar) / delta_bar
  bool bound_holds = true;
};

// `subset` holds state indices of full-length states. With proper = false the whole space is
// accepted and yields zero flows.
template <class T>
FlowReport<T> flows(const OccupationMeasure<T>& om, const std::vector<int>& subset, double slack = 1e-10,
                    bool proper = true);
template <class T>
T flow_between(const OccupationMeasure<T>& om, const std::vector<int>& from, const std::vector<int>& to);

// Prior-weighted joint masses over (type, state): strategic carries 1 - pi0, commitment pi0.
template <class T>
struct JointWeights {
  std::vector<T> strategic;
  std::vector<T> commitment;
  std::vector<bool> strategic_reach;
  std::vector<bool> commitment_reach;
};

template <class T>
JointWeights<T> joint_weights(const BasicModel<T>& m, const Strategy1<T>& sigma1);

template <class T>
bool observation_reached(const BasicModel<T>& m, const JointWeights<T>& w, int observation);

template <class T>
struct PosteriorReport {
  int observation = -1;
  T commitment_prob;
  std::vector<T> action_belief;
  std::vector<std::pair<int, T>> state_belief;  // window state and posterior probability
  T mass;                                       // unconditional probability of the observation
};

template <class T>
PosteriorReport<T> posterior(const BasicModel<T>& m, const Strategy1<T>& sigma1, const JointWeights<T>& w,
                             int observation);
template <class T>
PosteriorReport<T> posterior(const BasicModel<T>& m, const Strategy1<T>& sigma1, int observation);

// Block-level flow diagnostics over the S_{j,k} partition.
template <class T>
struct BlockDiagnostic {
  int category = 0;
  int observation = -1;
  T mass;
  T flow_to_lower;    // Q(S_{j,k} -> S_{k-1})
  T flow_from_lower;  // Q(S_{k-1} -> S_{j,k})
  T odds_numerator;
  T odds_denominator;
  bool hypothesis = false;   // both flows within z (1 - delta_bar)
  bool mass_small = false;   // mass within y (1 - delta_bar)
  bool odds_below = false;   // odds ratio below K - 1
};

template <class T>
std::vector<BlockDiagnostic<T>> block_diagnostics(const BasicModel<T>& m, const OccupationMeasure<T>& om,
                                                  double z, double y);

}  // namespace repgame
