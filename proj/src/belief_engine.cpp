#include "repgame/belief_engine.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "repgame/errors.hpp"
#include "repgame/linalg.hpp"

namespace repgame {

namespace {

template <class T>
void check_strategy(const BasicModel<T>& m, const Strategy1<T>& sigma1) {
  if (static_cast<int>(sigma1.size()) != m.num_states())
    throw FormatError("strategy must assign a mixed action to every state");
  for (const auto& row : sigma1)
    if (static_cast<int>(row.size()) != m.n1()) throw FormatError("strategy row has the wrong width");
}

// Dense kernel over all states.
template <class T>
Mat<T> kernel(const BasicModel<T>& m, const Strategy1<T>& sigma1) {
  const int n = m.num_states();
  Mat<T> P = Mat<T>::Zero(n, n);
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < m.n1(); ++a) {
      if (sigma1[s][a] == T(0)) continue;
      for (const auto& [t, pr] : m.successors(s, a)) P(s, t) += sigma1[s][a] * pr;
    }
  return P;
}

}  // namespace

template <class T>
std::vector<bool> reachable(const BasicModel<T>& m, const Strategy1<T>& sigma1) {
  check_strategy(m, sigma1);
  std::vector<bool> seen(m.num_states(), false);
  std::deque<int> queue{m.space.empty()};
  seen[m.space.empty()] = true;
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    for (int a = 0; a < m.n1(); ++a) {
      if (sigma1[s][a] == T(0)) continue;
      for (const auto& [t, pr] : m.successors(s, a))
        if (!seen[t]) {
          seen[t] = true;
          queue.push_back(t);
        }
    }
  }
  return seen;
}

template <class T>
std::vector<T> discounted_occupation(const BasicModel<T>& m, const Strategy1<T>& sigma1) {
  check_strategy(m, sigma1);
  const int n = m.num_states();
  Mat<T> A = Mat<T>::Identity(n, n) - m.delta_bar * kernel(m, sigma1).transpose();
  Vec<T> b = Vec<T>::Zero(n);
  b(m.space.empty()) = T(1) - m.delta_bar;
  std::vector<T> nu = to_std(solve_linear(A, b));
  const auto reach = reachable(m, sigma1);
  for (int s = 0; s < n; ++s)
    if (!reach[s] || nu[s] < T(0)) nu[s] = T(0);
  return nu;
}

template <class T>
std::vector<T> commitment_occupation(const BasicModel<T>& m) {
  if (m.noisy()) return discounted_occupation(m, constant_strategy(m, m.top()));
  std::vector<T> nu(m.num_states(), T(0));
  T w = T(1) - m.delta_bar;
  for (int t = 0; t < m.K; ++t) {
    nu[m.space.index(std::vector<int>(t, m.top()))] = w;
    w *= m.delta_bar;
  }
  nu[m.space.star()] = ipow(m.delta_bar, m.K);
  return nu;
}

template <class T>
OccupationMeasure<T> stationary_occupation(const BasicModel<T>& m, const Strategy1<T>& sigma1) {
  check_strategy(m, sigma1);
  OccupationMeasure<T> om;
  om.delta_bar = m.delta_bar;
  om.states = m.space.full_states();
  om.position.assign(m.num_states(), -1);
  for (size_t i = 0; i < om.states.size(); ++i) om.position[om.states[i]] = static_cast<int>(i);
  const int nf = static_cast<int>(om.states.size());

  std::vector<T> dist(m.num_states(), T(0));
  dist[m.space.empty()] = T(1);
  for (int step = 0; step < m.K; ++step) {
    std::vector<T> next(m.num_states(), T(0));
    for (int s = 0; s < m.num_states(); ++s) {
      if (dist[s] == T(0)) continue;
      for (int a = 0; a < m.n1(); ++a) {
        if (sigma1[s][a] == T(0)) continue;
        for (const auto& [t, pr] : m.successors(s, a)) next[t] += dist[s] * sigma1[s][a] * pr;
      }
    }
    dist = std::move(next);
  }
  om.p.assign(nf, T(0));
  for (int i = 0; i < nf; ++i) om.p[i] = dist[om.states[i]];

  om.Q.assign(nf, std::vector<T>(nf, T(0)));
  for (int i = 0; i < nf; ++i) {
    const int s = om.states[i];
    for (int a = 0; a < m.n1(); ++a) {
      if (sigma1[s][a] == T(0)) continue;
      for (const auto& [t, pr] : m.successors(s, a)) om.Q[i][om.position[t]] += sigma1[s][a] * pr;
    }
  }

  Mat<T> A = Mat<T>::Identity(nf, nf);
  Vec<T> b(nf);
  for (int i = 0; i < nf; ++i) {
    b(i) = (T(1) - m.delta_bar) * om.p[i];
    for (int j = 0; j < nf; ++j) A(j, i) -= m.delta_bar * om.Q[i][j];
  }
  om.mu = to_std(solve_linear(A, b));
  T total(0);
  for (T& x : om.mu) {
    if (x < T(0)) x = T(0);
    total += x;
  }
  if (total > T(0))
    for (T& x : om.mu) x /= total;
  return om;
}

template <class T>
T recursion_residual(const OccupationMeasure<T>& om) {
  const int nf = static_cast<int>(om.states.size());
  T worst(0);
  for (int j = 0; j < nf; ++j) {
    T r = om.mu[j] - (T(1) - om.delta_bar) * om.p[j];
    for (int i = 0; i < nf; ++i) r -= om.delta_bar * om.mu[i] * om.Q[i][j];
    if (scalar_abs(r) > worst) worst = scalar_abs(r);
  }
  return worst;
}

namespace {

template <class T>
std::vector<bool> membership(const OccupationMeasure<T>& om, const std::vector<int>& subset) {
  std::vector<bool> in(om.states.size(), false);
  for (int s : subset) {
    if (s < 0 || s >= static_cast<int>(om.position.size()) || om.position[s] < 0)
      throw FormatError("flow subsets must contain full-length states");
    in[om.position[s]] = true;
  }
  return in;
}

}  // namespace

template <class T>
FlowReport<T> flows(const OccupationMeasure<T>& om, const std::vector<int>& subset, double slack, bool proper) {
  if (subset.empty()) throw EmptySubset("flow subset is empty");
  const auto in = membership(om, subset);
  const bool all = std::all_of(in.begin(), in.end(), [](bool b) { return b; });
  if (all && proper) throw FullSet("flow subset is the whole state space");
  FlowReport<T> r;
  r.inflow = T(0);
  r.outflow = T(0);
  const int nf = static_cast<int>(om.states.size());
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < nf; ++j) {
      if (in[i] == in[j] || om.Q[i][j] == T(0)) continue;
      if (in[j])
        r.inflow += om.mu[i] * om.Q[i][j];
      else
        r.outflow += om.mu[i] * om.Q[i][j];
    }
  r.bound = (T(1) - om.delta_bar) / om.delta_bar;
  r.bound_holds = scalar_abs(T(r.inflow - r.outflow)) <= r.bound + from_double<T>(slack);
  return r;
}

template <class T>
T flow_between(const OccupationMeasure<T>& om, const std::vector<int>& from, const std::vector<int>& to) {
  const auto a = membership(om, from);
  const auto b = membership(om, to);
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] && b[i]) throw Overlap("flow sets overlap");
  T f(0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (size_t j = 0; j < b.size(); ++j)
      if (b[j]) f += om.mu[i] * om.Q[i][j];
  }
  return f;
}

template <class T>
JointWeights<T> joint_weights(const BasicModel<T>& m, const Strategy1<T>& sigma1) {
  JointWeights<T> w;
  w.strategic = discounted_occupation(m, sigma1);
  w.commitment = commitment_occupation(m);
  for (T& x : w.strategic) x *= T(1) - m.pi0;
  for (T& x : w.commitment) x *= m.pi0;
  w.strategic_reach = reachable(m, sigma1);
  w.commitment_reach = reachable(m, constant_strategy(m, m.top()));
  return w;
}

template <class T>
bool observation_reached(const BasicModel<T>& m, const JointWeights<T>& w, int observation) {
  for (int s : m.obs.states(observation))
    if (w.strategic_reach[s] || w.commitment_reach[s]) return true;
  return false;
}

template <class T>
PosteriorReport<T> posterior(const BasicModel<T>& m, const Strategy1<T>& sigma1, const JointWeights<T>& w,
                             int observation) {
  if (observation < 0 || observation >= m.num_observations()) throw FormatError("observation out of range");
  if (!observation_reached(m, w, observation))
    throw ZeroProbabilityObservation("observation has zero probability on path");
  PosteriorReport<T> r;
  r.observation = observation;
  r.mass = T(0);
  T commit(0);
  std::vector<T> act(m.n1(), T(0));
  for (int s : m.obs.states(observation)) {
    const T ws = w.strategic_reach[s] ? w.strategic[s] : T(0);
    const T wc = w.commitment_reach[s] ? w.commitment[s] : T(0);
    r.mass += ws + wc;
    commit += wc;
    for (int a = 0; a < m.n1(); ++a) act[a] += ws * sigma1[s][a];
    act[m.top()] += wc;
  }
  if (!(r.mass > T(0))) throw ZeroProbabilityObservation("observation has zero probability on path");
  r.commitment_prob = commit / r.mass;
  for (T& x : act) x /= r.mass;
  r.action_belief = std::move(act);
  for (int s : m.obs.states(observation)) {
    const T ws = w.strategic_reach[s] ? w.strategic[s] : T(0);
    const T wc = w.commitment_reach[s] ? w.commitment[s] : T(0);
    if (ws + wc > T(0)) r.state_belief.push_back({s, (ws + wc) / r.mass});
  }
  return r;
}

template <class T>
PosteriorReport<T> posterior(const BasicModel<T>& m, const Strategy1<T>& sigma1, int observation) {
  return posterior(m, sigma1, joint_weights(m, sigma1), observation);
}

template <class T>
std::vector<BlockDiagnostic<T>> block_diagnostics(const BasicModel<T>& m, const OccupationMeasure<T>& om,
                                                  double z, double y) {
  std::vector<std::vector<int>> by_category(m.K + 2);
  for (int s : om.states) by_category[category(m.space.state(s), m.top(), m.K)].push_back(s);
  const T scale = T(1) - om.delta_bar;
  auto pair_flow = [&](const std::vector<int>& from, const std::vector<int>& to) {
    T f(0);
    for (int s : from)
      for (int t : to) f += om.mu[om.position[s]] * om.Q[om.position[s]][om.position[t]];
    return f;
  };
  std::vector<BlockDiagnostic<T>> out;
  for (const Block& b : blocks(m.space, m.obs, m.top())) {
    if (b.category == 0) continue;
    BlockDiagnostic<T> d;
    d.category = b.category;
    d.observation = b.observation;
    d.mass = T(0);
    for (int s : b.states) d.mass += om.mu[om.position[s]];
    const auto& lower = by_category[b.category - 1];
    const auto& upper = by_category[b.category + 1];
    d.flow_to_lower = pair_flow(b.states, lower);
    d.flow_from_lower = pair_flow(lower, b.states);
    d.odds_numerator = d.flow_to_lower + pair_flow(b.star_part, b.states);
    d.odds_denominator = pair_flow(b.states, upper) + pair_flow(b.prime_part, by_category[b.category]);
    const T zb = from_double<T>(z) * scale;
    d.hypothesis = d.flow_to_lower <= zb && d.flow_from_lower <= zb;
    d.mass_small = d.mass <= from_double<T>(y) * scale;
    d.odds_below = d.odds_numerator < T(m.K - 1) * d.odds_denominator;
    out.push_back(std::move(d));
  }
  return out;
}

#define REPGAME_BELIEF(T)                                                                                     \
  template std::vector<bool> reachable<T>(const BasicModel<T>&, const Strategy1<T>&);                         \
  template std::vector<T> discounted_occupation<T>(const BasicModel<T>&, const Strategy1<T>&);                \
  template std::vector<T> commitment_occupation<T>(const BasicModel<T>&);                                     \
  template OccupationMeasure<T> stationary_occupation<T>(const BasicModel<T>&, const Strategy1<T>&);          \
  template T recursion_residual<T>(const OccupationMeasure<T>&);                                              \
  template FlowReport<T> flows<T>(const OccupationMeasure<T>&, const std::vector<int>&, double, bool);        \
  template T flow_between<T>(const OccupationMeasure<T>&, const std::vector<int>&, const std::vector<int>&);  \
  template JointWeights<T> joint_weights<T>(const BasicModel<T>&, const Strategy1<T>&);                       \
  template bool observation_reached<T>(const BasicModel<T>&, const JointWeights<T>&, int);                    \
  template PosteriorReport<T> posterior<T>(const BasicModel<T>&, const Strategy1<T>&, const JointWeights<T>&, \
                                           int);                                                              \
  template PosteriorReport<T> posterior<T>(const BasicModel<T>&, const Strategy1<T>&, int);                   \
  template std::vector<BlockDiagnostic<T>> block_diagnostics<T>(const BasicModel<T>&,                         \
                                                                const OccupationMeasure<T>&, double, double);

REPGAME_BELIEF(double)
REPGAME_BELIEF(Rational)

}  // namespace repgame
