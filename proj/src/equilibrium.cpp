#include "repgame/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "repgame/errors.hpp"

namespace repgame {

template <class T>
std::vector<T> consumer_belief(const EquilibriumProfile<T>& p, const JointWeights<T>& w, int o) {
  const auto& m = p.model;
  if (observation_reached(m, w, o)) return posterior(m, p.sigma1, w, o).action_belief;
  auto it = p.off_path_beliefs.find(o);
  if (it == p.off_path_beliefs.end() || it->second.empty())
    throw MissingOffPathBelief("no belief for zero-probability observation " + m.obs.label(o, m.game.actions1));
  std::vector<T> act(m.n1(), T(0));
  T total(0);
  for (const auto& atom : it->second) {
    if (atom.state < 0 || atom.state >= m.num_states() || m.obs.of(atom.state) != o)
      throw FormatError("belief atom state is inconsistent with observation " + m.obs.label(o, m.game.actions1));
    if (atom.weight < T(0)) throw FormatError("negative belief weight");
    total += atom.weight;
    if (atom.commitment)
      act[m.top()] += atom.weight;
    else
      for (int a = 0; a < m.n1(); ++a) act[a] += atom.weight * p.sigma1[atom.state][a];
  }
  if (!(total > T(0))) throw FormatError("belief weights sum to zero");
  for (T& x : act) x /= total;
  return act;
}

template <class T>
VerificationReport verify(const EquilibriumProfile<T>& p, double tol, bool check_off_path) {
  const auto& m = p.model;
  if (static_cast<int>(p.sigma1.size()) != m.num_states()) throw FormatError("sigma1 must cover every state");
  for (const auto& row : p.sigma1)
    if (static_cast<int>(row.size()) != m.n1() || !is_distribution(row)) throw FormatError("sigma1 row is not a distribution");
  for (const auto& row : p.sigma2)
    if (static_cast<int>(row.size()) != m.n2() || !is_distribution(row)) throw FormatError("sigma2 row is not a distribution");

  VerificationReport r;
  r.off_path_checked = check_off_path;
  const auto br = solve_best_reply(m, p.sigma2);
  const auto value = policy_value(m, p.sigma1, p.sigma2);
  const auto q = action_values(m, p.sigma2, value);
  const auto w = joint_weights(m, p.sigma1);
  r.strategic_value = to_double(value[m.space.empty()]);

  for (int s = 0; s < m.num_states(); ++s) {
    const bool on = w.strategic_reach[s];
    int alt = std::max_element(q[s].begin(), q[s].end()) - q[s].begin();
    double gain = std::max(to_double(T(br.value[s] - value[s])), to_double(T(q[s][alt] - value[s])));
    gain = std::max(gain, 0.0);
    r.worst_p1_deviation_gain = std::max(r.worst_p1_deviation_gain, gain);
    if (on) r.worst_p1_on_path = std::max(r.worst_p1_on_path, gain);
    if (gain > tol && (on || check_off_path))
      r.failing_sites.push_back({"1", s, m.space.label(s, m.game.actions1), on, alt, gain});
  }

  for (int o = 0; o < m.num_observations(); ++o) {
    const bool on = observation_reached(m, w, o);
    if (!on && !check_off_path) continue;
    const auto alpha = consumer_belief(p, w, o);
    std::vector<T> u(m.n2());
    for (int b = 0; b < m.n2(); ++b) u[b] = expected_u2(m.game, alpha, b);
    const int best = std::max_element(u.begin(), u.end()) - u.begin();
    double regret = 0;
    for (int b = 0; b < m.n2(); ++b)
      if (p.sigma2[o][b] > T(0)) regret = std::max(regret, to_double(T(u[best] - u[b])));
    r.worst_p2_regret = std::max(r.worst_p2_regret, regret);
    if (on) r.worst_p2_on_path = std::max(r.worst_p2_on_path, regret);
    if (regret > tol) r.failing_sites.push_back({"2", o, m.obs.label(o, m.game.actions1), on, best, regret});
  }
  r.is_nash = r.worst_p1_on_path <= tol && r.worst_p2_on_path <= tol;
  r.is_pbe = check_off_path && r.is_nash && r.worst_p1_deviation_gain <= tol && r.worst_p2_regret <= tol;
  return r;
}

template <class T>
T theorem1_bound(const BasicStageGame<T>& g, const T& delta, int K, const Tolerance& tol) {
  const T dk = ipow(delta, K);
  return (T(1) - dk) * g.u1(g.top(), b_low(g, tol)) + dk * g.u1(g.top(), b_star(g, tol));
}

template <class T>
SecurityReport assert_security(const EquilibriumProfile<T>& p, double slack) {
  const auto& m = p.model;
  SecurityReport r;
  r.bound = to_double(theorem1_bound(m.game, m.delta, m.K, m.tol));
  r.always_top_value = to_double(policy_value(m, constant_strategy(m, m.top()), p.sigma2)[m.space.empty()]);
  r.delta_lower = to_double(delta_lower(m.game, m.pi0, m.tol));
  r.applies = to_double(m.delta) > r.delta_lower;
  const int bs = b_star(m.game, m.tol);
  T below(0);
  const auto& at_star = p.sigma2[m.obs.of(m.space.star())];
  for (int b = 0; b < bs; ++b) below += at_star[b];
  r.top_trusted = below == T(0);
  r.holds = r.always_top_value >= r.bound - slack;
  return r;
}

template <class T>
PayoffGap payoff_gap(const EquilibriumProfile<T>& p) {
  const auto& m = p.model;
  PayoffGap g;
  g.strategic_value = to_double(policy_value(m, p.sigma1, p.sigma2)[m.space.empty()]);
  const auto ns = discounted_occupation(m, p.sigma1);
  const auto nc = commitment_occupation(m);
  T welfare(0);
  for (int s = 0; s < m.num_states(); ++s) {
    const auto& beta = p.sigma2[m.obs.of(s)];
    T strat(0);
    for (int a = 0; a < m.n1(); ++a)
      if (p.sigma1[s][a] != T(0))
        for (int b = 0; b < m.n2(); ++b) strat += p.sigma1[s][a] * beta[b] * m.game.u2(a, b);
    T com(0);
    for (int b = 0; b < m.n2(); ++b) com += beta[b] * m.game.u2(m.top(), b);
    welfare += (T(1) - m.pi0) * ns[s] * strat + m.pi0 * nc[s] * com;
  }
  g.consumer_welfare = to_double(welfare);
  const int bs = b_star(m.game, m.tol);
  g.eta = std::min(to_double(m.game.u1(m.top(), bs)) - g.strategic_value,
                   to_double(m.game.u2(m.top(), bs)) - g.consumer_welfare);
  return g;
}

PureSearch search_pure_equilibria(const Model& m, double tol, long long policy_cap, long long br_cap) {
  PureSearch out;
  const int no = m.num_observations();
  long long total = 1;
  for (int o = 0; o < no && total <= policy_cap; ++o) total *= m.n2();
  if (total > policy_cap) {
    out.truncated = true;
    total = policy_cap;
  }
  for (long long code = 0; code < total; ++code) {
    ConsumerPolicy<double> sigma2(no);
    long long c = code;
    for (int o = 0; o < no; ++o, c /= m.n2()) sigma2[o] = pure_action<double>(m.n2(), static_cast<int>(c % m.n2()));
    ++out.consumer_policies;
    const auto br = solve_best_reply(m, sigma2);
    const auto all = canonical_best_replies(m, br, br_cap);
    if (all.truncated) out.truncated = true;
    for (const auto& s : all.strategies) {
      ++out.candidates;
      EquilibriumProfile<double> p;
      p.model = m;
      p.sigma1 = to_mixed(m, s);
      p.sigma2 = sigma2;
      p.family = "pure-search";
      if (verify(p, tol, false).is_nash) out.verified.push_back(std::move(p));
    }
  }
  return out;
}

EquilibriumProfile<double> to_double_profile(const EquilibriumProfile<Rational>& p) {
  EquilibriumProfile<double> out;
  out.model = convert_model<double>(p.model, p.model.tol);
  out.sigma1 = convert_table<double>(p.sigma1);
  out.sigma2 = convert_table<double>(p.sigma2);
  for (const auto& [o, atoms] : p.off_path_beliefs)
    for (const auto& a : atoms) out.off_path_beliefs[o].push_back({a.state, a.commitment, to_double(a.weight)});
  out.family = p.family;
  for (const auto& [k, v] : p.constants) out.constants.push_back({k, to_double(v)});
  return out;
}

#define REPGAME_EQUILIBRIUM(T)                                                                             \
  template std::vector<T> consumer_belief<T>(const EquilibriumProfile<T>&, const JointWeights<T>&, int);  \
  template VerificationReport verify<T>(const EquilibriumProfile<T>&, double, bool);                       \
  template T theorem1_bound<T>(const BasicStageGame<T>&, const T&, int, const Tolerance&);                 \
  template SecurityReport assert_security<T>(const EquilibriumProfile<T>&, double);                        \
  template PayoffGap payoff_gap<T>(const EquilibriumProfile<T>&);

REPGAME_EQUILIBRIUM(double)
REPGAME_EQUILIBRIUM(Rational)

}  // namespace repgame
