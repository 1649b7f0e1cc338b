#include "repgame/best_reply.hpp"

#include <algorithm>
#include <deque>

#include "repgame/errors.hpp"
#include "repgame/linalg.hpp"

namespace repgame {

template <class T>
T stage_payoff(const BasicModel<T>& m, const ConsumerPolicy<T>& sigma2, int s, int a) {
  return expected_u1(m.game, a, m.policy_at(sigma2, s));
}

namespace {

template <class T>
void check_policy(const BasicModel<T>& m, const ConsumerPolicy<T>& sigma2) {
  if (static_cast<int>(sigma2.size()) != m.num_observations())
    throw FormatError("consumer policy must cover every observation");
  for (const auto& row : sigma2)
    if (static_cast<int>(row.size()) != m.n2()) throw FormatError("consumer policy row has the wrong width");
}

template <class T>
std::vector<T> pure_value(const BasicModel<T>& m, const CanonicalStrategy& pol, const ConsumerPolicy<T>& sigma2) {
  const int n = m.num_states();
  Mat<T> A = Mat<T>::Identity(n, n);
  Vec<T> b(n);
  for (int s = 0; s < n; ++s) {
    b(s) = (T(1) - m.delta) * stage_payoff(m, sigma2, s, pol[s]);
    for (const auto& [t, pr] : m.successors(s, pol[s])) A(s, t) -= m.delta * pr;
  }
  return to_std(solve_linear(A, b));
}

template <class T>
std::vector<std::vector<int>> optimal_sets(const BasicModel<T>& m, const std::vector<std::vector<T>>& q) {
  std::vector<std::vector<int>> out(q.size());
  for (size_t s = 0; s < q.size(); ++s) {
    T best = *std::max_element(q[s].begin(), q[s].end());
    for (int a = 0; a < m.n1(); ++a)
      if (q[s][a] >= best - band(best, q[s][a], m.tol.opt)) out[s].push_back(a);
  }
  return out;
}

}  // namespace

template <class T>
std::vector<T> policy_value(const BasicModel<T>& m, const Strategy1<T>& sigma1, const ConsumerPolicy<T>& sigma2) {
  check_policy(m, sigma2);
  if (static_cast<int>(sigma1.size()) != m.num_states()) throw FormatError("strategy must cover every state");
  const int n = m.num_states();
  Mat<T> A = Mat<T>::Identity(n, n);
  Vec<T> b = Vec<T>::Zero(n);
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < m.n1(); ++a) {
      if (sigma1[s][a] == T(0)) continue;
      b(s) += sigma1[s][a] * (T(1) - m.delta) * stage_payoff(m, sigma2, s, a);
      for (const auto& [t, pr] : m.successors(s, a)) A(s, t) -= m.delta * sigma1[s][a] * pr;
    }
  return to_std(solve_linear(A, b));
}

template <class T>
std::vector<std::vector<T>> action_values(const BasicModel<T>& m, const ConsumerPolicy<T>& sigma2,
                                          const std::vector<T>& value) {
  std::vector<std::vector<T>> q(m.num_states(), std::vector<T>(m.n1()));
  for (int s = 0; s < m.num_states(); ++s)
    for (int a = 0; a < m.n1(); ++a) {
      T cont(0);
      for (const auto& [t, pr] : m.successors(s, a)) cont += pr * value[t];
      q[s][a] = (T(1) - m.delta) * stage_payoff(m, sigma2, s, a) + m.delta * cont;
    }
  return q;
}

template <class T>
BestReplyResult<T> solve_best_reply(const BasicModel<T>& m, const ConsumerPolicy<T>& sigma2, SolveMethod method) {
  check_policy(m, sigma2);
  BestReplyResult<T> r;
  const int n = m.num_states();
  if (method == SolveMethod::value_iteration) {
    std::vector<T> v(n, T(0));
    const T stop = from_double<T>(1e-12);
    for (long long it = 0;; ++it) {
      if (it >= 10'000'000) throw NonConvergence("value iteration hit the iteration cap");
      auto q = action_values(m, sigma2, v);
      T diff(0);
      for (int s = 0; s < n; ++s) {
        T best = *std::max_element(q[s].begin(), q[s].end());
        if (scalar_abs(T(best - v[s])) > diff) diff = scalar_abs(T(best - v[s]));
        v[s] = best;
      }
      r.iterations = static_cast<int>(it + 1);
      if (diff <= stop) break;
    }
    r.value = v;
  } else {
    CanonicalStrategy pol(n, 0);
    for (int s = 0; s < n; ++s) {
      T best = stage_payoff(m, sigma2, s, 0);
      for (int a = 1; a < m.n1(); ++a) {
        T u = stage_payoff(m, sigma2, s, a);
        if (u > best) {
          best = u;
          pol[s] = a;
        }
      }
    }
    const T eps = is_exact_v<T> ? T(0) : from_double<T>(1e-13);
    for (int it = 0;; ++it) {
      if (it >= 10000) throw NonConvergence("policy iteration did not settle");
      r.value = pure_value(m, pol, sigma2);
      auto q = action_values(m, sigma2, r.value);
      bool changed = false;
      for (int s = 0; s < n; ++s) {
        int arg = pol[s];
        for (int a = 0; a < m.n1(); ++a)
          if (q[s][a] > q[s][arg] + eps * (T(1) + scalar_abs(q[s][arg]))) arg = a;
        if (arg != pol[s]) {
          pol[s] = arg;
          changed = true;
        }
      }
      r.iterations = it + 1;
      if (!changed) break;
    }
  }
  r.q = action_values(m, sigma2, r.value);
  r.optimal = optimal_sets(m, r.q);
  return r;
}

template <class T>
CanonicalEnumeration canonical_best_replies(const BasicModel<T>& m, const BestReplyResult<T>& br, long long cap) {
  CanonicalEnumeration out;
  const int n = m.num_states();
  std::vector<int> choice(n, 0);
  while (true) {
    if (static_cast<long long>(out.strategies.size()) >= cap) {
      out.truncated = true;
      break;
    }
    CanonicalStrategy s(n);
    for (int i = 0; i < n; ++i) s[i] = br.optimal[i][choice[i]];
    out.strategies.push_back(std::move(s));
    int i = n - 1;
    while (i >= 0 && ++choice[i] == static_cast<int>(br.optimal[i].size())) {
      choice[i] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return out;
}

namespace {

template <class T>
bool trajectory_reaches(const BasicModel<T>& m, const CanonicalStrategy& strategy, int from, int target) {
  std::vector<bool> seen(m.num_states(), false);
  int s = from;
  while (!seen[s]) {
    if (s == target) return true;
    seen[s] = true;
    s = m.space.advance(s, strategy[s]);
  }
  return false;
}

}  // namespace

template <class T>
std::optional<BackLoopWitness> detect_back_loop(const BasicModel<T>& m, const CanonicalStrategy& strategy,
                                                bool restrict_on_path) {
  if (static_cast<int>(strategy.size()) != m.num_states()) throw FormatError("strategy must cover every state");
  const int star = m.space.star();
  if (strategy[star] == m.top()) return std::nullopt;
  BackLoopWitness w;
  std::vector<bool> seen(m.num_states(), false);
  int s = star;
  do {
    if (seen[s]) return std::nullopt;
    seen[s] = true;
    w.path.push_back({s, strategy[s]});
    s = m.space.advance(s, strategy[s]);
  } while (s != star);
  w.path.push_back({star, strategy[star]});
  w.on_path = trajectory_reaches(m, strategy, m.space.empty(), star);
  if (restrict_on_path && !w.on_path) return std::nullopt;
  return w;
}

template <class T>
std::optional<BackLoopWitness> find_on_path_back_loop(const BasicModel<T>& m, const BestReplyResult<T>& br) {
  const int n = m.num_states();
  const int star = m.space.star();
  auto search = [&](int from, std::vector<int>& parent, std::vector<int>& via) {
    parent.assign(n, -2);
    via.assign(n, -1);
    std::deque<int> queue{from};
    parent[from] = -1;
    while (!queue.empty()) {
      int s = queue.front();
      queue.pop_front();
      if (s == star && s != from) return true;
      for (int a : br.optimal[s]) {
        int t = m.space.advance(s, a);
        if (parent[t] == -2) {
          parent[t] = s;
          via[t] = a;
          queue.push_back(t);
        }
      }
    }
    return false;
  };
  std::vector<int> parent, via;
  if (!search(m.space.empty(), parent, via) && m.space.empty() != star) return std::nullopt;
  for (int ap : br.optimal[star]) {
    if (ap == m.top()) continue;
    const int first = m.space.advance(star, ap);
    std::vector<int> chain;
    if (first == star) {
      chain = {star};
    } else {
      if (!search(first, parent, via)) continue;
      for (int s = star; s != first; s = parent[s]) chain.push_back(parent[s]);
      std::reverse(chain.begin(), chain.end());
      chain.insert(chain.begin(), star);
    }
    BackLoopWitness w;
    w.on_path = true;
    w.path.push_back({star, ap});
    for (size_t i = 1; i < chain.size(); ++i) {
      const int next = i + 1 < chain.size() ? chain[i + 1] : star;
      int act = -1;
      for (int a : br.optimal[chain[i]])
        if (m.space.advance(chain[i], a) == next) act = a;
      w.path.push_back({chain[i], act});
    }
    w.path.push_back({star, ap});
    return w;
  }
  return std::nullopt;
}

template <class T>
std::optional<BackLoopWitness> detect_eps_back_loop(const BasicModel<T>& m, const CanonicalStrategy& strategy) {
  if (!m.noisy()) return detect_back_loop(m, strategy, false);
  if (static_cast<int>(strategy.size()) != m.num_states()) throw FormatError("strategy must cover every state");
  const int star = m.space.star();
  const T floor = T(1) - m.signals.epsilon;
  auto likely = [&](int s) {
    std::vector<int> out;
    for (const auto& [t, pr] : m.successors(s, strategy[s]))
      if (pr > floor) out.push_back(t);
    return out;
  };
  std::vector<int> parent(m.num_states(), -2);
  std::deque<int> queue;
  for (int t : likely(star))
    if (t != star && parent[t] == -2) {
      parent[t] = star;
      queue.push_back(t);
    }
  int last = -1;
  while (!queue.empty() && last < 0) {
    int s = queue.front();
    queue.pop_front();
    for (int t : likely(s)) {
      if (t == star) {
        last = s;
        break;
      }
      if (parent[t] == -2) {
        parent[t] = s;
        queue.push_back(t);
      }
    }
  }
  if (last < 0) return std::nullopt;
  BackLoopWitness w;
  std::vector<int> chain;
  for (int s = last; s != star; s = parent[s]) chain.push_back(s);
  chain.push_back(star);
  std::reverse(chain.begin(), chain.end());
  for (int s : chain) w.path.push_back({s, strategy[s]});
  w.path.push_back({star, strategy[star]});
  // Any positive-probability route from the empty history counts as on path.
  std::vector<bool> seen(m.num_states(), false);
  std::deque<int> q{m.space.empty()};
  seen[m.space.empty()] = true;
  while (!q.empty()) {
    int s = q.front();
    q.pop_front();
    for (const auto& [t, pr] : m.successors(s, strategy[s]))
      if (!seen[t]) {
        seen[t] = true;
        q.push_back(t);
      }
  }
  w.on_path = seen[star];
  return w;
}

template <class T>
DeviationReport<T> deviation_oracle(const BasicModel<T>& m, const CanonicalStrategy& strategy,
                                    const ConsumerPolicy<T>& sigma2, double margin) {
  if (m.noisy()) throw PreconditionFailed("deviation oracle needs noiseless signals");
  check_policy(m, sigma2);
  auto loop = detect_back_loop(m, strategy, false);
  if (!loop) throw NoLoop("strategy has no back loop");
  DeviationReport<T> r;
  const int star = m.space.star();
  const int top = m.top();
  const T d = m.delta;
  const T m_margin = from_double<T>(margin);
  r.green = star;
  r.loop_action = strategy[star];
  r.white = loop->path[loop->path.size() - 2].first;
  r.white_oldest = m.space.history(r.white).front();
  const std::vector<T> v = pure_value(m, strategy, sigma2);
  r.strategy_value = v[r.white];
  r.green_value = v[star];

  const int w = r.white, ap = r.loop_action, app = r.white_oldest;
  r.deviation_a = (T(1) - d) * stage_payoff(m, sigma2, w, ap) + d * v[m.space.advance(w, ap)];
  CanonicalStrategy mod = strategy;
  mod[w] = ap;
  r.deviation_a_repeated = pure_value(m, mod, sigma2)[w];

  T partial(0), disc(1);
  int s = w;
  for (int i = 0; i < m.K; ++i) {
    const int a = i == 0 ? app : top;
    partial += disc * (T(1) - d) * stage_payoff(m, sigma2, s, a);
    disc *= d;
    s = m.space.advance(s, a);
  }
  r.deviation_b = partial + disc * v[s];
  r.deviation_b_repeated = partial / (T(1) - disc);

  r.star_at_green = (T(1) - d) * stage_payoff(m, sigma2, star, top) + d * v[star];

  const int after_a = m.space.advance(star, ap);
  const T lhs1 = (T(1) - d) * stage_payoff(m, sigma2, w, top) + d * v[star];
  const T rhs1 = (T(1) - d) * stage_payoff(m, sigma2, w, ap) + d * v[after_a];
  r.holds_3_1 = lhs1 >= rhs1 - m_margin;
  const T lhs2 = r.star_at_green;
  const T rhs2 = (T(1) - d) * stage_payoff(m, sigma2, star, ap) + d * v[after_a];
  r.holds_3_2 = lhs2 <= rhs2 + m_margin;

  r.a_improves = std::max(r.deviation_a, r.deviation_a_repeated) > r.strategy_value + m_margin;
  r.b_improves = std::max(r.deviation_b, r.deviation_b_repeated) > r.strategy_value + m_margin;
  r.star_improves = r.star_at_green > r.green_value + m_margin;
  return r;
}

#define REPGAME_BEST_REPLY(T)                                                                                    \
  template T stage_payoff<T>(const BasicModel<T>&, const ConsumerPolicy<T>&, int, int);                          \
  template std::vector<T> policy_value<T>(const BasicModel<T>&, const Strategy1<T>&, const ConsumerPolicy<T>&);  \
  template std::vector<std::vector<T>> action_values<T>(const BasicModel<T>&, const ConsumerPolicy<T>&,          \
                                                        const std::vector<T>&);                                  \
  template BestReplyResult<T> solve_best_reply<T>(const BasicModel<T>&, const ConsumerPolicy<T>&, SolveMethod);  \
  template CanonicalEnumeration canonical_best_replies<T>(const BasicModel<T>&, const BestReplyResult<T>&,       \
                                                          long long);                                            \
  template std::optional<BackLoopWitness> detect_back_loop<T>(const BasicModel<T>&, const CanonicalStrategy&,    \
                                                              bool);                                             \
  template std::optional<BackLoopWitness> find_on_path_back_loop<T>(const BasicModel<T>&,                        \
                                                                    const BestReplyResult<T>&);                  \
  template std::optional<BackLoopWitness> detect_eps_back_loop<T>(const BasicModel<T>&,                          \
                                                                  const CanonicalStrategy&);                     \
  template DeviationReport<T> deviation_oracle<T>(const BasicModel<T>&, const CanonicalStrategy&,                \
                                                  const ConsumerPolicy<T>&, double);

REPGAME_BEST_REPLY(double)
REPGAME_BEST_REPLY(Rational)

}  // namespace repgame
