#include "repgame/model.hpp"

#include "repgame/errors.hpp"

namespace repgame {

template <class T>
std::vector<std::pair<int, T>> BasicModel<T>::successors(int s, int a) const {
  std::vector<std::pair<int, T>> out;
  if (!noisy()) {
    out.push_back({space.advance(s, a), T(1)});
    return out;
  }
  for (int sig = 0; sig < n1(); ++sig)
    if (signal_prob[a][sig] != T(0)) out.push_back({space.advance(s, sig), signal_prob[a][sig]});
  return out;
}

template <class T>
BasicModel<T> make_model(const BasicStageGame<T>& g, int K, ObservationMode mode, const ActionPartition& partition,
                         const SignalModel<T>& signals, const T& delta, const T& delta_bar, const T& pi0,
                         const Tolerance& tol) {
  g.check();
  if (K < 1) throw FormatError("K must be at least 1");
  if (!(delta > T(0) && delta < T(1))) throw FormatError("delta must lie in (0, 1)");
  if (!(delta_bar > T(0) && delta_bar < T(1))) throw FormatError("delta_bar must lie in (0, 1)");
  if (!(pi0 > T(0) && pi0 < T(1))) throw InvalidPrior("pi0 must lie in (0, 1)");
  if (signals.epsilon < T(0) || !(signals.epsilon < T(1))) throw FormatError("epsilon must lie in [0, 1)");
  BasicModel<T> m;
  m.game = g;
  m.K = K;
  m.mode = mode;
  m.partition = partition;
  m.signals = signals;
  if (m.signals.noise_dist.empty())
    m.signals.noise_dist.assign(g.n1(), T(1) / T(g.n1()));
  if (static_cast<int>(m.signals.noise_dist.size()) != g.n1() || !is_distribution(m.signals.noise_dist, 1e-9))
    throw FormatError("noise_dist must be a distribution over actions1");
  m.delta = delta;
  m.delta_bar = delta_bar;
  m.pi0 = pi0;
  m.tol = tol;
  m.space = StateSpace(g.n1(), K);
  m.obs = ObservationMap(m.space, partition, mode);
  m.signal_prob.resize(g.n1());
  for (int a = 0; a < g.n1(); ++a) m.signal_prob[a] = signal_distribution(m.signals, a, g.n1());
  return m;
}

template <class T>
BasicModel<T> make_model(const BasicStageGame<T>& g, const ModelParams& p, const Tolerance& tol) {
  ActionPartition part = p.partition.empty() ? ActionPartition::finest(g.n1())
                                             : ActionPartition::from_cells(p.partition, g.n1());
  SignalModel<T> sig;
  sig.epsilon = from_double<T>(p.epsilon);
  sig.noise_dist = convert_vector<T>(p.noise_dist);
  const double db = p.delta_bar < 0 ? p.delta : p.delta_bar;
  return make_model(g, p.K, p.mode, part, sig, from_double<T>(p.delta), from_double<T>(db),
                    from_double<T>(p.pi0), tol);
}

template <class U, class T>
BasicModel<U> convert_model(const BasicModel<T>& m, const Tolerance& tol) {
  SignalModel<U> sig;
  auto conv = [](const T& x) {
    if constexpr (std::is_same_v<U, T>)
      return x;
    else if constexpr (is_exact_v<U>)
      return rationalize(to_double(x));
    else
      return to_double(x);
  };
  sig.epsilon = conv(m.signals.epsilon);
  for (const T& x : m.signals.noise_dist) sig.noise_dist.push_back(conv(x));
  return make_model(convert_game<U>(m.game), m.K, m.mode, m.partition, sig, conv(m.delta),
                    conv(m.delta_bar), conv(m.pi0), tol);
}

template <class T>
BasicModel<T> with_K(const BasicModel<T>& m, int K) {
  return make_model(m.game, K, m.mode, m.partition, m.signals, m.delta, m.delta_bar, m.pi0, m.tol);
}

template <class T>
BasicModel<T> with_discount(const BasicModel<T>& m, const T& delta, const T& delta_bar) {
  BasicModel<T> out = m;
  if (!(delta > T(0) && delta < T(1)) || !(delta_bar > T(0) && delta_bar < T(1)))
    throw FormatError("discount factors must lie in (0, 1)");
  out.delta = delta;
  out.delta_bar = delta_bar;
  return out;
}

template <class T>
Strategy1<T> constant_strategy(const BasicModel<T>& m, int action) {
  return Strategy1<T>(m.num_states(), pure_action<T>(m.n1(), action));
}

template <class T>
Strategy1<T> to_mixed(const BasicModel<T>& m, const CanonicalStrategy& s) {
  Strategy1<T> out(m.num_states());
  for (int i = 0; i < m.num_states(); ++i) out[i] = pure_action<T>(m.n1(), s[i]);
  return out;
}

template <class T>
ConsumerPolicy<T> constant_policy(const BasicModel<T>& m, int action) {
  return ConsumerPolicy<T>(m.num_observations(), pure_action<T>(m.n2(), action));
}

#define REPGAME_MODEL(T)                                                                                 \
  template struct BasicModel<T>;                                                                        \
  template BasicModel<T> make_model<T>(const BasicStageGame<T>&, int, ObservationMode,                  \
                                       const ActionPartition&, const SignalModel<T>&, const T&,         \
                                       const T&, const T&, const Tolerance&);                           \
  template BasicModel<T> make_model<T>(const BasicStageGame<T>&, const ModelParams&, const Tolerance&); \
  template BasicModel<T> with_K<T>(const BasicModel<T>&, int);                                          \
  template BasicModel<T> with_discount<T>(const BasicModel<T>&, const T&, const T&);                    \
  template Strategy1<T> constant_strategy<T>(const BasicModel<T>&, int);                                \
  template Strategy1<T> to_mixed<T>(const BasicModel<T>&, const CanonicalStrategy&);                    \
  template ConsumerPolicy<T> constant_policy<T>(const BasicModel<T>&, int);

REPGAME_MODEL(double)
REPGAME_MODEL(Rational)
template BasicModel<Rational> convert_model<Rational, double>(const BasicModel<double>&, const Tolerance&);
template BasicModel<double> convert_model<double, Rational>(const BasicModel<Rational>&, const Tolerance&);
template BasicModel<double> convert_model<double, double>(const BasicModel<double>&, const Tolerance&);

}  // namespace repgame
