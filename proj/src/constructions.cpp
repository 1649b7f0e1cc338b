#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "repgame/equilibrium.hpp"
#include "repgame/errors.hpp"

namespace repgame {

namespace {

template <class T>
struct Crossing {
  T weight;   // on the higher action
  int lower;  // best reply below the target at that weight
};

// Smallest weight w on `hi` in w hi + (1 - w) lo at which `target` is a best reply together with
// some strictly lower action.
template <class T>
std::optional<Crossing<T>> lowest_mix_supporting(const BasicStageGame<T>& g, int lo, int hi, int target,
                                                 const Tolerance& tol) {
  std::vector<T> points = {T(0), T(1)};
  for (int b = 0; b < g.n2(); ++b) {
    if (b == target) continue;
    const T d0 = g.u2(lo, target) - g.u2(lo, b);
    const T d1 = g.u2(hi, target) - g.u2(hi, b);
    if (d0 == d1) continue;
    const T w = d0 / (d0 - d1);
    if (w > T(0) && w < T(1)) points.push_back(w);
  }
  std::sort(points.begin(), points.end());
  for (const T& w : points) {
    auto br = pure_best_replies(g, two_point(g.n1(), hi, lo, w), tol);
    if (std::find(br.begin(), br.end(), target) == br.end()) continue;
    int lower = -1;
    for (int b : br)
      if (b < target) lower = b;
    if (lower >= 0) return Crossing<T>{w, lower};
  }
  return std::nullopt;
}

template <class T>
struct Tie {
  T weight;  // on the higher seller action
  int lower, upper;  // lowest and highest consumer best replies there
};

// Points of w hi + (1 - w) lo, ascending, where more than one consumer action is a best reply.
template <class T>
std::vector<Tie<T>> best_reply_ties(const BasicStageGame<T>& g, int lo, int hi, const Tolerance& tol) {
  std::vector<T> points;
  for (int b = 0; b < g.n2(); ++b)
    for (int c = b + 1; c < g.n2(); ++c) {
      const T d0 = g.u2(lo, c) - g.u2(lo, b);
      const T d1 = g.u2(hi, c) - g.u2(hi, b);
      if (d0 == d1) continue;
      const T w = d0 / (d0 - d1);
      if (w >= T(0) && w <= T(1)) points.push_back(w);
    }
  std::sort(points.begin(), points.end());
  std::vector<Tie<T>> out;
  for (const T& w : points) {
    if (!out.empty() && out.back().weight == w) continue;
    const auto br = pure_best_replies(g, two_point(g.n1(), hi, lo, w), tol);
    if (br.size() < 2) continue;
    out.push_back({w, br.front(), br.back()});
  }
  return out;
}

template <class T>
std::string show(const T& x) {
  return format_scalar(x);
}

template <class T>
void require_clean(const BasicModel<T>& m, ObservationMode mode, const std::string& who) {
  if (m.noisy()) throw PreconditionFailed(who + " requires noiseless monitoring");
  if (m.mode != mode)
    throw PreconditionFailed(who + " requires " + (mode == ObservationMode::counts ? "counts" : "sequence") +
                             " observations");
  if (!m.partition.is_finest()) throw PreconditionFailed(who + " requires the finest partition");
}

// Member of the observation whose window lists entries by rank, lowest rank oldest.
template <class T, class Rank>
int representative(const BasicModel<T>& m, int o, Rank rank) {
  auto h = m.space.history(m.obs.states(o).front());
  std::stable_sort(h.begin(), h.end(), [&](int a, int b) { return rank(a) < rank(b); });
  const int s = m.space.index(h);
  if (m.obs.of(s) != o) throw FormatError("representative window left its observation");
  return s;
}

template <class T>
void add_strategic_beliefs(EquilibriumProfile<T>& p, const std::vector<int>& reps) {
  const auto w = joint_weights(p.model, p.sigma1);
  for (int o = 0; o < p.model.num_observations(); ++o)
    if (!observation_reached(p.model, w, o)) p.off_path_beliefs[o] = {{reps[o], false, T(1)}};
}

// Replaces the rows flagged `open` by an optimal action against sigma2, preferring a*.
template <class T>
void complete_with_best_reply(EquilibriumProfile<T>& p, const std::vector<bool>& open) {
  const auto br = solve_best_reply(p.model, p.sigma2);
  for (int s = 0; s < p.model.num_states(); ++s) {
    if (!open[s]) continue;
    const auto& opt = br.optimal[s];
    const int top = p.model.top();
    const int a = std::find(opt.begin(), opt.end(), top) != opt.end() ? top : opt.front();
    p.sigma1[s] = pure_action<T>(p.model.n1(), a);
  }
}

// Unreached windows shorter than the memory, longest first: the consumer takes the lowest pure
// reply that some optimal seller action at a member state of the observation justifies, and that
// state becomes the observation's representative.
template <class T>
void settle_early_windows(EquilibriumProfile<T>& p, std::vector<bool>& open, std::vector<int>& reps) {
  const auto& m = p.model;
  for (int len = m.K - 1; len >= 0; --len) {
    for (int o = 0; o < m.num_observations(); ++o) {
      const auto& members = m.obs.states(o);
      if (static_cast<int>(m.space.history(members.front()).size()) != len) continue;
      bool early = false;
      for (int s : members) early = early || open[s];
      if (!early) continue;
      bool settled = false;
      for (int b = 0; b < m.n2() && !settled; ++b) {
        p.sigma2[o] = pure_action<T>(m.n2(), b);
        const auto br = solve_best_reply(m, p.sigma2);
        for (int s : members) {
          for (int a : br.optimal[s]) {
            const auto replies = pure_best_replies(m.game, pure_action<T>(m.n1(), a), m.tol);
            if (std::find(replies.begin(), replies.end(), b) == replies.end()) continue;
            p.sigma1[s] = pure_action<T>(m.n1(), a);
            open[s] = false;
            reps[o] = s;
            settled = true;
            break;
          }
          if (settled) break;
        }
      }
      // TODO: mixed consumer replies when no pure one is self-confirming
      if (!settled) p.sigma2[o] = pure_action<T>(m.n2(), lowest_best_reply(m.game, pure_action<T>(m.n1(), m.top()), m.tol));
    }
  }
}

template <class T>
T geometric(const T& d, int terms) {
  T s(0), pw(1);
  for (int i = 0; i < terms; ++i, pw *= d) s += pw;
  return s;
}

struct PcParams {
  double c_T, c_N, x;
};

template <class T>
PcParams product_choice_params(const BasicStageGame<T>& g, const std::string& who) {
  if (g.n1() != 2 || g.n2() != 2) throw PreconditionFailed(who + " is built for the product choice game");
  PcParams pc{to_double(g.u1(0, 1)) - 1, -to_double(g.u1(1, 0)), to_double(g.u2(1, 0))};
  const auto ref = product_choice(pc.c_T, pc.c_N, pc.x);
  for (int i = 0; i < 4; ++i)
    if (std::abs(ref.payoff1[i] - to_double(g.payoff1[i])) > 1e-12 ||
        std::abs(ref.payoff2[i] - to_double(g.payoff2[i])) > 1e-12)
      throw PreconditionFailed(who + " is built for the product choice game");
  return pc;
}

}  // namespace

template <class T>
EquilibriumProfile<T> construct_cycle_equilibrium(const BasicModel<T>& m) {
  const std::string who = "cycle construction";
  require_clean(m, ObservationMode::counts, who);
  const auto& g = m.game;
  if (!is_optimal_pure_commitment(g, m.tol)) throw PreconditionFailed(who + ": optimal pure commitment fails");
  const auto rep = cutoff_report(g, m.tol);
  if (m.K < rep.weak)
    throw PreconditionFailed(who + ": memory " + std::to_string(m.K) + " is below the cutoff " +
                             std::to_string(rep.weak));
  const int K = m.K, top = m.top(), ap = rep.deviation_action;
  const int bs = b_star(g, m.tol);
  auto cross = lowest_mix_supporting(g, ap, top, bs, m.tol);
  if (!cross) throw PreconditionFailed(who + ": no mixture of a* and a' makes b* and a lower reply both optimal");
  const T alpha = cross->weight;
  const int b1 = cross->lower;
  const int b2 = lowest_best_reply(g, pure_action<T>(g.n1(), ap), m.tol);
  const T& d = m.delta;
  const T dk1 = ipow(d, K - 1);
  const T S = geometric(d, K);
  const T VK = (g.u1(ap, bs) + (S - T(1)) * g.u1(top, bs)) / S;
  const T den = (g.u1(ap, bs) - g.u1(ap, b1)) - (T(1) - dk1) * (g.u1(top, bs) - g.u1(top, b1));
  if (den == T(0)) throw PreconditionFailed(who + ": off-path indifference is degenerate");
  const T beta = ((T(1) - dk1) * g.u1(top, b1) + dk1 * VK - g.u1(ap, b1)) / den;
  if (beta < T(0) || beta > T(1))
    throw PreconditionFailed(who + ": off-path weight on b* is " + show(beta) + ", outside [0, 1]");

  EquilibriumProfile<T> p;
  p.model = m;
  p.family = "cycle";
  const int n1 = m.n1();
  p.sigma1.assign(m.num_states(), pure_action<T>(n1, top));
  std::vector<bool> open(m.num_states(), false);
  auto classify = [&](const std::vector<int>& h, bool& other, int& nap) {
    other = false;
    nap = 0;
    for (int a : h) {
      if (a == ap) ++nap;
      if (a != ap && a != top) other = true;
    }
  };
  for (int s = 0; s < m.num_states(); ++s) {
    const auto& h = m.space.history(s);
    const int len = static_cast<int>(h.size());
    bool other;
    int nap;
    classify(h, other, nap);
    if (len < K) {
      if (len == K - 1 && !other && nap == 0) p.sigma1[s] = pure_action<T>(n1, ap);
      else if (other || nap > 0) open[s] = true;
    } else if (!other && nap <= 1) {
      bool lapse = true;
      for (int i = 1; i < len && lapse; ++i) lapse = h[i] == top;
      p.sigma1[s] = pure_action<T>(n1, lapse ? ap : top);
    } else if (!other) {
      if (len >= 2 && h[len - 2] == ap && h[len - 1] == ap) p.sigma1[s] = two_point(n1, top, ap, alpha);
    } else if (h.back() != top && h.back() != ap) {
      p.sigma1[s] = pure_action<T>(n1, ap);
    } else {
      open[s] = true;
    }
  }

  const int n2 = m.n2();
  p.sigma2.assign(m.num_observations(), pure_action<T>(n2, bs));
  int opening = -1;  // all-a* window one short of full memory, where the first lapse is due
  for (int o = 0; o < m.num_observations(); ++o) {
    const auto& h = m.space.history(m.obs.states(o).front());
    bool other;
    int nap;
    classify(h, other, nap);
    const int len = static_cast<int>(h.size());
    if (len < K) {
      if (!other && nap == 0 && len == K - 1) opening = o;
      continue;
    }
    if (!other && nap >= 2) p.sigma2[o] = two_point(n2, bs, b1, beta);
    if (other) p.sigma2[o] = pure_action<T>(n2, b2);
  }
  if (opening >= 0) {
    const auto belief = posterior(m, p.sigma1, opening).action_belief;
    const auto br = pure_best_replies(g, belief, m.tol);
    if (std::find(br.begin(), br.end(), bs) == br.end()) p.sigma2[opening] = pure_action<T>(n2, br.front());
  }

  std::vector<int> reps(m.num_observations());
  for (int o = 0; o < m.num_observations(); ++o)
    reps[o] = representative(m, o, [&](int a) { return a == top ? -2 : a == ap ? -1 : a; });
  settle_early_windows(p, open, reps);
  add_strategic_beliefs(p, reps);
  complete_with_best_reply(p, open);

  p.constants = {{"a_prime", T(ap)}, {"b_prime", T(b1)}, {"b_double_prime", T(b2)}, {"alpha", alpha},
                 {"beta", beta},     {"V_K", VK}};
  // continuation value with a' sitting m periods back
  for (int mm = 1; mm <= K; ++mm) {
    const T dm = ipow(d, K - mm);
    p.constants.push_back({"V_" + std::to_string(mm), (T(1) - dm) * g.u1(top, bs) + dm * VK});
  }
  return p;
}

template <class T>
EquilibriumProfile<T> construct_noncommitment_equilibrium(const BasicModel<T>& m) {
  const std::string who = "non-commitment construction";
  require_clean(m, ObservationMode::counts, who);
  const auto& g = m.game;
  if (is_optimal_pure_commitment(g, m.tol)) throw PreconditionFailed(who + ": optimal pure commitment holds");
  const int K = m.K, top = m.top(), low = 0;
  const int bs = b_star(g, m.tol);
  int ap = -1, bp = -1;
  for (int a = 0; a < g.n1(); ++a) {
    if (a == top) continue;
    for (int b : pure_best_replies(g, pure_action<T>(g.n1(), a), m.tol))
      if (ap < 0 || g.u1(a, b) > g.u1(ap, bp)) {
        ap = a;
        bp = b;
      }
  }
  T best_any = g.u1(top, bs);
  for (int a = 0; a < g.n1(); ++a)
    for (int b : pure_best_replies(g, pure_action<T>(g.n1(), a), m.tol)) best_any = std::max(best_any, g.u1(a, b));
  if (ap < 0 || g.u1(ap, bp) < best_any) throw PreconditionFailed(who + ": no a' other than a* attains the best pair");

  EquilibriumProfile<T> p;
  p.model = m;
  p.family = "non-commitment";
  const int n1 = m.n1(), n2 = m.n2();
  T phi(1), beta(1);
  int bpp = bp;
  if (ap != low) {
    auto cross = lowest_mix_supporting(g, low, ap, bp, m.tol);
    if (!cross) throw PreconditionFailed(who + ": b' stays optimal against the lowest action");
    phi = cross->weight;
    bpp = cross->lower;
    const T dK = ipow(m.delta, K);
    const T den = (g.u1(low, bp) - g.u1(low, bpp)) - (T(1) - dK) * (g.u1(ap, bp) - g.u1(ap, bpp));
    if (den == T(0)) throw PreconditionFailed(who + ": punishment indifference is degenerate");
    beta = ((T(1) - dK) * g.u1(ap, bpp) + dK * g.u1(ap, bp) - g.u1(low, bpp)) / den;
    if (beta < T(0) || beta > T(1))
      throw PreconditionFailed(who + ": punishment weight on b' is " + show(beta) + ", outside [0, 1]");
  }
  p.sigma1.assign(m.num_states(), pure_action<T>(n1, ap));
  if (ap != low)
    for (int s = 0; s < m.num_states(); ++s) {
      const auto& h = m.space.history(s);
      if (!h.empty() && h.back() != top && h.back() != ap) p.sigma1[s] = two_point(n1, ap, low, phi);
    }
  p.sigma2.assign(m.num_observations(), pure_action<T>(n2, bp));
  for (int o = 0; o < m.num_observations(); ++o) {
    const auto& h = m.space.history(m.obs.states(o).front());
    bool other = false, all_top = true;
    for (int a : h) {
      if (a != top) all_top = false;
      if (a != top && a != ap) other = true;
    }
    if (!h.empty() && all_top) p.sigma2[o] = pure_action<T>(n2, bs);
    if (other && ap != low) p.sigma2[o] = two_point(n2, bp, bpp, beta);
  }
  const int empty_obs = m.obs.of(m.space.empty());
  p.sigma2[empty_obs] =
      pure_action<T>(n2, lowest_best_reply(g, posterior(m, p.sigma1, empty_obs).action_belief, m.tol));

  std::vector<int> reps(m.num_observations());
  for (int o = 0; o < m.num_observations(); ++o)
    reps[o] = representative(m, o, [&](int a) { return a == top ? -2 : a == ap ? -1 : a; });
  add_strategic_beliefs(p, reps);

  p.constants = {{"a_prime", T(ap)}, {"b_prime", T(bp)}};
  if (ap != low) {
    const T dK = ipow(m.delta, K);
    const T mixed = beta * g.u1(ap, bp) + (T(1) - beta) * g.u1(ap, bpp);
    const T lowest_path = (T(1) - m.delta) * g.u1(low, bp) + m.delta * (T(1) - dK) * mixed + dK * m.delta * g.u1(ap, bp);
    p.constants.push_back({"b_double_prime", T(bpp)});
    p.constants.push_back({"phi", phi});
    p.constants.push_back({"beta", beta});
    p.constants.push_back({"lowest_action_value", lowest_path});
  }
  return p;
}

namespace {

template <class T>
EquilibriumProfile<T> sequence_good(const BasicModel<T>& m) {
  const std::string who = "sequence construction";
  require_clean(m, ObservationMode::sequence, who);
  const auto& g = m.game;
  if (!is_optimal_pure_commitment(g, m.tol)) throw PreconditionFailed(who + ": optimal pure commitment fails");
  const int top = m.top(), low = 0;
  const int bs = b_star(g, m.tol);
  const T& d = m.delta;
  // seller's gain from staying low over returning to a* at a punished window, against pure reply b
  auto stay_gain = [&](int b) { return g.u1(low, b) - (T(1) - d) * g.u1(top, b) - d * g.u1(top, bs); };
  std::optional<Tie<T>> tie;
  T beta(0);
  for (const auto& t : best_reply_ties(g, low, top, m.tol)) {
    if (t.upper > bs) continue;
    const T f0 = stay_gain(t.lower), f1 = stay_gain(t.upper);
    if (f0 > T(0) || f1 < T(0) || f0 == f1) continue;
    tie = t;
    beta = f0 / (f0 - f1);
    break;
  }
  if (!tie) throw PreconditionFailed(who + ": no consumer mixture makes the seller indifferent at a punished window");
  const T alpha = tie->weight;
  const int bp = tie->lower, bh = tie->upper;

  EquilibriumProfile<T> p;
  p.model = m;
  p.family = "sequence-good";
  p.sigma1.assign(m.num_states(), pure_action<T>(m.n1(), top));
  p.sigma2.assign(m.num_observations(), pure_action<T>(m.n2(), bs));
  for (int s = 0; s < m.num_states(); ++s) {
    const auto& h = m.space.history(s);
    if (h.empty() || h.back() == top) continue;
    p.sigma1[s] = two_point(m.n1(), top, low, alpha);
    p.sigma2[m.obs.of(s)] = two_point(m.n2(), bh, bp, beta);
  }
  std::vector<int> reps(m.num_observations());
  for (int o = 0; o < m.num_observations(); ++o) reps[o] = m.obs.states(o).front();
  add_strategic_beliefs(p, reps);
  p.constants = {{"alpha", alpha}, {"beta", beta}, {"b_prime", T(bp)}, {"b_upper", T(bh)}};
  return p;
}

EquilibriumProfile<double> sequence_cycle(const Model& m) {
  const std::string who = "sequence cycle";
  require_clean(m, ObservationMode::sequence, who);
  if (m.K < 2) throw PreconditionFailed(who + ": memory one makes the order of actions irrelevant");
  const auto pc = product_choice_params(m.game, who);
  const double d = m.delta, cT = pc.c_T, cN = pc.c_N, x = pc.x;
  const int K = m.K;
  const double dK = std::pow(d, K);
  const double D = (1 + cT) - (1 - d) * (1 + cN);
  const double b0 = (d - dK - (1 - d) * cN) / D, b1 = dK / D;
  const double v0 = (1 + cT) * b0, v1 = (1 + cT) * b1;
  const double slope = d * (1 - v1) - (1 - d) * (cT - cN) / (1 + cN);
  if (slope == 0) throw PreconditionFailed(who + ": indifference system is singular");
  const double W = (d * v0 + (1 - d) * (cN + (cT - cN) * cN / (1 + cN))) / slope;
  const double q = (W + cN) / (1 + cN);
  const double beta = b0 + b1 * W;
  if (!(q > 0 && q < 1))
    throw PreconditionFailed(who + ": trust at the clean window would be " + format_scalar(q) + ", outside (0, 1)");
  if (!(beta > 0 && beta < 1))
    throw PreconditionFailed(who + ": trust after a lapse would be " + format_scalar(beta) + ", outside (0, 1)");
  const int L = 0, H = 1, N = 0, Tn = 1;
  const int star = m.space.star();

  EquilibriumProfile<double> p;
  p.model = m;
  p.family = "sequence-cycle";
  p.sigma1.assign(m.num_states(), pure_action<double>(2, H));
  p.sigma2.assign(m.num_observations(), pure_action<double>(2, Tn));
  for (int s = 0; s < m.num_states(); ++s) {
    const auto& h = m.space.history(s);
    if (h.empty()) continue;
    if (h.back() == L) {
      p.sigma1[s] = two_point(2, H, L, x);
      p.sigma2[m.obs.of(s)] = two_point(2, Tn, N, beta);
    }
  }
  p.sigma2[m.obs.of(star)] = two_point(2, Tn, N, q);
  auto trust_at_star = [&](double lambda) {
    p.sigma1[star] = two_point(2, L, H, lambda);
    return posterior(m, p.sigma1, m.obs.of(star)).action_belief[H];
  };
  if (trust_at_star(1.0) > x)
    throw PreconditionFailed(who + ": prior on the commitment type keeps the clean window above the trust threshold");
  double lo = 0, hi = 1;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (trust_at_star(mid) > x ? lo : hi) = mid;
  }
  const double lambda = 0.5 * (lo + hi);
  const double residual = trust_at_star(lambda) - x;
  std::vector<int> reps(m.num_observations());
  for (int o = 0; o < m.num_observations(); ++o) reps[o] = m.obs.states(o).front();
  add_strategic_beliefs(p, reps);
  p.constants = {{"lambda", lambda}, {"q", q}, {"beta", beta}, {"W", W}, {"V_lapse", v0 + v1 * W},
                 {"belief_residual", residual}};
  const auto gap = payoff_gap(p);
  p.constants.push_back({"eta", gap.eta});
  return p;
}

}  // namespace

template <class T>
EquilibriumProfile<T> construct_sequence_equilibria(const BasicModel<T>& m, SequenceVariant which) {
  if (which == SequenceVariant::good) return sequence_good(m);
  if constexpr (std::is_same_v<T, double>)
    return sequence_cycle(m);
  else
    throw PreconditionFailed("sequence cycle: the cycle weight is located numerically, use floating mode");
}

CycleMemorySearch locate_cycle_memory(const Model& base, int max_K, double tol) {
  CycleMemorySearch out;
  for (int K = 2; K <= max_K; ++K) {
    try {
      auto p = sequence_cycle(with_K(base, K));
      auto r = verify(p, tol);
      std::ostringstream msg;
      msg << (r.is_pbe ? "verified" : "not verified") << ", eta " << format_scalar(*p.constant("eta"))
          << ", worst gain " << format_scalar(std::max(r.worst_p1_deviation_gain, r.worst_p2_regret));
      out.attempts.push_back({K, msg.str()});
      if (r.is_pbe && *p.constant("eta") > 0) {
        out.K = K;
        break;
      }
    } catch (const PreconditionFailed& e) {
      out.attempts.push_back({K, e.what()});
    }
  }
  return out;
}

template <class T>
EquilibriumProfile<T> construct_submodular_cycle(const BasicModel<T>& m) {
  const std::string who = "submodular cycle";
  require_clean(m, ObservationMode::counts, who);
  const auto pc = product_choice_params(m.game, who);
  const auto& g = m.game;
  const T cT = g.u1(0, 1) - T(1), cN = -g.u1(1, 0), x = g.u2(1, 0);
  if (cT < cN) throw PreconditionFailed(who + ": requires c_T >= c_N");
  if (!(T(1) + cT > T(m.K) * (T(1) + cN))) throw PreconditionFailed(who + ": requires 1 + c_T > K (1 + c_N)");
  if (m.K != 1) throw PreconditionFailed(who + ": only memory one is constructed");
  (void)pc;
  const T& d = m.delta;
  const T q = cN / (d * (T(1) + cT));
  const T r = m.pi0 * (T(1) - x) / (x * (T(1) - m.pi0));
  if (!(r < T(1))) throw PreconditionFailed(who + ": prior on the commitment type is too large");
  const T pH = r / (m.delta_bar * (T(1) - r));
  if (!(q > T(0) && q < T(1))) throw PreconditionFailed(who + ": trust after H would be " + show(q));
  if (!(pH > T(0) && pH < x)) throw PreconditionFailed(who + ": effort after L would be " + show(pH));
  const int L = 0, H = 1, N = 0, Tn = 1;
  EquilibriumProfile<T> p;
  p.model = m;
  p.family = "submodular-cycle";
  const int sH = m.space.index({H}), sL = m.space.index({L});
  p.sigma1.assign(m.num_states(), pure_action<T>(2, L));
  p.sigma1[sL] = two_point(2, H, L, pH);
  p.sigma2.assign(m.num_observations(), pure_action<T>(2, N));
  p.sigma2[m.obs.of(sH)] = two_point(2, Tn, N, q);
  const int e = m.obs.of(m.space.empty());
  p.sigma2[e] = pure_action<T>(2, lowest_best_reply(g, posterior(m, p.sigma1, e).action_belief, m.tol));
  p.constants = {{"q", q}, {"p", pH}, {"V_L", T(0)}, {"V_H", (T(1) - d) * cN / d}};
  return p;
}

#define REPGAME_CONSTRUCT(T)                                                                             \
  template EquilibriumProfile<T> construct_cycle_equilibrium<T>(const BasicModel<T>&);                  \
  template EquilibriumProfile<T> construct_noncommitment_equilibrium<T>(const BasicModel<T>&);          \
  template EquilibriumProfile<T> construct_sequence_equilibria<T>(const BasicModel<T>&, SequenceVariant); \
  template EquilibriumProfile<T> construct_submodular_cycle<T>(const BasicModel<T>&);

REPGAME_CONSTRUCT(double)
REPGAME_CONSTRUCT(Rational)

}  // namespace repgame
