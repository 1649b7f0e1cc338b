#include "repgame/welfare.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "repgame/errors.hpp"

namespace repgame {

template <class T>
FrequencyTable<T> frequency(const EquilibriumProfile<T>& p) {
  const auto& m = p.model;
  FrequencyTable<T> f;
  f.n1 = m.n1();
  f.n2 = m.n2();
  const int cells = f.n1 * f.n2;
  f.strategic.assign(cells, T(0));
  f.commitment.assign(cells, T(0));
  const auto ns = discounted_occupation(m, p.sigma1);
  const auto nc = commitment_occupation(m);
  for (int s = 0; s < m.num_states(); ++s) {
    const auto& beta = p.sigma2[m.obs.of(s)];
    for (int b = 0; b < f.n2; ++b) {
      if (beta[b] == T(0)) continue;
      if (nc[s] != T(0)) f.commitment[m.top() * f.n2 + b] += nc[s] * beta[b];
      if (ns[s] == T(0)) continue;
      for (int a = 0; a < f.n1; ++a)
        if (p.sigma1[s][a] != T(0)) f.strategic[a * f.n2 + b] += ns[s] * p.sigma1[s][a] * beta[b];
    }
  }
  f.blended.resize(cells);
  for (int i = 0; i < cells; ++i) f.blended[i] = m.pi0 * f.commitment[i] + (T(1) - m.pi0) * f.strategic[i];
  return f;
}

template <class T>
T action_share(const FrequencyTable<T>& table, const std::vector<T>& f, int a, int from) {
  T s(0);
  for (int b = std::max(from, 0); b < table.n2; ++b) s += table.at(f, a, b);
  return s;
}

template <class T>
T consumer_welfare(const BasicStageGame<T>& g, const std::vector<T>& f) {
  if (static_cast<int>(f.size()) != g.n1() * g.n2()) throw FormatError("frequency table does not match the game");
  T w(0);
  for (int a = 0; a < g.n1(); ++a)
    for (int b = 0; b < g.n2(); ++b) w += f[a * g.n2() + b] * g.u2(a, b);
  return w;
}

template <class T>
T consumer_welfare(const EquilibriumProfile<T>& p) {
  return consumer_welfare(p.model.game, frequency(p).blended);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int draw(const std::vector<double>& p, double u) {
  double acc = 0;
  int last = -1;
  for (int i = 0; i < static_cast<int>(p.size()); ++i) {
    if (p[i] <= 0) continue;
    last = i;
    acc += p[i];
    if (u < acc) return i;
  }
  return last;
}

struct Episode {
  std::vector<double> counts;         // (a, b) visits
  std::vector<double> signal_counts;  // recorded signals
  Transcript transcript;
};

void play(const Model& m, const EquilibriumProfile<double>& p, std::uint64_t seed, bool record, Episode& e) {
  std::mt19937_64 rng(seed);
  std::fill(e.counts.begin(), e.counts.end(), 0.0);
  std::fill(e.signal_counts.begin(), e.signal_counts.end(), 0.0);
  auto& tr = e.transcript;
  tr = Transcript{};
  tr.seed = seed;
  tr.commitment = uniform(rng) < m.pi0;
  const double db = m.delta_bar;
  int s = m.space.empty();
  for (int t = 0;; ++t) {
    const int a = tr.commitment ? m.top() : draw(p.sigma1[s], uniform(rng));
    const int o = m.obs.of(s);
    const int b = draw(p.sigma2[o], uniform(rng));
    const int r = m.noisy() ? draw(m.signal_prob[a], uniform(rng)) : a;
    e.counts[a * m.n2() + b] += 1;
    e.signal_counts[r] += 1;
    if (record) tr.periods.push_back({s, a, r, o, b});
    s = m.space.advance(s, r);
    if (uniform(rng) >= db) {
      tr.termination = t;
      break;
    }
  }
}

}  // namespace

SampleReport sample_paths(const EquilibriumProfile<double>& p, long long n, std::uint64_t seed, int workers, int keep) {
  if (n < 1) throw FormatError("episode count must be at least 1");
  const auto& m = p.model;
  const int cells = m.n1() * m.n2();
  const double w = 1 - m.delta_bar;
  workers = std::max(1, workers);

  struct Partial {
    std::vector<double> sum, sq, sig, sigsq;
  };
  // fixed-size chunks summed in index order keep the result independent of the worker count
  const long long chunk = 1024;
  const long long chunks = (n + chunk - 1) / chunk;
  std::vector<Partial> parts(static_cast<size_t>(chunks));
  std::vector<Transcript> kept(static_cast<size_t>(std::min<long long>(keep, n)));
  std::atomic<long long> next{0};
  auto job = [&] {
    Episode e;
    e.counts.resize(cells);
    e.signal_counts.resize(m.n1());
    for (long long c; (c = next.fetch_add(1)) < chunks;) {
      Partial& part = parts[c];
      part.sum.assign(cells, 0.0);
      part.sq.assign(cells, 0.0);
      part.sig.assign(m.n1(), 0.0);
      part.sigsq.assign(m.n1(), 0.0);
      for (long long i = c * chunk; i < std::min(n, (c + 1) * chunk); ++i) {
        const bool record = i < static_cast<long long>(kept.size());
        play(m, p, splitmix64(seed + static_cast<std::uint64_t>(i)), record, e);
        for (int k = 0; k < cells; ++k) {
          const double x = w * e.counts[k];
          part.sum[k] += x;
          part.sq[k] += x * x;
        }
        for (int r = 0; r < m.n1(); ++r) {
          const double x = w * e.signal_counts[r];
          part.sig[r] += x;
          part.sigsq[r] += x * x;
        }
        if (record) kept[i] = std::move(e.transcript);
      }
    }
  };
  workers = static_cast<int>(std::min<long long>(workers, chunks));
  if (workers == 1) {
    job();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < workers; ++k) pool.emplace_back(job);
    for (auto& t : pool) t.join();
  }

  SampleReport out;
  out.episodes = n;
  out.n1 = m.n1();
  out.n2 = m.n2();
  auto finish = [&](int size, auto sum_of, auto sq_of, std::vector<double>& mean, std::vector<double>& radius) {
    mean.assign(size, 0.0);
    radius.assign(size, 0.0);
    for (int c = 0; c < size; ++c) {
      double s = 0, q = 0;
      for (const auto& part : parts) {
        s += sum_of(part)[c];
        q += sq_of(part)[c];
      }
      const double mu = s / n;
      const double var = n > 1 ? std::max(0.0, (q - n * mu * mu) / (n - 1)) : 0.0;
      mean[c] = mu;
      radius[c] = 2.576 * std::sqrt(var / n);
    }
  };
  finish(cells, [](const Partial& x) -> const std::vector<double>& { return x.sum; },
         [](const Partial& x) -> const std::vector<double>& { return x.sq; }, out.mean, out.radius);
  finish(m.n1(), [](const Partial& x) -> const std::vector<double>& { return x.sig; },
         [](const Partial& x) -> const std::vector<double>& { return x.sigsq; }, out.signal_mean, out.signal_radius);

  const auto exact = frequency(p);
  for (int c = 0; c < cells; ++c) {
    const double dev = std::abs(out.mean[c] - exact.blended[c]);
    out.max_deviation = std::max(out.max_deviation, dev);
    if (dev > 0) out.max_deviation_in_radii = std::max(out.max_deviation_in_radii, out.radius[c] > 0 ? dev / out.radius[c] : 1e300);
  }
  out.transcripts = std::move(kept);
  return out;
}

std::vector<double> signal_frequency(const Model& m, const FrequencyTable<double>& table) {
  std::vector<double> out(m.n1(), 0.0);
  for (int a = 0; a < m.n1(); ++a) {
    const double fa = action_share(table, table.blended, a);
    for (int r = 0; r < m.n1(); ++r) out[r] += fa * m.signal_prob[a][r];
  }
  return out;
}

template <class T>
Corollary1Report corollary1_check(const EquilibriumProfile<T>& p, double band) {
  const auto& m = p.model;
  Corollary1Report r;
  r.band = band;
  try {
    r.cutoff = cutoff_K(m.game, m.tol);
  } catch (const Error&) {
    r.cutoff = -1;
  }
  r.in_premise = r.cutoff > 0 && m.K < r.cutoff;
  const double d = to_double(m.delta);
  std::vector<T> dist(m.num_states(), T(0));
  dist[m.space.empty()] = T(1);
  double dt = 1;
  for (int t = 0; dt > band; ++t, dt *= d) {
    if (dt < 1 - band) {
      T top(0);
      for (int s = 0; s < m.num_states(); ++s) top += dist[s] * p.sigma1[s][m.top()];
      r.periods.push_back(t);
      r.p_star.push_back(t >= m.K ? to_double(dist[m.space.star()]) : 0.0);
      r.p_top.push_back(to_double(top));
      r.min_p_star = std::min(r.min_p_star, r.p_star.back());
      r.min_p_top = std::min(r.min_p_top, r.p_top.back());
    }
    std::vector<T> next(m.num_states(), T(0));
    for (int s = 0; s < m.num_states(); ++s) {
      if (dist[s] == T(0)) continue;
      for (int a = 0; a < m.n1(); ++a) {
        if (p.sigma1[s][a] == T(0)) continue;
        for (const auto& [s2, pr] : m.successors(s, a)) next[s2] += dist[s] * p.sigma1[s][a] * pr;
      }
    }
    dist = std::move(next);
  }
  r.constant_star = (1 - r.min_p_star) / (1 - d);
  r.constant_top = (1 - r.min_p_top) / (1 - d);
  return r;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) throw FormatError("slope fit needs matching non-empty series");
  double xy = 0, xx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    xy += x[i] * y[i];
    xx += x[i] * x[i];
  }
  if (xx == 0) throw FormatError("slope fit needs a nonzero regressor");
  return xy / xx;
}

#define REPGAME_WELFARE(T)                                                                          \
  template FrequencyTable<T> frequency<T>(const EquilibriumProfile<T>&);                           \
  template T action_share<T>(const FrequencyTable<T>&, const std::vector<T>&, int, int);          \
  template T consumer_welfare<T>(const BasicStageGame<T>&, const std::vector<T>&);                \
  template T consumer_welfare<T>(const EquilibriumProfile<T>&);                                   \
  template Corollary1Report corollary1_check<T>(const EquilibriumProfile<T>&, double);

REPGAME_WELFARE(double)
REPGAME_WELFARE(Rational)

}  // namespace repgame
