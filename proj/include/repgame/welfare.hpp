#pragma once

#include <cstdint>
#include <vector>

#include "repgame/equilibrium.hpp"

namespace repgame {

// Discounted frequencies over (a, b), row-major |A| x |B|, weighted by (1 - delta_bar) delta_bar^t.
template <class T>
struct FrequencyTable {
  int n1 = 0, n2 = 0;
  std::vector<T> blended;     // pi0 commitment + (1 - pi0) strategic
  std::vector<T> strategic;
  std::vector<T> commitment;

  const T& at(const std::vector<T>& f, int a, int b) const { return f[a * n2 + b]; }
};

template <class T>
FrequencyTable<T> frequency(const EquilibriumProfile<T>& profile);

// Sum over b of f(a, b), optionally only over b >= from.
template <class T>
T action_share(const FrequencyTable<T>& table, const std::vector<T>& f, int a, int from = 0);

template <class T>
T consumer_welfare(const BasicStageGame<T>& g, const std::vector<T>& f);

template <class T>
T consumer_welfare(const EquilibriumProfile<T>& profile);

struct PeriodRecord {
  int state = -1;
  int action = -1;
  int signal = -1;
  int observation = -1;
  int reply = -1;
};

struct Transcript {
  std::uint64_t seed = 0;
  bool commitment = false;
  int termination = 0;  // last period played
  std::vector<PeriodRecord> periods;
};

struct SampleReport {
  long long episodes = 0;
  int n1 = 0, n2 = 0;
  std::vector<double> mean;    // blended (a, b) frequencies
  std::vector<double> radius;  // 99% normal-approximation half width per entry
  std::vector<double> signal_mean;  // recorded-signal frequencies
  std::vector<double> signal_radius;
  double max_deviation = 0;             // largest |mean - exact| over (a, b)
  double max_deviation_in_radii = 0;    // same, in units of the entry's radius
  std::vector<Transcript> transcripts;  // the first `keep` episodes
};

std::uint64_t splitmix64(std::uint64_t x);

// Episode i draws from mt19937_64 seeded with splitmix64(seed + i); results do not depend on workers.
SampleReport sample_paths(const EquilibriumProfile<double>& profile, long long n, std::uint64_t seed,
                          int workers = 1, int keep = 4);

// Exact recorded-signal frequencies implied by the blended action frequencies.
std::vector<double> signal_frequency(const Model& m, const FrequencyTable<double>& table);

struct Corollary1Report {
  double band = 0.05;
  std::vector<int> periods;       // t with delta^t inside (band, 1 - band)
  std::vector<double> p_star;     // strategic type at the all-a* window
  std::vector<double> p_top;      // strategic type plays a*
  double min_p_star = 1, min_p_top = 1;
  double constant_star = 0, constant_top = 0;  // (1 - min) / (1 - delta)
  int cutoff = -1;
  bool in_premise = false;  // K below the cutoff
};

template <class T>
Corollary1Report corollary1_check(const EquilibriumProfile<T>& profile, double band = 0.05);

// Least-squares slope through the origin of deficit against 1 - delta.
double fit_slope(const std::vector<double>& one_minus_delta, const std::vector<double>& deficit);

}  // namespace repgame
