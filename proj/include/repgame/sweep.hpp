#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "repgame/equilibrium.hpp"

namespace repgame {

struct SweepCell {
  double x = 0.5;
  int K = 1;
  double delta_bar = 0.99;
  double pi0 = 0.5;
};

// Every cell uses the product choice game with the given c_T, c_N and its own x, and delta = delta_bar.
struct SweepOptions {
  double c_T = 0.5;
  double c_N = 1.0;
  double tol = 1e-6;
  int workers = 1;
  long long policy_cap = 1 << 16;
};

// Below the cutoff the cell covers every verified profile of the pure search; at or above it, the
// cycle construction. Shares are discounted frequencies; min and max are taken over the profiles.
struct SweepRow {
  SweepCell cell;
  int cutoff = -1;
  std::string family;
  std::string status;  // "ok", "not verified" or the precondition message
  long long profiles = 0;
  long long verified = 0;
  bool truncated = false;
  double top_trusted_share_min = 0;  // strategic sum over b >= b* of F(a*, b)
  double top_trusted_blended_min = 0;
  double top_share_max = 0;  // strategic sum over b of F(a*, b)
  double welfare_min = 0;
  double welfare_max = 0;
  double share_bound = 0;    // 1 - 10 (1 - delta_bar)
  double welfare_bound = 0;  // u2(a*, b*) - 100 (1 - delta_bar)
  double eta = 0;            // 1 - top_share_max
};

SweepRow sweep_cell(const SweepCell& cell, const SweepOptions& options);
// Cells run concurrently up to options.workers; rows keep the input order.
std::vector<SweepRow> run_sweep(const std::vector<SweepCell>& cells, const SweepOptions& options);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace repgame
