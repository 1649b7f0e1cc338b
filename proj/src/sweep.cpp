#include "repgame/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <ostream>
#include <thread>

#include "repgame/errors.hpp"
#include "repgame/welfare.hpp"

namespace repgame {

namespace {

void record(SweepRow& row, const EquilibriumProfile<double>& p, bool first) {
  const auto& g = p.model.game;
  const int top = g.top();
  const int bs = b_star(g, p.model.tol);
  const auto f = frequency(p);
  const double trusted = action_share(f, f.strategic, top, bs);
  const double trusted_blended = action_share(f, f.blended, top, bs);
  const double share = action_share(f, f.strategic, top);
  const double w = consumer_welfare(g, f.blended);
  if (first) {
    row.top_trusted_share_min = trusted;
    row.top_trusted_blended_min = trusted_blended;
    row.top_share_max = share;
    row.welfare_min = row.welfare_max = w;
    return;
  }
  row.top_trusted_share_min = std::min(row.top_trusted_share_min, trusted);
  row.top_trusted_blended_min = std::min(row.top_trusted_blended_min, trusted_blended);
  row.top_share_max = std::max(row.top_share_max, share);
  row.welfare_min = std::min(row.welfare_min, w);
  row.welfare_max = std::max(row.welfare_max, w);
}

}  // namespace

SweepRow sweep_cell(const SweepCell& cell, const SweepOptions& options) {
  SweepRow row;
  row.cell = cell;
  const StageGame g = product_choice(options.c_T, options.c_N, cell.x);
  ModelParams mp;
  mp.K = cell.K;
  mp.delta = cell.delta_bar;
  mp.delta_bar = cell.delta_bar;
  mp.pi0 = cell.pi0;
  const Model m = make_model(g, mp);
  row.share_bound = 1 - 10 * (1 - cell.delta_bar);
  row.welfare_bound = g.u2(g.top(), b_star(g)) - 100 * (1 - cell.delta_bar);
  row.cutoff = cutoff_K(g);
  if (cell.K < row.cutoff) {
    row.family = "pure-search";
    const auto search = search_pure_equilibria(m, options.tol, options.policy_cap);
    row.profiles = search.candidates;
    row.verified = static_cast<long long>(search.verified.size());
    row.truncated = search.truncated;
    for (size_t i = 0; i < search.verified.size(); ++i) record(row, search.verified[i], i == 0);
    row.status = row.verified ? "ok" : "not verified";
  } else {
    row.family = "cycle";
    try {
      const auto p = construct_cycle_equilibrium(m);
      row.profiles = 1;
      if (verify(p, options.tol).is_pbe) {
        row.verified = 1;
        record(row, p, true);
        row.status = "ok";
      } else {
        row.status = "not verified";
      }
    } catch (const PreconditionFailed& e) {
      row.status = e.what();
    }
  }
  row.eta = row.verified ? 1 - row.top_share_max : 0;
  return row;
}

std::vector<SweepRow> run_sweep(const std::vector<SweepCell>& cells, const SweepOptions& options) {
  std::vector<SweepRow> rows(cells.size());
  std::atomic<size_t> next{0};
  auto job = [&] {
    for (size_t i; (i = next.fetch_add(1)) < cells.size();) rows[i] = sweep_cell(cells[i], options);
  };
  const int workers = static_cast<int>(std::clamp<size_t>(options.workers, 1, std::max<size_t>(cells.size(), 1)));
  if (workers == 1) {
    job();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < workers; ++k) pool.emplace_back(job);
    for (auto& t : pool) t.join();
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "x,K,delta_bar,pi0,cutoff,phase,family,status,profiles,verified,truncated,top_trusted_share_min,"
        "top_trusted_blended_min,top_share_max,welfare_min,welfare_max,share_bound,welfare_bound,eta\n";
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '"', '\'');
    os << format_scalar(r.cell.x) << "," << r.cell.K << "," << format_scalar(r.cell.delta_bar) << ","
       << format_scalar(r.cell.pi0) << "," << r.cutoff << "," << (r.cell.K < r.cutoff ? "below" : "at-or-above") << ","
       << r.family << ",\"" << status << "\"," << r.profiles << "," << r.verified << "," << r.truncated << ","
       << format_scalar(r.top_trusted_share_min) << "," << format_scalar(r.top_trusted_blended_min) << ","
       << format_scalar(r.top_share_max) << "," << format_scalar(r.welfare_min) << ","
       << format_scalar(r.welfare_max) << "," << format_scalar(r.share_bound) << ","
       << format_scalar(r.welfare_bound) << "," << format_scalar(r.eta) << "\n";
  }
}

}  // namespace repgame
