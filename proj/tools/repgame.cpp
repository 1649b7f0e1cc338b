#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "repgame/errors.hpp"
#include "repgame/io.hpp"
#include "repgame/sweep.hpp"

using namespace repgame;

namespace {

enum Exit { kOk = 0, kUsage = 1, kVerifyFailed = 2, kPrecondition = 3 };

struct Args {
  std::string game;
  std::string scenario;
  std::string profile;
  std::string out;
  std::optional<double> tol;
  bool exact = false;
  int workers = 1;
  std::optional<std::uint64_t> seed;

  std::string family;
  std::string policy;
  std::string strategy;
  std::string method = "policy-iteration";
  bool nash_only = false;
  long long episodes = 100000;
  int keep = 4;
  std::optional<double> pi0;
  double z = 1, y = 1;
  long long cap = 100000;
  std::vector<double> sweep_x{0.5}, sweep_delta_bar{0.99, 0.999}, sweep_pi0{0.5};
  std::vector<int> sweep_K{1, 2, 3};
  double c_T = 0.5, c_N = 1;
};

struct Usage : Error {
  using Error::Error;
};

double tolerance(const Args& a) { return a.tol.value_or(a.exact ? 1e-12 : 1e-6); }

// "pc" or "pc:c_T,c_N,x" selects the product choice template; anything else is a path.
ExactStageGame game_from(const std::string& spec) {
  if (spec == "pc") return read_game(Json{{"template", "product_choice"}});
  if (spec.rfind("pc:", 0) == 0) {
    std::vector<std::string> parts;
    std::stringstream ss(spec.substr(3));
    for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
    if (parts.size() != 3) throw Usage("--game pc: expects three values c_T,c_N,x, got '" + spec + "'");
    return product_choice<Rational>(parse_rational(parts[0]), parse_rational(parts[1]), parse_rational(parts[2]));
  }
  return load_game(spec);
}

ExactStageGame require_game(const Args& a, const Scenario* s) {
  if (!a.game.empty()) return game_from(a.game);
  if (s && s->game) return game_from(*s->game);
  throw Usage("--game is required (a game file, 'pc' or 'pc:c_T,c_N,x')");
}

Scenario require_scenario(const Args& a) {
  if (a.scenario.empty()) throw Usage("--scenario is required for this command");
  return load_scenario(a.scenario);
}

template <class T>
Tolerance model_tol(const Args& a) {
  return a.exact ? Tolerance::exact() : Tolerance{};
}

template <class T>
BasicModel<T> require_model(const Args& a) {
  const Scenario s = require_scenario(a);
  return build_model<T>(require_game(a, &s), s, model_tol<T>(a));
}

template <class T>
EquilibriumProfile<T> require_profile(const Args& a) {
  if (a.profile.empty()) throw Usage("--profile is required for this command");
  return read_profile<T>(read_json_file(a.profile));
}

class Output {
 public:
  explicit Output(const std::string& dir) : dir_(dir) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }
  bool enabled() const { return !dir_.empty(); }
  void write(const std::string& name, const std::string& text) const {
    if (enabled()) write_text_file((std::filesystem::path(dir_) / name).string(), text);
  }
  template <class F>
  void csv(const std::string& name, F&& fill) const {
    if (!enabled()) return;
    std::ostringstream os;
    fill(os);
    write(name, os.str());
  }

 private:
  std::string dir_;
};

std::string names(const std::vector<int>& idx, const std::vector<std::string>& n) {
  std::string out;
  for (size_t i = 0; i < idx.size(); ++i) out += (i ? " " : "") + n[idx[i]];
  return out.empty() ? "-" : out;
}

std::string yes(bool b) { return b ? "yes" : "no"; }

// check

template <class T>
int run_check(const Args& a) {
  const ExactStageGame exact = require_game(a, nullptr);
  const BasicStageGame<T> g = convert_game<T>(exact);
  const Tolerance tol = model_tol<T>(a);
  const auto msm = validate_msm(g, tol);
  const auto fosd = check_fosd_chain(convert_game<double>(exact));
  const bool opc = is_optimal_pure_commitment(g, tol);
  const int bs = b_star(g, tol), bl = b_low(g, tol);
  std::cout << "msm=" << yes(msm.ok()) << "\n"
            << "decreasing_in_a=" << yes(msm.decreasing_in_a) << "\n"
            << "increasing_in_b=" << yes(msm.increasing_in_b) << "\n"
            << "u1_increasing_differences=" << yes(msm.u1_increasing_differences) << "\n"
            << "u2_increasing_differences=" << yes(msm.u2_increasing_differences) << "\n"
            << "fosd_ranked=" << yes(fosd.ranked) << "\n"
            << "fosd_mesh_too_coarse=" << yes(fosd.mesh_too_coarse) << "\n"
            << "optimal_pure_commitment=" << yes(opc) << "\n"
            << "commitment_action=" << g.actions1[g.top()] << "\n"
            << "b_star=" << g.actions2[bs] << "\n"
            << "b_low=" << g.actions2[bl] << "\n";
  Json j;
  j["msm"] = {{"ok", msm.ok()},
              {"decreasing_in_a", msm.decreasing_in_a},
              {"increasing_in_b", msm.increasing_in_b},
              {"u1_increasing_differences", msm.u1_increasing_differences},
              {"u2_increasing_differences", msm.u2_increasing_differences},
              {"decreasing_in_a_witnesses", msm.decreasing_in_a_witnesses},
              {"increasing_in_b_witnesses", msm.increasing_in_b_witnesses},
              {"u1_differences_witnesses", msm.u1_differences_witnesses},
              {"u2_differences_witnesses", msm.u2_differences_witnesses}};
  Json sets = Json::array();
  for (const auto& s : fosd.best_reply_sets) {
    Json names_json = Json::array();
    for (int b : s) names_json.push_back(g.actions2[b]);
    sets.push_back(names_json);
  }
  j["fosd"] = {{"ranked", fosd.ranked},
               {"mesh_too_coarse", fosd.mesh_too_coarse},
               {"violation", {{"beta", fosd.beta}, {"beta_prime", fosd.beta_prime}}},
               {"best_reply_sets", sets}};
  j["optimal_pure_commitment"] = opc;
  j["b_star"] = g.actions2[bs];
  j["b_low"] = g.actions2[bl];
  Output(a.out).write("check.json", dump(j));
  return kOk;
}

// cutoff

template <class T>
int run_cutoff(const Args& a) {
  Scenario s;
  const bool has_scenario = !a.scenario.empty();
  if (has_scenario) s = load_scenario(a.scenario);
  const BasicStageGame<T> g = convert_game<T>(require_game(a, has_scenario ? &s : nullptr));
  const Tolerance tol = model_tol<T>(a);
  Rational pi0 = a.pi0 ? rationalize(*a.pi0) : s.pi0;
  const T prior = is_exact_v<T> ? T(pi0) : T(to_double(pi0));
  const auto report = cutoff_report(g, tol);
  const T eta = eta_star(g, tol);
  const auto dl = delta_lower_report(g, prior, tol);
  std::cout << "K_bar=" << report.weak << "\n"
            << "K_bar_strict=" << report.strict << "\n"
            << "deviation_action=" << (report.deviation_action >= 0 ? g.actions1[report.deviation_action] : "-")
            << "\n"
            << "eta_star=" << format_scalar(eta) << "\n"
            << "pi0=" << format_scalar(prior) << "\n"
            << "delta_lower=" << format_scalar(dl.weak) << "\n"
            << "delta_lower_strict=" << format_scalar(dl.strict) << "\n";
  Json j;
  j["K_bar"] = report.weak;
  j["K_bar_strict"] = report.strict;
  j["deviation_action"] = report.deviation_action >= 0 ? Json(g.actions1[report.deviation_action]) : Json();
  j["eta_star"] = write_scalar(eta);
  j["pi0"] = write_scalar(prior);
  j["delta_lower"] = write_scalar(dl.weak);
  j["delta_lower_strict"] = write_scalar(dl.strict);
  Output(a.out).write("cutoff.json", dump(j));
  return kOk;
}

// best-reply

template <class T>
int run_best_reply(const Args& a) {
  BasicModel<T> m;
  ConsumerPolicy<T> sigma2;
  if (!a.profile.empty()) {
    auto p = require_profile<T>(a);
    m = p.model;
    sigma2 = p.sigma2;
  } else {
    m = require_model<T>(a);
    if (a.policy.empty()) throw Usage("best-reply needs --policy or --profile");
  }
  if (!a.policy.empty()) sigma2 = read_policy(m, read_json_file(a.policy));
  const SolveMethod method =
      a.method == "value-iteration" ? SolveMethod::value_iteration : SolveMethod::policy_iteration;
  const auto br = solve_best_reply(m, sigma2, method);
  const auto all = canonical_best_replies(m, br, a.cap);
  const auto loop = find_on_path_back_loop(m, br);
  const auto& n1 = m.game.actions1;
  std::cout << "iterations=" << br.iterations << "\n"
            << "value_at_empty=" << format_scalar(br.value[m.space.empty()]) << "\n"
            << "canonical_best_replies=" << all.strategies.size() << "\n"
            << "truncated=" << yes(all.truncated) << "\n"
            << "on_path_back_loop=" << yes(loop.has_value()) << "\n";
  const Output out(a.out);
  out.csv("values.csv", [&](std::ostream& os) {
    os << "state,value";
    for (const auto& x : n1) os << ",q_" << x;
    os << ",optimal\n";
    for (int s = 0; s < m.num_states(); ++s) {
      os << "\"" << m.space.label(s, n1) << "\"," << format_scalar(br.value[s]);
      for (int x = 0; x < m.n1(); ++x) os << "," << format_scalar(br.q[s][x]);
      os << "," << names(br.optimal[s], n1) << "\n";
    }
  });
  Json list = Json::array();
  for (const auto& st : all.strategies) {
    Json e = Json::object();
    for (int s = 0; s < m.num_states(); ++s) e[m.space.label(s, n1)] = n1[st[s]];
    list.push_back(e);
  }
  out.write("canonical.json", dump(list));
  if (loop) out.csv("back_loop.csv", [&](std::ostream& os) { write_witness_csv(os, m.space, n1, *loop); });
  return kOk;
}

// verify

template <class T>
int run_verify(const Args& a) {
  const auto p = require_profile<T>(a);
  const auto r = verify(p, tolerance(a), !a.nash_only);
  const bool ok = a.nash_only ? r.is_nash : r.is_pbe;
  std::cout << "family=" << (p.family.empty() ? "-" : p.family) << "\n"
            << "is_nash=" << yes(r.is_nash) << "\n"
            << "is_pbe=" << yes(r.is_pbe) << "\n"
            << "worst_p1_deviation_gain=" << format_scalar(r.worst_p1_deviation_gain) << "\n"
            << "worst_p2_regret=" << format_scalar(r.worst_p2_regret) << "\n"
            << "strategic_value=" << format_scalar(r.strategic_value) << "\n";
  const auto& m = p.model;
  Json j = report_json(r);
  for (size_t i = 0; i < r.failing_sites.size(); ++i) {
    const auto& f = r.failing_sites[i];
    const int o = f.player == "1" ? m.obs.of(f.site) : f.site;
    const std::string obs = m.obs.label(o, m.game.actions1);
    j["failing_sites"][i]["observation"] = obs;
    std::cout << "failing player=" << f.player << " site=" << f.label << " observation=" << obs
              << " on_path=" << yes(f.on_path) << " gain=" << format_scalar(f.gain) << "\n";
  }
  Output(a.out).write("report.json", dump(j));
  return ok ? kOk : kVerifyFailed;
}

// construct

template <class T>
EquilibriumProfile<T> construct_by_name(const std::string& family, const BasicModel<T>& m) {
  if (family == "cycle") return construct_cycle_equilibrium(m);
  if (family == "non-commitment") return construct_noncommitment_equilibrium(m);
  if (family == "sequence-good") return construct_sequence_equilibria(m, SequenceVariant::good);
  if (family == "sequence-cycle") return construct_sequence_equilibria(m, SequenceVariant::cycle);
  if (family == "submodular-cycle") return construct_submodular_cycle(m);
  throw Usage("unknown --family '" + family +
              "'; expected cycle, non-commitment, sequence-good, sequence-cycle or submodular-cycle");
}

template <class T>
int run_construct(const Args& a) {
  if (a.family.empty()) throw Usage("construct needs --family");
  const auto m = require_model<T>(a);
  const auto p = construct_by_name(a.family, m);
  const auto r = verify(p, tolerance(a));
  std::cout << "family=" << p.family << "\n";
  for (const auto& [k, v] : p.constants) std::cout << k << "=" << format_scalar(v) << "\n";
  std::cout << "is_pbe=" << yes(r.is_pbe) << "\n"
            << "worst_p1_deviation_gain=" << format_scalar(r.worst_p1_deviation_gain) << "\n"
            << "worst_p2_regret=" << format_scalar(r.worst_p2_regret) << "\n";
  Output(a.out).write("profile.json", dump(profile_json(p)));
  return kOk;
}

// flows

template <class T>
int run_flows(const Args& a) {
  BasicModel<T> m;
  Strategy1<T> sigma1;
  if (!a.profile.empty()) {
    auto p = require_profile<T>(a);
    m = p.model;
    sigma1 = p.sigma1;
  } else {
    m = require_model<T>(a);
    if (a.strategy.empty()) throw Usage("flows needs --strategy or --profile");
  }
  if (!a.strategy.empty()) sigma1 = read_strategy(m, read_json_file(a.strategy));
  const auto om = stationary_occupation(m, sigma1);
  const T residual = recursion_residual(om);
  const auto diag = block_diagnostics(m, om, a.z, a.y);
  const auto& n1 = m.game.actions1;

  // every block, every block's star and prime parts, and every single full state
  std::vector<std::pair<std::string, std::vector<int>>> subsets;
  for (const auto& b : blocks(m.space, m.obs, m.top())) {
    const std::string tag = "k=" + std::to_string(b.category) + " " + m.obs.label(b.observation, n1);
    subsets.push_back({tag, b.states});
    if (!b.star_part.empty() && !b.prime_part.empty()) {
      subsets.push_back({tag + " star", b.star_part});
      subsets.push_back({tag + " prime", b.prime_part});
    }
  }
  for (int s : m.space.full_states()) subsets.push_back({m.space.label(s, n1), {s}});
  std::ostringstream flows_csv;
  flows_csv << "subset,inflow,outflow,bound,holds\n";
  double worst = 0;
  int violations = 0, skipped = 0;
  for (const auto& [tag, set] : subsets) {
    if (set.size() == m.space.full_states().size()) {
      ++skipped;
      continue;
    }
    const auto f = flows(om, set);
    worst = std::max(worst, std::abs(to_double(f.inflow - f.outflow)));
    if (!f.bound_holds) ++violations;
    flows_csv << "\"" << tag << "\"," << format_scalar(f.inflow) << "," << format_scalar(f.outflow) << ","
              << format_scalar(f.bound) << "," << f.bound_holds << "\n";
  }
  std::cout << "recursion_residual=" << format_scalar(residual) << "\n"
            << "subsets=" << subsets.size() - skipped << "\n"
            << "max_flow_gap=" << format_scalar(worst) << "\n"
            << "flow_bound=" << format_scalar(to_double((T(1) - m.delta_bar) / m.delta_bar)) << "\n"
            << "flow_bound_violations=" << violations << "\n";
  const Output out(a.out);
  out.csv("occupation.csv", [&](std::ostream& os) { write_occupation_csv(os, m, om); });
  out.csv("kernel.csv", [&](std::ostream& os) { write_kernel_csv(os, m, om); });
  out.csv("posteriors.csv", [&](std::ostream& os) { write_posterior_csv(os, m, sigma1); });
  out.csv("blocks.csv", [&](std::ostream& os) { write_block_csv(os, m, diag); });
  out.write("flows.csv", flows_csv.str());
  return kOk;
}

// simulate

int run_simulate(const Args& a) {
  if (a.exact) throw Usage("simulate runs in floating point; drop --exact");
  auto p = require_profile<double>(a);
  if (a.episodes < 1) throw Usage("--episodes must be at least 1");
  std::uint64_t seed = a.seed.value_or(0);
  if (!a.seed && !a.scenario.empty()) seed = load_scenario(a.scenario).seed;
  const auto& m = p.model;
  const auto r = sample_paths(p, a.episodes, seed, a.workers, a.keep);
  const auto exact = frequency(p);
  const auto signals = signal_frequency(m, exact);
  const auto cor = corollary1_check(p);
  double sampled_welfare = 0;
  for (int x = 0; x < m.n1(); ++x)
    for (int b = 0; b < m.n2(); ++b) sampled_welfare += r.mean[x * m.n2() + b] * m.game.u2(x, b);
  const double welfare = consumer_welfare(m.game, exact.blended);
  std::cout << "episodes=" << r.episodes << "\n"
            << "seed=" << seed << "\n"
            << "max_deviation=" << format_scalar(r.max_deviation) << "\n"
            << "max_deviation_in_radii=" << format_scalar(r.max_deviation_in_radii) << "\n"
            << "welfare=" << format_scalar(welfare) << "\n"
            << "sampled_welfare=" << format_scalar(sampled_welfare) << "\n";
  const Output out(a.out);
  out.csv("sample.csv", [&](std::ostream& os) { write_sample_csv(os, m.game, r, exact); });
  out.csv("frequency.csv", [&](std::ostream& os) { write_frequency_csv(os, m.game, exact); });
  out.csv("signals.csv", [&](std::ostream& os) {
    os << "signal,mean,radius,exact\n";
    for (int x = 0; x < m.n1(); ++x)
      os << m.game.actions1[x] << "," << format_scalar(r.signal_mean[x]) << "," << format_scalar(r.signal_radius[x])
         << "," << format_scalar(signals[x]) << "\n";
  });
  out.csv("welfare.csv", [&](std::ostream& os) {
    os << "quantity,value\n"
       << "welfare," << format_scalar(welfare) << "\n"
       << "sampled_welfare," << format_scalar(sampled_welfare) << "\n"
       << "strategic_welfare," << format_scalar(consumer_welfare(m.game, exact.strategic)) << "\n"
       << "min_p_star," << format_scalar(cor.min_p_star) << "\n"
       << "min_p_top," << format_scalar(cor.min_p_top) << "\n"
       << "constant_star," << format_scalar(cor.constant_star) << "\n"
       << "constant_top," << format_scalar(cor.constant_top) << "\n"
       << "cutoff," << cor.cutoff << "\n"
       << "in_premise," << cor.in_premise << "\n";
  });
  out.csv("corollary.csv", [&](std::ostream& os) { write_corollary_csv(os, cor); });
  out.csv("transcripts.jsonl", [&](std::ostream& os) { write_transcripts(os, m, r.transcripts); });
  return kOk;
}

// sweep

int run_sweep_command(const Args& a) {
  std::vector<SweepCell> cells;
  for (double x : a.sweep_x)
    for (int K : a.sweep_K)
      for (double db : a.sweep_delta_bar)
        for (double pi0 : a.sweep_pi0) cells.push_back({x, K, db, pi0});
  SweepOptions o;
  o.c_T = a.c_T;
  o.c_N = a.c_N;
  o.tol = tolerance(a);
  o.workers = a.workers;
  const auto rows = run_sweep(cells, o);
  std::ostringstream os;
  write_sweep_csv(os, rows);
  if (Output(a.out).enabled())
    Output(a.out).write("sweep.csv", os.str());
  else
    std::cout << os.str();
  return kOk;
}

void add_common(CLI::App* sub, Args& a) {
  sub->add_option("--game", a.game, "game file, 'pc' or 'pc:c_T,c_N,x'");
  sub->add_option("--scenario", a.scenario, "scenario file");
  sub->add_option("--profile", a.profile, "profile file");
  sub->add_option("--out", a.out, "directory for output artifacts");
  sub->add_option("--tol", a.tol, "verification tolerance (1e-6, or 1e-12 with --exact)");
  sub->add_flag("--exact", a.exact, "exact rational arithmetic");
  sub->add_option("--workers", a.workers, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--seed", a.seed, "root seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reputation games with limited memory"};
  app.require_subcommand(1);
  Args a;

  auto* check = app.add_subcommand("check", "monotone-supermodular, dominance and commitment checks");
  auto* cutoff = app.add_subcommand("cutoff", "memory cutoff, largest lapse weight and discount threshold");
  cutoff->add_option("--pi0", a.pi0, "prior on the commitment type");
  auto* best = app.add_subcommand("best-reply", "best reply to a consumer policy");
  best->add_option("--policy", a.policy, "consumer policy file");
  best->add_option("--method", a.method, "policy-iteration or value-iteration")
      ->check(CLI::IsMember({"policy-iteration", "value-iteration"}));
  best->add_option("--cap", a.cap, "most canonical best replies to enumerate");
  auto* verify_cmd = app.add_subcommand("verify", "equilibrium certificate for a profile");
  verify_cmd->add_flag("--nash-only", a.nash_only, "skip unreached sites");
  auto* construct = app.add_subcommand("construct", "build an equilibrium profile");
  construct->add_option("--family", a.family, "cycle, non-commitment, sequence-good, sequence-cycle, submodular-cycle");
  auto* flows_cmd = app.add_subcommand("flows", "occupation measure, kernel, flows and posteriors");
  flows_cmd->add_option("--strategy", a.strategy, "seller strategy file");
  flows_cmd->add_option("--z", a.z, "flow threshold multiple of 1 - delta_bar");
  flows_cmd->add_option("--y", a.y, "mass threshold multiple of 1 - delta_bar");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo frequencies against the exact table");
  simulate->add_option("--episodes", a.episodes, "number of episodes");
  simulate->add_option("--keep", a.keep, "transcripts to keep");
  auto* sweep = app.add_subcommand("sweep", "phase table over product choice cells");
  sweep->add_option("--x", a.sweep_x, "consumer gain values")->delimiter(',');
  sweep->add_option("--K", a.sweep_K, "memory lengths")->delimiter(',');
  sweep->add_option("--delta-bar", a.sweep_delta_bar, "continuation probabilities")->delimiter(',');
  sweep->add_option("--pi0", a.sweep_pi0, "commitment priors")->delimiter(',');
  sweep->add_option("--c-T", a.c_T, "seller gain from shirking when trusted");
  sweep->add_option("--c-N", a.c_N, "seller loss from effort when not trusted");
  for (auto* sub : {check, cutoff, best, verify_cmd, construct, flows_cmd, simulate, sweep}) add_common(sub, a);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    auto dispatch = [&](auto tag) -> int {
      using T = decltype(tag);
      if (check->parsed()) return run_check<T>(a);
      if (cutoff->parsed()) return run_cutoff<T>(a);
      if (best->parsed()) return run_best_reply<T>(a);
      if (verify_cmd->parsed()) return run_verify<T>(a);
      if (construct->parsed()) return run_construct<T>(a);
      if (flows_cmd->parsed()) return run_flows<T>(a);
      if (simulate->parsed()) return run_simulate(a);
      return run_sweep_command(a);
    };
    return a.exact ? dispatch(Rational()) : dispatch(0.0);
  } catch (const PreconditionFailed& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return kPrecondition;
  } catch (const Usage& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
