#include "repgame/io.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "repgame/errors.hpp"

namespace repgame {

Rational parse_rational(const std::string& text) {
  std::string s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  if (s.empty()) throw FormatError("empty number");
  if (s.find_first_of("eE") != std::string::npos) {
    size_t used = 0;
    double x = 0;
    try {
      x = std::stod(s, &used);
    } catch (const std::exception&) {
      throw FormatError("bad number '" + text + "'");
    }
    if (used != s.size()) throw FormatError("bad number '" + text + "'");
    return rationalize(x);
  }
  const auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    const size_t places = s.size() - dot - 1;
    std::string den = "1" + std::string(places, '0');
    if (digits.empty() || digits == "-" || digits == "+") throw FormatError("bad number '" + text + "'");
    s = digits + "/" + den;
  }
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c)) && c != '/' && c != '-' && c != '+')
      throw FormatError("bad number '" + text + "'");
  const auto slash = s.find('/');
  if (slash != std::string::npos && s.find_first_not_of('0', slash + 1) == std::string::npos)
    throw FormatError("zero denominator in '" + text + "'");
  try {
    if (!s.empty() && s.front() == '+') s.erase(s.begin());
    return Rational(s);
  } catch (const std::exception&) {
    throw FormatError("bad number '" + text + "'");
  }
}

template <>
double read_scalar<double>(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return to_double(parse_rational(j.get<std::string>()));
  throw FormatError("expected a number, got " + j.dump());
}

template <>
Rational read_scalar<Rational>(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number()) return rationalize(j.get<double>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw FormatError("expected a number, got " + j.dump());
}

Json write_scalar(double x) {
  if (x == 0) x = 0;
  return x;
}

Json write_scalar(const Rational& x) { return x.str(); }

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::vector<std::string> names_of(const Json& j, const char* key) {
  const Json& a = field(j, key);
  if (!a.is_array() || a.empty()) throw FormatError(std::string("'") + key + "' must be a non-empty array of names");
  std::vector<std::string> out;
  for (const auto& x : a) {
    if (!x.is_string()) throw FormatError(std::string("'") + key + "' must hold strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

std::vector<Rational> matrix_of(const Json& j, const char* key, int rows, int cols) {
  const Json& m = field(j, key);
  if (!m.is_array() || static_cast<int>(m.size()) != rows)
    throw FormatError(std::string("'") + key + "' must have " + std::to_string(rows) + " rows");
  std::vector<Rational> out;
  for (const auto& row : m) {
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw FormatError(std::string("'") + key + "' rows must have " + std::to_string(cols) + " entries");
    for (const auto& x : row) out.push_back(read_scalar<Rational>(x));
  }
  return out;
}

template <class T>
Json vector_json(const std::vector<T>& v) {
  Json a = Json::array();
  for (const T& x : v) a.push_back(write_scalar(x));
  return a;
}

template <class T>
std::vector<T> read_vector(const Json& j, int size, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != size)
    throw FormatError(what + " must have " + std::to_string(size) + " entries");
  std::vector<T> out;
  for (const auto& x : j) out.push_back(read_scalar<T>(x));
  return out;
}

const char* mode_name(ObservationMode m) { return m == ObservationMode::counts ? "counts" : "sequence"; }

}  // namespace

ExactStageGame read_game(const Json& j) {
  if (j.is_object() && j.contains("template")) {
    const std::string t = j.at("template").get<std::string>();
    if (t != "product_choice") throw FormatError("unknown game template '" + t + "'");
    auto get = [&](const char* k, Rational d) { return j.contains(k) ? read_scalar<Rational>(j.at(k)) : d; };
    return product_choice<Rational>(get("c_T", Rational(1, 2)), get("c_N", Rational(1)), get("x", Rational(1, 2)));
  }
  ExactStageGame g;
  g.actions1 = names_of(j, "actions1");
  g.actions2 = names_of(j, "actions2");
  g.payoff1 = matrix_of(j, "u1", g.n1(), g.n2());
  g.payoff2 = matrix_of(j, "u2", g.n1(), g.n2());
  g.check();
  return g;
}

template <class T>
Json game_json(const BasicStageGame<T>& g) {
  Json j;
  j["actions1"] = g.actions1;
  j["actions2"] = g.actions2;
  for (const char* key : {"u1", "u2"}) {
    Json m = Json::array();
    for (int a = 0; a < g.n1(); ++a) {
      Json row = Json::array();
      for (int b = 0; b < g.n2(); ++b) row.push_back(write_scalar(key[1] == '1' ? g.u1(a, b) : g.u2(a, b)));
      m.push_back(row);
    }
    j[key] = m;
  }
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("'" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

ExactStageGame load_game(const std::string& path) { return read_game(read_json_file(path)); }

Scenario read_scenario(const Json& j) {
  if (!j.is_object()) throw FormatError("scenario must be an object");
  Scenario s;
  if (j.contains("game")) {
    if (!j.at("game").is_string()) throw FormatError("'game' must be a path");
    s.game = j.at("game").get<std::string>();
  }
  s.K = field(j, "K").get<int>();
  if (s.K < 1) throw FormatError("K must be at least 1");
  if (j.contains("mode")) {
    const std::string m = j.at("mode").get<std::string>();
    if (m == "counts")
      s.mode = ObservationMode::counts;
    else if (m == "sequence")
      s.mode = ObservationMode::sequence;
    else
      throw FormatError("mode must be \"counts\" or \"sequence\", got \"" + m + "\"");
  }
  if (j.contains("partition")) {
    for (const auto& cell : j.at("partition")) {
      if (!cell.is_array()) throw FormatError("partition cells must be arrays of action names");
      s.partition.push_back(cell.get<std::vector<std::string>>());
    }
  }
  if (j.contains("epsilon")) s.epsilon = read_scalar<Rational>(j.at("epsilon"));
  if (j.contains("noise_dist"))
    for (const auto& x : j.at("noise_dist")) s.noise_dist.push_back(read_scalar<Rational>(x));
  if (j.contains("delta")) s.delta = read_scalar<Rational>(j.at("delta"));
  if (j.contains("delta_bar")) s.delta_bar = read_scalar<Rational>(j.at("delta_bar"));
  if (j.contains("pi0")) s.pi0 = read_scalar<Rational>(j.at("pi0"));
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

Json scenario_json(const Scenario& s, bool exact) {
  auto num = [exact](const Rational& x) { return exact ? write_scalar(x) : write_scalar(to_double(x)); };
  Json j;
  if (s.game) j["game"] = *s.game;
  j["K"] = s.K;
  j["mode"] = mode_name(s.mode);
  if (!s.partition.empty()) j["partition"] = s.partition;
  j["epsilon"] = num(s.epsilon);
  if (!s.noise_dist.empty()) {
    j["noise_dist"] = Json::array();
    for (const auto& x : s.noise_dist) j["noise_dist"].push_back(num(x));
  }
  j["delta"] = num(s.delta);
  if (s.delta_bar) j["delta_bar"] = num(*s.delta_bar);
  j["pi0"] = num(s.pi0);
  j["seed"] = s.seed;
  return j;
}

Scenario load_scenario(const std::string& path) {
  Scenario s = read_scenario(read_json_file(path));
  if (s.game && std::filesystem::path(*s.game).is_relative())
    s.game = (std::filesystem::path(path).parent_path() / *s.game).string();
  return s;
}

template <class T>
BasicModel<T> build_model(const ExactStageGame& g, const Scenario& s, const Tolerance& tol) {
  ActionPartition part = ActionPartition::finest(g.n1());
  if (!s.partition.empty()) {
    std::vector<std::vector<int>> cells;
    for (const auto& cell : s.partition) {
      std::vector<int> c;
      for (const auto& name : cell) c.push_back(g.action1_index(name));
      cells.push_back(c);
    }
    part = ActionPartition::from_cells(cells, g.n1());
  }
  auto conv = [](const Rational& x) {
    if constexpr (is_exact_v<T>)
      return x;
    else
      return to_double(x);
  };
  SignalModel<T> sig;
  sig.epsilon = conv(s.epsilon);
  for (const auto& x : s.noise_dist) sig.noise_dist.push_back(conv(x));
  BasicStageGame<T> game;
  if constexpr (is_exact_v<T>)
    game = g;
  else
    game = convert_game<double>(g);
  return make_model(game, s.K, s.mode, part, sig, conv(s.delta), conv(s.delta_bar.value_or(s.delta)), conv(s.pi0),
                    tol);
}

template <class T>
Scenario scenario_of(const BasicModel<T>& m) {
  auto conv = [](const T& x) {
    if constexpr (is_exact_v<T>)
      return x;
    else
      return rationalize(x);
  };
  Scenario s;
  s.K = m.K;
  s.mode = m.mode;
  if (!m.partition.is_finest())
    for (const auto& cell : m.partition.cells) {
      std::vector<std::string> names;
      for (int a : cell) names.push_back(m.game.actions1[a]);
      s.partition.push_back(names);
    }
  s.epsilon = conv(m.signals.epsilon);
  if (m.noisy())
    for (const T& x : m.signals.noise_dist) s.noise_dist.push_back(conv(x));
  s.delta = conv(m.delta);
  if (m.delta_bar != m.delta) s.delta_bar = conv(m.delta_bar);
  s.pi0 = conv(m.pi0);
  return s;
}

template <class T>
Json strategy_json(const BasicModel<T>& m, const Strategy1<T>& sigma1) {
  Json j = Json::object();
  for (int s = 0; s < m.num_states(); ++s) j[m.space.label(s, m.game.actions1)] = vector_json(sigma1[s]);
  return j;
}

template <class T>
Json policy_json(const BasicModel<T>& m, const ConsumerPolicy<T>& sigma2) {
  Json j = Json::object();
  for (int o = 0; o < m.num_observations(); ++o) j[m.obs.label(o, m.game.actions1)] = vector_json(sigma2[o]);
  return j;
}

namespace {

// A weight vector, or an action name standing for the pure action.
template <class T>
std::vector<T> read_mixed(const Json& j, const std::vector<std::string>& names, const std::string& where) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    for (int i = 0; i < static_cast<int>(names.size()); ++i)
      if (names[i] == name) return pure_action<T>(static_cast<int>(names.size()), i);
    throw FormatError("unknown action '" + name + "' at " + where);
  }
  auto v = read_vector<T>(j, static_cast<int>(names.size()), "weights at " + where);
  if (!is_distribution(v, 1e-9)) throw FormatError("weights at " + where + " are not a distribution");
  return v;
}

}  // namespace

template <class T>
Strategy1<T> read_strategy(const BasicModel<T>& m, const Json& j) {
  if (!j.is_object()) throw FormatError("strategy must map state labels to weights");
  Strategy1<T> out(m.num_states());
  std::vector<bool> seen(m.num_states(), false);
  for (const auto& [key, value] : j.items()) {
    const int s = m.space.parse_label(key, m.game.actions1);
    out[s] = read_mixed<T>(value, m.game.actions1, "state " + key);
    seen[s] = true;
  }
  for (int s = 0; s < m.num_states(); ++s)
    if (!seen[s]) throw FormatError("strategy has no entry for state " + m.space.label(s, m.game.actions1));
  return out;
}

template <class T>
ConsumerPolicy<T> read_policy(const BasicModel<T>& m, const Json& j) {
  if (!j.is_object()) throw FormatError("policy must map observation labels to weights");
  ConsumerPolicy<T> out(m.num_observations());
  std::vector<bool> seen(m.num_observations(), false);
  for (const auto& [key, value] : j.items()) {
    const int o = m.obs.parse_label(key, m.game.actions1);
    out[o] = read_mixed<T>(value, m.game.actions2, "observation " + key);
    seen[o] = true;
  }
  for (int o = 0; o < m.num_observations(); ++o)
    if (!seen[o]) throw FormatError("policy has no entry for observation " + m.obs.label(o, m.game.actions1));
  return out;
}

template <class T>
Json profile_json(const EquilibriumProfile<T>& p) {
  const auto& m = p.model;
  Json j;
  j["exact"] = is_exact_v<T>;
  j["family"] = p.family;
  j["game"] = game_json(m.game);
  Json sc = scenario_json(scenario_of(m), is_exact_v<T>);
  sc.erase("seed");
  j["scenario"] = sc;
  j["tolerance"] = {{"tie", m.tol.tie}, {"opt", m.tol.opt}};
  Json c = Json::object();
  for (const auto& [k, v] : p.constants) c[k] = write_scalar(v);
  j["constants"] = c;
  j["sigma1"] = strategy_json(m, p.sigma1);
  j["sigma2"] = policy_json(m, p.sigma2);
  Json beliefs = Json::object();
  for (const auto& [o, atoms] : p.off_path_beliefs) {
    Json list = Json::array();
    for (const auto& atom : atoms)
      list.push_back({{"state", m.space.label(atom.state, m.game.actions1)},
                      {"commitment", atom.commitment},
                      {"weight", write_scalar(atom.weight)}});
    beliefs[m.obs.label(o, m.game.actions1)] = list;
  }
  j["off_path_beliefs"] = beliefs;
  return j;
}

template <class T>
EquilibriumProfile<T> read_profile(const Json& j) {
  EquilibriumProfile<T> p;
  Tolerance tol;
  if (j.contains("tolerance")) {
    tol.tie = j.at("tolerance").value("tie", tol.tie);
    tol.opt = j.at("tolerance").value("opt", tol.opt);
  }
  p.model = build_model<T>(read_game(field(j, "game")), read_scenario(field(j, "scenario")), tol);
  const auto& m = p.model;
  p.family = j.value("family", std::string());
  if (j.contains("constants"))
    for (const auto& [k, v] : j.at("constants").items()) p.constants.push_back({k, read_scalar<T>(v)});
  p.sigma1 = read_strategy(m, field(j, "sigma1"));
  p.sigma2 = read_policy(m, field(j, "sigma2"));
  if (j.contains("off_path_beliefs"))
    for (const auto& [key, list] : j.at("off_path_beliefs").items()) {
      const int o = m.obs.parse_label(key, m.game.actions1);
      auto& atoms = p.off_path_beliefs[o];
      for (const auto& a : list) {
        BeliefAtom<T> atom;
        atom.state = m.space.parse_label(field(a, "state").template get<std::string>(), m.game.actions1);
        atom.commitment = a.value("commitment", false);
        atom.weight = read_scalar<T>(field(a, "weight"));
        atoms.push_back(atom);
      }
    }
  return p;
}

Json report_json(const VerificationReport& r) {
  Json j;
  j["is_nash"] = r.is_nash;
  j["is_pbe"] = r.is_pbe;
  j["off_path_checked"] = r.off_path_checked;
  j["worst_p1_deviation_gain"] = write_scalar(r.worst_p1_deviation_gain);
  j["worst_p2_regret"] = write_scalar(r.worst_p2_regret);
  j["worst_p1_on_path"] = write_scalar(r.worst_p1_on_path);
  j["worst_p2_on_path"] = write_scalar(r.worst_p2_on_path);
  j["strategic_value"] = write_scalar(r.strategic_value);
  Json sites = Json::array();
  for (const auto& s : r.failing_sites)
    sites.push_back({{"player", s.player},
                     {"site", s.site},
                     {"label", s.label},
                     {"on_path", s.on_path},
                     {"alternative", s.alternative},
                     {"gain", write_scalar(s.gain)}});
  j["failing_sites"] = sites;
  return j;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

template <class T>
void write_frequency_csv(std::ostream& os, const BasicStageGame<T>& g, const FrequencyTable<T>& f) {
  os << "table,action";
  for (const auto& b : g.actions2) os << "," << csv_field(b);
  os << "\n";
  const std::pair<const char*, const std::vector<T>*> tables[] = {
      {"blended", &f.blended}, {"strategic", &f.strategic}, {"commitment", &f.commitment}};
  for (const auto& [name, table] : tables)
    for (int a = 0; a < g.n1(); ++a) {
      os << name << "," << csv_field(g.actions1[a]);
      for (int b = 0; b < g.n2(); ++b) os << "," << format_scalar(f.at(*table, a, b));
      os << "\n";
    }
}

void write_sample_csv(std::ostream& os, const StageGame& g, const SampleReport& r, const FrequencyTable<double>& exact) {
  os << "action,reply,mean,radius,exact\n";
  for (int a = 0; a < g.n1(); ++a)
    for (int b = 0; b < g.n2(); ++b) {
      const int c = a * g.n2() + b;
      os << csv_field(g.actions1[a]) << "," << csv_field(g.actions2[b]) << "," << format_scalar(r.mean[c]) << ","
         << format_scalar(r.radius[c]) << "," << format_scalar(exact.blended[c]) << "\n";
    }
}

void write_transcripts(std::ostream& os, const Model& m, const std::vector<Transcript>& ts) {
  for (const auto& t : ts) {
    Json periods = Json::array();
    for (const auto& p : t.periods)
      periods.push_back({{"state", m.space.label(p.state, m.game.actions1)},
                         {"action", m.game.actions1[p.action]},
                         {"signal", m.game.actions1[p.signal]},
                         {"observation", m.obs.label(p.observation, m.game.actions1)},
                         {"reply", m.game.actions2[p.reply]}});
    Json j;
    j["seed"] = t.seed;
    j["commitment"] = t.commitment;
    j["termination"] = t.termination;
    j["periods"] = periods;
    os << j.dump() << "\n";
  }
}

void write_corollary_csv(std::ostream& os, const Corollary1Report& r) {
  os << "t,p_star,p_top\n";
  for (size_t i = 0; i < r.periods.size(); ++i)
    os << r.periods[i] << "," << format_scalar(r.p_star[i]) << "," << format_scalar(r.p_top[i]) << "\n";
}

template <class T>
void write_occupation_csv(std::ostream& os, const BasicModel<T>& m, const OccupationMeasure<T>& om) {
  os << "state,mu,initial\n";
  for (size_t i = 0; i < om.states.size(); ++i)
    os << csv_field(m.space.label(om.states[i], m.game.actions1)) << "," << format_scalar(om.mu[i]) << ","
       << format_scalar(om.p[i]) << "\n";
}

template <class T>
void write_kernel_csv(std::ostream& os, const BasicModel<T>& m, const OccupationMeasure<T>& om) {
  os << "from,to,probability\n";
  for (size_t i = 0; i < om.states.size(); ++i)
    for (size_t k = 0; k < om.states.size(); ++k)
      if (om.Q[i][k] != T(0))
        os << csv_field(m.space.label(om.states[i], m.game.actions1)) << ","
           << csv_field(m.space.label(om.states[k], m.game.actions1)) << "," << format_scalar(om.Q[i][k]) << "\n";
}

template <class T>
void write_posterior_csv(std::ostream& os, const BasicModel<T>& m, const Strategy1<T>& sigma1) {
  os << "observation,mass,commitment";
  for (const auto& a : m.game.actions1) os << "," << csv_field(a);
  os << "\n";
  const auto w = joint_weights(m, sigma1);
  for (int o = 0; o < m.num_observations(); ++o) {
    if (!observation_reached(m, w, o)) continue;
    const auto r = posterior(m, sigma1, w, o);
    os << csv_field(m.obs.label(o, m.game.actions1)) << "," << format_scalar(r.mass) << ","
       << format_scalar(r.commitment_prob);
    for (const T& x : r.action_belief) os << "," << format_scalar(x);
    os << "\n";
  }
}

template <class T>
void write_block_csv(std::ostream& os, const BasicModel<T>& m, const std::vector<BlockDiagnostic<T>>& d) {
  os << "category,observation,mass,flow_to_lower,flow_from_lower,odds_numerator,odds_denominator,hypothesis,"
        "mass_small,odds_below\n";
  for (const auto& b : d)
    os << b.category << "," << csv_field(m.obs.label(b.observation, m.game.actions1)) << "," << format_scalar(b.mass)
       << "," << format_scalar(b.flow_to_lower) << "," << format_scalar(b.flow_from_lower) << ","
       << format_scalar(b.odds_numerator) << "," << format_scalar(b.odds_denominator) << "," << b.hypothesis << ","
       << b.mass_small << "," << b.odds_below << "\n";
}

void write_witness_csv(std::ostream& os, const StateSpace& space, const std::vector<std::string>& names,
                       const BackLoopWitness& w) {
  os << "step,state,action\n";
  for (size_t i = 0; i < w.path.size(); ++i)
    os << i << "," << csv_field(space.label(w.path[i].first, names)) << "," << csv_field(names[w.path[i].second])
       << "\n";
}

#define REPGAME_IO(T)                                                                                     \
  template Json game_json<T>(const BasicStageGame<T>&);                                                   \
  template BasicModel<T> build_model<T>(const ExactStageGame&, const Scenario&, const Tolerance&);        \
  template Scenario scenario_of<T>(const BasicModel<T>&);                                                 \
  template Json strategy_json<T>(const BasicModel<T>&, const Strategy1<T>&);                              \
  template Json policy_json<T>(const BasicModel<T>&, const ConsumerPolicy<T>&);                           \
  template Strategy1<T> read_strategy<T>(const BasicModel<T>&, const Json&);                              \
  template ConsumerPolicy<T> read_policy<T>(const BasicModel<T>&, const Json&);                           \
  template Json profile_json<T>(const EquilibriumProfile<T>&);                                            \
  template EquilibriumProfile<T> read_profile<T>(const Json&);                                            \
  template void write_frequency_csv<T>(std::ostream&, const BasicStageGame<T>&, const FrequencyTable<T>&); \
  template void write_occupation_csv<T>(std::ostream&, const BasicModel<T>&, const OccupationMeasure<T>&); \
  template void write_kernel_csv<T>(std::ostream&, const BasicModel<T>&, const OccupationMeasure<T>&);     \
  template void write_posterior_csv<T>(std::ostream&, const BasicModel<T>&, const Strategy1<T>&);          \
  template void write_block_csv<T>(std::ostream&, const BasicModel<T>&, const std::vector<BlockDiagnostic<T>>&);

REPGAME_IO(double)
REPGAME_IO(Rational)

}  // namespace repgame
