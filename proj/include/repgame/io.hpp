#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "repgame/equilibrium.hpp"
#include "repgame/welfare.hpp"

namespace repgame {

using Json = nlohmann::ordered_json;

// Scalars are JSON numbers or strings holding "p/q", an integer or a decimal.
Rational parse_rational(const std::string& text);
template <class T>
T read_scalar(const Json& j);
Json write_scalar(double x);
Json write_scalar(const Rational& x);

// {"actions1", "actions2", "u1", "u2"} with row-major |A| x |B| matrices, or
// {"template": "product_choice", "c_T", "c_N", "x"}.
ExactStageGame read_game(const Json& j);
template <class T>
Json game_json(const BasicStageGame<T>& g);
ExactStageGame load_game(const std::string& path);

struct Scenario {
  std::optional<std::string> game;  // path, relative to the scenario file
  int K = 1;
  ObservationMode mode = ObservationMode::counts;
  std::vector<std::vector<std::string>> partition;  // empty: finest
  Rational epsilon{0};
  std::vector<Rational> noise_dist;  // empty: uniform
  Rational delta{9, 10};
  std::optional<Rational> delta_bar;  // unset: same as delta
  Rational pi0{1, 10};
  std::uint64_t seed = 0;
};

Scenario read_scenario(const Json& j);
Json scenario_json(const Scenario& s, bool exact = true);
Scenario load_scenario(const std::string& path);

template <class T>
BasicModel<T> build_model(const ExactStageGame& g, const Scenario& s, const Tolerance& tol = {});
template <class T>
Scenario scenario_of(const BasicModel<T>& m);

// Maps from canonical state or observation labels to weight vectors.
template <class T>
Json strategy_json(const BasicModel<T>& m, const Strategy1<T>& sigma1);
template <class T>
Json policy_json(const BasicModel<T>& m, const ConsumerPolicy<T>& sigma2);
template <class T>
Strategy1<T> read_strategy(const BasicModel<T>& m, const Json& j);
template <class T>
ConsumerPolicy<T> read_policy(const BasicModel<T>& m, const Json& j);

template <class T>
Json profile_json(const EquilibriumProfile<T>& p);
template <class T>
EquilibriumProfile<T> read_profile(const Json& j);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string dump(const Json& j);

Json report_json(const VerificationReport& r);

// CSV writers. Scalars use format_scalar, so output is byte-stable.
template <class T>
void write_frequency_csv(std::ostream& os, const BasicStageGame<T>& g, const FrequencyTable<T>& f);
void write_sample_csv(std::ostream& os, const StageGame& g, const SampleReport& r, const FrequencyTable<double>& exact);
void write_transcripts(std::ostream& os, const Model& m, const std::vector<Transcript>& ts);
void write_corollary_csv(std::ostream& os, const Corollary1Report& r);
template <class T>
void write_occupation_csv(std::ostream& os, const BasicModel<T>& m, const OccupationMeasure<T>& om);
template <class T>
void write_kernel_csv(std::ostream& os, const BasicModel<T>& m, const OccupationMeasure<T>& om);
template <class T>
void write_posterior_csv(std::ostream& os, const BasicModel<T>& m, const Strategy1<T>& sigma1);
template <class T>
void write_block_csv(std::ostream& os, const BasicModel<T>& m, const std::vector<BlockDiagnostic<T>>& d);
void write_witness_csv(std::ostream& os, const StateSpace& space, const std::vector<std::string>& names,
                       const BackLoopWitness& w);

}  // namespace repgame
