#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "repgame/scalar.hpp"
#include "repgame/stage_game.hpp"

namespace repgame {

struct SequenceState {
  std::vector<int> history;  // most recent last
  bool initial_segment = true;
  bool operator==(const SequenceState& o) const { return history == o.history; }
};

SequenceState make_state(std::vector<int> history, int K);
SequenceState advance(const SequenceState& s, int action, int K);

enum class ObservationMode { counts, sequence };

struct ActionPartition {
  std::vector<std::vector<int>> cells;  // each cell ascending, cells ordered by minimum

  static ActionPartition finest(int n);
  static ActionPartition top_vs_rest(int n);
  static ActionPartition from_cells(std::vector<std::vector<int>> cells, int n);
  int size() const { return static_cast<int>(cells.size()); }
  int cell_of(int a) const;
  std::vector<int> minima() const;
  bool is_finest() const;
};

struct SummaryObservation {
  std::vector<int> counts;
  std::optional<int> known_time;
  auto operator<=>(const SummaryObservation&) const = default;
};

struct Observation {
  bool is_sequence = false;
  SummaryObservation summary;  // counts mode
  std::vector<int> sequence;   // sequence mode
  auto operator<=>(const Observation&) const = default;
};

Observation observe(const SequenceState& s, const ActionPartition& p, ObservationMode mode, int K);

// number of entries different from the top action; full-length states only
int category(const SequenceState& s, int top, int K);

template <class T>
struct SignalModel {
  T epsilon = T(0);
  std::vector<T> noise_dist;  // distribution over recorded signals when noise strikes
};

// probability of each recorded signal given the true action
template <class T>
std::vector<T> signal_distribution(const SignalModel<T>& m, int action, int num_actions);

template <class T>
std::vector<std::pair<SequenceState, T>> signal_advance(const SequenceState& s, int action,
                                                        const SignalModel<T>& m, int K);

// All sequences of length 0..K over num_actions symbols, indexed by length then base-n code.
class StateSpace {
 public:
  StateSpace() = default;
  StateSpace(int num_actions, int K);

  int size() const { return static_cast<int>(histories_.size()); }
  int num_actions() const { return n_; }
  int K() const { return K_; }
  int index(const std::vector<int>& history) const;
  const std::vector<int>& history(int s) const { return histories_[s]; }
  SequenceState state(int s) const;
  int length(int s) const { return static_cast<int>(histories_[s].size()); }
  bool full(int s) const { return length(s) == K_; }
  int advance(int s, int a) const { return next_[static_cast<size_t>(s) * n_ + a]; }
  int empty() const { return 0; }
  int star() const;
  const std::vector<int>& full_states() const { return full_; }
  std::string label(int s, const std::vector<std::string>& names) const;
  int parse_label(const std::string& label, const std::vector<std::string>& names) const;

 private:
  int n_ = 0;
  int K_ = 0;
  std::vector<int> offset_;
  std::vector<std::vector<int>> histories_;
  std::vector<int> next_;
  std::vector<int> full_;
};

class ObservationMap {
 public:
  ObservationMap() = default;
  ObservationMap(const StateSpace& space, const ActionPartition& partition, ObservationMode mode);

  int size() const { return static_cast<int>(observations_.size()); }
  int of(int s) const { return of_[s]; }
  const std::vector<int>& states(int o) const { return members_[o]; }
  const Observation& observation(int o) const { return observations_[o]; }
  int find(const Observation& obs) const;
  ObservationMode mode() const { return mode_; }
  std::string label(int o, const std::vector<std::string>& action_names) const;
  int parse_label(const std::string& label, const std::vector<std::string>& action_names) const;

 private:
  ObservationMode mode_ = ObservationMode::counts;
  ActionPartition partition_;
  std::vector<Observation> observations_;
  std::vector<int> of_;
  std::vector<std::vector<int>> members_;
  std::map<Observation, int> index_;
};

struct Block {
  int category = 0;
  int observation = -1;
  std::vector<int> states;
  std::vector<int> star_part;   // oldest entry is the top action
  std::vector<int> prime_part;  // oldest entry is not
};

std::vector<Block> blocks(const StateSpace& space, const ObservationMap& obs, int top);
template <class T>
std::vector<Block> blocks(int K, const BasicStageGame<T>& g, const ActionPartition& p);

std::string cell_name(const std::vector<int>& cell, const std::vector<std::string>& names);

// Game restricted to the minimum action of each partition cell.
template <class T>
BasicStageGame<T> reduced_game(const BasicStageGame<T>& g, const ActionPartition& p);

}  // namespace repgame
