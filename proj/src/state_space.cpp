#include "repgame/state_space.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "repgame/errors.hpp"

namespace repgame {

SequenceState make_state(std::vector<int> history, int K) {
  if (static_cast<int>(history.size()) > K) throw FormatError("history longer than K");
  SequenceState s;
  s.history = std::move(history);
  s.initial_segment = static_cast<int>(s.history.size()) < K;
  return s;
}

SequenceState advance(const SequenceState& s, int action, int K) {
  SequenceState out = s;
  out.history.push_back(action);
  if (static_cast<int>(out.history.size()) > K) out.history.erase(out.history.begin());
  out.initial_segment = static_cast<int>(out.history.size()) < K;
  return out;
}

ActionPartition ActionPartition::finest(int n) {
  ActionPartition p;
  for (int a = 0; a < n; ++a) p.cells.push_back({a});
  return p;
}

ActionPartition ActionPartition::top_vs_rest(int n) {
  ActionPartition p;
  std::vector<int> rest(n - 1);
  std::iota(rest.begin(), rest.end(), 0);
  p.cells.push_back(rest);
  p.cells.push_back({n - 1});
  return p;
}

ActionPartition ActionPartition::from_cells(std::vector<std::vector<int>> cells, int n) {
  std::vector<int> seen(n, 0);
  for (auto& c : cells) {
    if (c.empty()) throw FormatError("partition cells must be non-empty");
    std::sort(c.begin(), c.end());
    for (int a : c) {
      if (a < 0 || a >= n) throw FormatError("partition refers to an unknown action");
      if (seen[a]++) throw FormatError("partition cells overlap");
    }
  }
  for (int a = 0; a < n; ++a)
    if (!seen[a]) throw FormatError("partition does not cover every action");
  std::sort(cells.begin(), cells.end(),
            [](const std::vector<int>& x, const std::vector<int>& y) { return x.front() < y.front(); });
  ActionPartition p;
  p.cells = std::move(cells);
  return p;
}

int ActionPartition::cell_of(int a) const {
  for (int i = 0; i < size(); ++i)
    if (std::find(cells[i].begin(), cells[i].end(), a) != cells[i].end()) return i;
  throw FormatError("action outside partition");
}

std::vector<int> ActionPartition::minima() const {
  std::vector<int> m;
  for (const auto& c : cells) m.push_back(c.front());
  return m;
}

bool ActionPartition::is_finest() const {
  for (const auto& c : cells)
    if (c.size() != 1) return false;
  return true;
}

Observation observe(const SequenceState& s, const ActionPartition& p, ObservationMode mode, int K) {
  Observation o;
  if (mode == ObservationMode::sequence) {
    o.is_sequence = true;
    o.sequence = s.history;
    return o;
  }
  o.summary.counts.assign(p.size(), 0);
  for (int a : s.history) o.summary.counts[p.cell_of(a)] += 1;
  if (static_cast<int>(s.history.size()) < K) o.summary.known_time = static_cast<int>(s.history.size());
  return o;
}

int category(const SequenceState& s, int top, int K) {
  if (static_cast<int>(s.history.size()) < K) throw InitialSegment("category is defined on full-length states");
  return static_cast<int>(std::count_if(s.history.begin(), s.history.end(), [&](int a) { return a != top; }));
}

template <class T>
std::vector<T> signal_distribution(const SignalModel<T>& m, int action, int num_actions) {
  std::vector<T> d(num_actions, T(0));
  d[action] = T(1) - m.epsilon;
  if (m.epsilon != T(0))
    for (int a = 0; a < num_actions; ++a) d[a] += m.epsilon * m.noise_dist[a];
  return d;
}

template <class T>
std::vector<std::pair<SequenceState, T>> signal_advance(const SequenceState& s, int action,
                                                        const SignalModel<T>& m, int K) {
  std::vector<std::pair<SequenceState, T>> out;
  if (m.epsilon == T(0)) {
    out.push_back({advance(s, action, K), T(1)});
    return out;
  }
  if (m.noise_dist.empty()) throw FormatError("noisy signals need a noise distribution");
  const int n = static_cast<int>(m.noise_dist.size());
  auto d = signal_distribution(m, action, n);
  for (int a = 0; a < n; ++a)
    if (d[a] != T(0)) out.push_back({advance(s, a, K), d[a]});
  return out;
}

StateSpace::StateSpace(int num_actions, int K) : n_(num_actions), K_(K) {
  if (K < 1) throw FormatError("K must be at least 1");
  if (num_actions < 2) throw FormatError("need at least two actions");
  offset_.assign(K + 2, 0);
  long long count = 1, total = 0;
  for (int l = 0; l <= K; ++l) {
    offset_[l] = static_cast<int>(total);
    total += count;
    count *= n_;
    if (total > 5'000'000) throw FormatError("state space too large");
  }
  offset_[K + 1] = static_cast<int>(total);
  histories_.reserve(total);
  for (int l = 0; l <= K; ++l) {
    long long m = 1;
    for (int i = 0; i < l; ++i) m *= n_;
    for (long long code = 0; code < m; ++code) {
      std::vector<int> h(l);
      long long c = code;
      for (int i = l - 1; i >= 0; --i) {
        h[i] = static_cast<int>(c % n_);
        c /= n_;
      }
      histories_.push_back(std::move(h));
    }
  }
  next_.assign(histories_.size() * n_, 0);
  for (int s = 0; s < size(); ++s) {
    const int l = length(s);
    const int code = s - offset_[l];
    for (int a = 0; a < n_; ++a) {
      if (l < K_) {
        next_[static_cast<size_t>(s) * n_ + a] = offset_[l + 1] + code * n_ + a;
      } else {
        long long mod = 1;
        for (int i = 0; i < K_; ++i) mod *= n_;
        next_[static_cast<size_t>(s) * n_ + a] =
            offset_[K_] + static_cast<int>((static_cast<long long>(code) * n_ + a) % mod);
      }
    }
    if (l == K_) full_.push_back(s);
  }
}

int StateSpace::index(const std::vector<int>& history) const {
  const int l = static_cast<int>(history.size());
  if (l > K_) throw FormatError("history longer than K");
  long long code = 0;
  for (int a : history) {
    if (a < 0 || a >= n_) throw FormatError("action index out of range");
    code = code * n_ + a;
  }
  return offset_[l] + static_cast<int>(code);
}

SequenceState StateSpace::state(int s) const { return make_state(histories_[s], K_); }

int StateSpace::star() const { return index(std::vector<int>(K_, n_ - 1)); }

std::string StateSpace::label(int s, const std::vector<std::string>& names) const {
  std::string out = "(";
  const auto& h = histories_[s];
  for (size_t i = 0; i < h.size(); ++i) {
    if (i) out += ",";
    out += names[h[i]];
  }
  return out + ")";
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

int name_index(const std::vector<std::string>& names, const std::string& n) {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == n) return static_cast<int>(i);
  throw FormatError("unknown action '" + n + "'");
}

}  // namespace

int StateSpace::parse_label(const std::string& label, const std::vector<std::string>& names) const {
  if (label.size() < 2 || label.front() != '(' || label.back() != ')')
    throw FormatError("bad state label '" + label + "'");
  std::string inner = label.substr(1, label.size() - 2);
  std::vector<int> h;
  if (!inner.empty())
    for (const auto& part : split(inner, ',')) h.push_back(name_index(names, part));
  return index(h);
}

std::string cell_name(const std::vector<int>& cell, const std::vector<std::string>& names) {
  std::string out;
  for (size_t i = 0; i < cell.size(); ++i) {
    if (i) out += "+";
    out += names[cell[i]];
  }
  return out;
}

ObservationMap::ObservationMap(const StateSpace& space, const ActionPartition& partition, ObservationMode mode)
    : mode_(mode), partition_(partition) {
  of_.resize(space.size());
  for (int s = 0; s < space.size(); ++s) {
    Observation o = observe(space.state(s), partition, mode, space.K());
    auto it = index_.find(o);
    int id;
    if (it == index_.end()) {
      id = static_cast<int>(observations_.size());
      index_.emplace(o, id);
      observations_.push_back(o);
      members_.emplace_back();
    } else {
      id = it->second;
    }
    of_[s] = id;
    members_[id].push_back(s);
  }
}

int ObservationMap::find(const Observation& obs) const {
  auto it = index_.find(obs);
  if (it == index_.end()) throw FormatError("observation not in the observation space");
  return it->second;
}

std::string ObservationMap::label(int o, const std::vector<std::string>& action_names) const {
  const Observation& obs = observations_[o];
  if (obs.is_sequence) {
    std::string out = "(";
    for (size_t i = 0; i < obs.sequence.size(); ++i) {
      if (i) out += ",";
      out += action_names[obs.sequence[i]];
    }
    return out + ")";
  }
  std::string out = "{";
  for (int c = 0; c < partition_.size(); ++c) {
    if (c) out += ",";
    out += cell_name(partition_.cells[c], action_names) + ":" + std::to_string(obs.summary.counts[c]);
  }
  if (obs.summary.known_time) out += "|t=" + std::to_string(*obs.summary.known_time);
  return out + "}";
}

int ObservationMap::parse_label(const std::string& label, const std::vector<std::string>& action_names) const {
  for (int o = 0; o < size(); ++o)
    if (this->label(o, action_names) == label) return o;
  throw FormatError("unknown observation '" + label + "'");
}

std::vector<Block> blocks(const StateSpace& space, const ObservationMap& obs, int top) {
  std::map<std::pair<int, int>, Block> grouped;
  for (int s : space.full_states()) {
    const int k = category(space.state(s), top, space.K());
    Block& b = grouped[{k, obs.of(s)}];
    b.category = k;
    b.observation = obs.of(s);
    b.states.push_back(s);
    if (space.history(s).front() == top)
      b.star_part.push_back(s);
    else
      b.prime_part.push_back(s);
  }
  std::vector<Block> out;
  for (auto& [key, b] : grouped) out.push_back(std::move(b));
  return out;
}

template <class T>
std::vector<Block> blocks(int K, const BasicStageGame<T>& g, const ActionPartition& p) {
  StateSpace space(g.n1(), K);
  ObservationMap obs(space, p, ObservationMode::counts);
  return blocks(space, obs, g.top());
}

template <class T>
BasicStageGame<T> reduced_game(const BasicStageGame<T>& g, const ActionPartition& p) {
  BasicStageGame<T> r;
  r.actions2 = g.actions2;
  std::vector<int> keep = p.minima();
  std::sort(keep.begin(), keep.end());
  for (int a : keep) {
    r.actions1.push_back(g.actions1[a]);
    for (int b = 0; b < g.n2(); ++b) {
      r.payoff1.push_back(g.u1(a, b));
      r.payoff2.push_back(g.u2(a, b));
    }
  }
  return r;
}

#define REPGAME_STATE_SPACE(T)                                                                        \
  template std::vector<T> signal_distribution<T>(const SignalModel<T>&, int, int);                    \
  template std::vector<std::pair<SequenceState, T>> signal_advance<T>(const SequenceState&, int,      \
                                                                      const SignalModel<T>&, int);    \
  template std::vector<Block> blocks<T>(int, const BasicStageGame<T>&, const ActionPartition&);       \
  template BasicStageGame<T> reduced_game<T>(const BasicStageGame<T>&, const ActionPartition&);

REPGAME_STATE_SPACE(double)
REPGAME_STATE_SPACE(Rational)

}  // namespace repgame
