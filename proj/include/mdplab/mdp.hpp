#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdplab {

inline constexpr double kRowSumTolerance = 1e-12;

// ---------------------------------------------------------------------------
// Error taxonomy. Everything thrown by the library derives from Error.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class SupportViolationError : public Error {
 public:
  using Error::Error;
};

// Carries the last residual so callers can report how far iteration got.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, double residual)
      : Error(msg), last_residual(residual) {}
  double last_residual;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Grid: dense row-major (row, col) table of doubles. The workhorse behind
// every (state, action) and (state, component) table in the library.
// ---------------------------------------------------------------------------

class Grid {
 public:
  Grid() = default;

  Grid(int rows, int cols, double fill = 0.0) : rows_(rows), cols_(cols) {
    if (rows <= 0 || cols <= 0)
      throw DimensionError("Grid dimensions must be positive, got " +
                           std::to_string(rows) + "x" + std::to_string(cols));
    data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
  }

  static Grid from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty())
      throw DimensionError("Grid::from_rows needs a non-empty rectangular input");
    Grid g(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (int r = 0; r < g.rows(); ++r) {
      if (static_cast<int>(rows[r].size()) != g.cols())
        throw DimensionError("Grid::from_rows: ragged row " + std::to_string(r));
      std::copy(rows[r].begin(), rows[r].end(), g.row(r).begin());
    }
    return g;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double operator()(int r, int c) const { return data_[index(r, c)]; }
  double& operator()(int r, int c) { return data_[index(r, c)]; }

  std::span<const double> row(int r) const {
    return {data_.data() + index(r, 0), static_cast<std::size_t>(cols_)};
  }
  std::span<double> row(int r) {
    return {data_.data() + index(r, 0), static_cast<std::size_t>(cols_)};
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool same_shape(const Grid& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

inline void require_same_shape(const Grid& a, const Grid& b, const char* what) {
  if (!a.same_shape(b))
    throw DimensionError(std::string(what) + ": shape mismatch (" +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + ")");
}

inline double sup_norm(const Grid& g) {
  double m = 0.0;
  for (double v : g.data()) m = std::max(m, std::abs(v));
  return m;
}

inline double sup_diff(const Grid& a, const Grid& b) {
  require_same_shape(a, b, "sup_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

inline double row_max(const Grid& g, int r) {
  auto row = g.row(r);
  return *std::max_element(row.begin(), row.end());
}

inline bool all_finite(const Grid& g) {
  return std::all_of(g.data().begin(), g.data().end(),
                     [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------
// FiniteMdp: (S, A, P, gamma). Rewards live in their own tables so the same
// dynamics can be paired with many reward functions.
// ---------------------------------------------------------------------------

class FiniteMdp {
 public:
  // transition is flat, indexed ((s * n_actions + a) * n_states + s2).
  FiniteMdp(int n_states, int n_actions, std::vector<double> transition, double discount)
      : n_states_(n_states),
        n_actions_(n_actions),
        discount_(discount),
        transition_(std::move(transition)) {
    if (n_states <= 0 || n_actions <= 0)
      throw ValidationError("FiniteMdp: state and action counts must be positive");
    if (!(discount >= 0.0) || !(discount < 1.0))
      throw ValidationError("FiniteMdp: discount must lie in [0, 1), got " +
                            std::to_string(discount));
    const std::size_t expected = static_cast<std::size_t>(n_states) * n_actions * n_states;
    if (transition_.size() != expected)
      throw DimensionError("FiniteMdp: transition tensor has " +
                           std::to_string(transition_.size()) + " entries, expected " +
                           std::to_string(expected));
    for (int s = 0; s < n_states_; ++s) {
      for (int a = 0; a < n_actions_; ++a) {
        double sum = 0.0;
        for (int s2 = 0; s2 < n_states_; ++s2) {
          const double p = transition_[flat(s, a, s2)];
          if (p < 0.0)
            throw ValidationError("FiniteMdp: negative probability in transition row (s=" +
                                  std::to_string(s) + ", a=" + std::to_string(a) + ")");
          sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance)
          throw ValidationError("FiniteMdp: transition row (s=" + std::to_string(s) +
                                ", a=" + std::to_string(a) + ") sums to " +
                                std::to_string(sum) + ", expected 1");
      }
    }
  }

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  double discount() const { return discount_; }

  double p(int s, int a, int s2) const { return transition_[flat(s, a, s2)]; }

  std::span<const double> next_state_row(int s, int a) const {
    return {transition_.data() + flat(s, a, 0), static_cast<std::size_t>(n_states_)};
  }

  bool matches(const Grid& table) const {
    return table.rows() == n_states_ && table.cols() == n_actions_;
  }

 private:
  std::size_t flat(int s, int a, int s2) const {
    return (static_cast<std::size_t>(s) * n_actions_ + a) * n_states_ + s2;
  }

  int n_states_ = 0;
  int n_actions_ = 0;
  double discount_ = 0.0;
  std::vector<double> transition_;
};

// Sparse construction of the transition tensor. Unset (s, a) rows fail row-sum
// validation at build(), so forgetting a row is caught immediately.
class MdpBuilder {
 public:
  MdpBuilder(int n_states, int n_actions, double discount)
      : n_states_(n_states),
        n_actions_(n_actions),
        discount_(discount),
        transition_(static_cast<std::size_t>(n_states) * n_actions * n_states, 0.0) {
    if (n_states <= 0 || n_actions <= 0)
      throw ValidationError("MdpBuilder: state and action counts must be positive");
  }

  MdpBuilder& add(int s, int a, int s2, double prob) {
    check_state(s);
    check_state(s2);
    check_action(a);
    transition_[(static_cast<std::size_t>(s) * n_actions_ + a) * n_states_ + s2] += prob;
    return *this;
  }

  // Self-loop with probability 1 under every action.
  MdpBuilder& absorbing(int s) {
    for (int a = 0; a < n_actions_; ++a) add(s, a, s, 1.0);
    return *this;
  }

  // Deterministic successor under every action.
  MdpBuilder& chain(int s, int s2) {
    for (int a = 0; a < n_actions_; ++a) add(s, a, s2, 1.0);
    return *this;
  }

  FiniteMdp build() const { return FiniteMdp(n_states_, n_actions_, transition_, discount_); }

 private:
  void check_state(int s) const {
    if (s < 0 || s >= n_states_)
      throw ArgumentError("MdpBuilder: state index " + std::to_string(s) + " out of range");
  }
  void check_action(int a) const {
    if (a < 0 || a >= n_actions_)
      throw ArgumentError("MdpBuilder: action index " + std::to_string(a) + " out of range");
  }

  int n_states_;
  int n_actions_;
  double discount_;
  std::vector<double> transition_;
};

// ---------------------------------------------------------------------------
// Value-semantic tables. Construction validates the type's invariants.
// ---------------------------------------------------------------------------

struct RewardTable {
  RewardTable() = default;
  explicit RewardTable(Grid g) : values(std::move(g)) {
    if (!all_finite(values)) throw ValidationError("RewardTable: non-finite entry");
  }
  Grid values;

  friend bool operator==(const RewardTable&, const RewardTable&) = default;
};

struct QTable {
  QTable() = default;
  explicit QTable(Grid g) : values(std::move(g)) {
    if (!all_finite(values)) throw ValidationError("QTable: non-finite entry");
  }
  Grid values;

  friend bool operator==(const QTable&, const QTable&) = default;
};

struct ValueTable {
  ValueTable() = default;
  explicit ValueTable(std::vector<double> v) : values(std::move(v)) {
    for (double x : values)
      if (!std::isfinite(x)) throw ValidationError("ValueTable: non-finite entry");
  }
  std::vector<double> values;

  friend bool operator==(const ValueTable&, const ValueTable&) = default;
};

inline bool is_distribution_row(std::span<const double> row, double sum_tol = kRowSumTolerance) {
  double sum = 0.0;
  for (double v : row) {
    if (!(v >= 0.0)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= sum_tol;
}

struct PolicyTable {
  PolicyTable() = default;
  explicit PolicyTable(Grid g) : probs(std::move(g)) {
    for (int s = 0; s < probs.rows(); ++s)
      if (!is_distribution_row(probs.row(s)))
        throw ValidationError("PolicyTable: row " + std::to_string(s) +
                              " is not a probability distribution");
  }
  Grid probs;

  bool is_deterministic() const {
    for (int s = 0; s < probs.rows(); ++s) {
      int ones = 0;
      for (int a = 0; a < probs.cols(); ++a)
        if (probs(s, a) == 1.0) ++ones;
      if (ones != 1) return false;
    }
    return true;
  }

  friend bool operator==(const PolicyTable&, const PolicyTable&) = default;
};

// Actions within tie_tolerance of the row maximum, sorted ascending.
struct ActionSet {
  int state = 0;
  std::vector<int> actions;
  double tie_tolerance = 0.0;

  bool contains(int a) const {
    return std::binary_search(actions.begin(), actions.end(), a);
  }
  int size() const { return static_cast<int>(actions.size()); }

  friend bool operator==(const ActionSet&, const ActionSet&) = default;
};

// Floating point needs a band where the theory has an exact argmax; this
// default separates genuine degeneracy from round-off at the row's scale.
inline double default_tie_tolerance(const Grid& q, int state) {
  double mag = 0.0;
  for (double v : q.row(state)) mag = std::max(mag, std::abs(v));
  return 1e-9 * std::max(1.0, mag);
}

}  // namespace mdplab
