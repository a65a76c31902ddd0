#pragma once

// Bounded-variable dual simplex over a dense tableau. Sized for the
// relaxations inside branch-and-bound: a few thousand columns, warm
// re-solves after bound changes, deterministic pivoting.

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace clrpod::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// min c'x  s.t.  row.lower <= a_i'x <= row.upper,  lower <= x <= upper.
struct LinearProgram {
  struct Row {
    std::vector<int> index;
    std::vector<double> value;
    double lower = -kInf;
    double upper = kInf;
  };

  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Row> rows;

  int num_vars() const { return static_cast<int>(cost.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }
  /// Appends a variable and returns its index.
  int add_var(double c, double lo, double hi);
  void add_row(Row row) { rows.push_back(std::move(row)); }
};

enum class LpStatus {
  Optimal,
  Infeasible,
  Unbounded,
  IterationLimit,
  TimeLimit,
  Numerical,
};

const char* to_string(LpStatus s);

struct LpResult {
  LpStatus status = LpStatus::Numerical;
  double objective = 0.0;
  std::vector<double> x;
  long iterations = 0;
};

/// Basic/nonbasic partition with the bound side of every nonbasic column.
struct Basis {
  std::vector<int> basic;
  std::vector<std::uint8_t> at_upper;
};

class DualSimplex {
 public:
  explicit DualSimplex(const LinearProgram& lp);

  /// Re-optimizes from the current basis.
  LpResult solve();

  /// Changes bounds of a structural variable, keeping the basis.
  void set_bounds(int var, double lo, double hi);
  double lower(int var) const { return lo_[var]; }
  double upper(int var) const { return hi_[var]; }

  Basis basis() const;
  /// Moves the tableau to the given basis under the current bounds.
  /// Falls back to a fresh factorization when pivots become unstable.
  void restore(const Basis& basis);

  long total_pivots() const { return total_pivots_; }

  /// solve() stops with TimeLimit once this passes.
  void set_deadline(std::optional<std::chrono::steady_clock::time_point> t) {
    deadline_ = t;
  }

  /// Largest relative row residual |a_i'x - r_i| of the current point.
  double residual() const;

 private:
  enum class Side : std::uint8_t { Lower, Upper };

  void reset_to_slack_basis();
  void pivot(int row, int col);
  bool pivot_in(const std::vector<int>& target);
  void place_nonbasic(int j);
  void recompute_primal();
  void recompute_duals();
  void refactor();
  double row_scale(int i) const { return scale_[i]; }
  double infeasibility(int row) const;
  double growth() const;
  bool duals_consistent();
  bool proves_infeasible(int row) const;

  int m_ = 0;
  int n_ = 0;
  int cols_ = 0;
  const LinearProgram* lp_;
  std::vector<double> scale_;
  double cost_scale_ = 1.0;
  std::vector<double> cost_;
  std::vector<double> lo_, hi_;
  std::vector<std::uint8_t> artificial_lo_, artificial_hi_;
  std::vector<double> tab_;  // m_ x cols_, row-major
  std::vector<int> head_;    // basic column of each row
  std::vector<int> where_;   // row of a basic column, -1 if nonbasic
  std::vector<Side> side_;
  std::vector<double> x_;
  std::vector<double> d_;
  long pivots_since_refactor_ = 0;
  long total_pivots_ = 0;
  std::vector<int> nz_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
};

/// One-shot solve.
LpResult solve_lp(const LinearProgram& lp);

}  // namespace clrpod::lp
