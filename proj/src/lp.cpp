#include "clrpod/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace clrpod::lp {

namespace {

constexpr double kPrimalTol = 1e-7;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-7;
constexpr double kRestorePivotTol = 1e-7;
// Box placed on an infinite bound when a nonbasic column needs one to be
// dual feasible; reaching it at the optimum means the LP is unbounded.
constexpr double kArtificialBound = 1e7;
// Tableau entries beyond this mean the basis went near-singular on the way
// in; the factorization is rebuilt from the slack basis.
constexpr double kGrowthLimit = 1e9;

double tol_for(double bound) { return kPrimalTol * (1.0 + std::abs(bound)); }

}  // namespace

int LinearProgram::add_var(double c, double lo, double hi) {
  cost.push_back(c);
  lower.push_back(lo);
  upper.push_back(hi);
  return num_vars() - 1;
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
    case LpStatus::TimeLimit: return "time-limit";
    case LpStatus::Numerical: return "numerical";
  }
  return "unknown";
}

DualSimplex::DualSimplex(const LinearProgram& lp)
    : m_(lp.num_rows()), n_(lp.num_vars()), cols_(n_ + m_), lp_(&lp) {
  if (static_cast<int>(lp.lower.size()) != n_ ||
      static_cast<int>(lp.upper.size()) != n_) {
    throw std::invalid_argument("LP bound vectors do not match cost vector");
  }
  scale_.assign(m_, 1.0);
  for (int i = 0; i < m_; ++i) {
    const auto& row = lp.rows[i];
    double big = 0.0;
    for (std::size_t t = 0; t < row.index.size(); ++t) {
      if (row.index[t] < 0 || row.index[t] >= n_) {
        throw std::invalid_argument("LP row references unknown variable");
      }
      big = std::max(big, std::abs(row.value[t]));
    }
    if (big > 0.0) scale_[i] = 1.0 / big;
  }
  double cmax = 0.0;
  for (double c : lp.cost) cmax = std::max(cmax, std::abs(c));
  cost_scale_ = cmax > 0.0 ? cmax : 1.0;

  cost_.assign(cols_, 0.0);
  lo_.assign(cols_, 0.0);
  hi_.assign(cols_, 0.0);
  for (int j = 0; j < n_; ++j) {
    cost_[j] = lp.cost[j] / cost_scale_;
    lo_[j] = lp.lower[j];
    hi_[j] = lp.upper[j];
  }
  for (int i = 0; i < m_; ++i) {
    lo_[n_ + i] = lp.rows[i].lower * scale_[i];
    hi_[n_ + i] = lp.rows[i].upper * scale_[i];
  }
  artificial_lo_.assign(cols_, 0);
  artificial_hi_.assign(cols_, 0);
  side_.assign(cols_, Side::Lower);
  x_.assign(cols_, 0.0);
  d_.assign(cols_, 0.0);
  reset_to_slack_basis();
  recompute_duals();
  for (int j = 0; j < n_; ++j) place_nonbasic(j);
  recompute_primal();
}

void DualSimplex::reset_to_slack_basis() {
  tab_.assign(static_cast<std::size_t>(m_) * cols_, 0.0);
  head_.resize(m_);
  where_.assign(cols_, -1);
  for (int i = 0; i < m_; ++i) {
    const auto& row = lp_->rows[i];
    double* t = &tab_[static_cast<std::size_t>(i) * cols_];
    for (std::size_t k = 0; k < row.index.size(); ++k) {
      t[row.index[k]] -= row.value[k] * scale_[i];
    }
    t[n_ + i] = 1.0;
    head_[i] = n_ + i;
    where_[n_ + i] = i;
  }
  pivots_since_refactor_ = 0;
}

void DualSimplex::place_nonbasic(int j) {
  if (lo_[j] == hi_[j]) {
    side_[j] = Side::Lower;
    x_[j] = lo_[j];
    return;
  }
  bool want_upper;
  if (d_[j] > kDualTol) {
    want_upper = false;
  } else if (d_[j] < -kDualTol) {
    want_upper = true;
  } else {
    want_upper = side_[j] == Side::Upper ? std::isfinite(hi_[j])
                                         : !std::isfinite(lo_[j]);
  }
  if (want_upper && !std::isfinite(hi_[j])) {
    hi_[j] = std::max(kArtificialBound, lo_[j] + kArtificialBound);
    artificial_hi_[j] = 1;
  }
  if (!want_upper && !std::isfinite(lo_[j])) {
    lo_[j] = std::min(-kArtificialBound, hi_[j] - kArtificialBound);
    artificial_lo_[j] = 1;
  }
  side_[j] = want_upper ? Side::Upper : Side::Lower;
  x_[j] = want_upper ? hi_[j] : lo_[j];
}

void DualSimplex::recompute_primal() {
  for (int i = 0; i < m_; ++i) {
    const double* t = &tab_[static_cast<std::size_t>(i) * cols_];
    double v = 0.0;
    for (int j = 0; j < cols_; ++j) {
      if (where_[j] < 0 && t[j] != 0.0) v -= t[j] * x_[j];
    }
    x_[head_[i]] = v;
  }
}

void DualSimplex::recompute_duals() {
  d_ = cost_;
  for (int i = 0; i < m_; ++i) {
    const double cb = cost_[head_[i]];
    if (cb == 0.0) continue;
    const double* t = &tab_[static_cast<std::size_t>(i) * cols_];
    for (int j = 0; j < cols_; ++j) d_[j] -= cb * t[j];
  }
  for (int i = 0; i < m_; ++i) d_[head_[i]] = 0.0;
}

void DualSimplex::pivot(int r, int q) {
  double* pr = &tab_[static_cast<std::size_t>(r) * cols_];
  const double alpha = pr[q];
  nz_.clear();
  for (int j = 0; j < cols_; ++j) {
    if (pr[j] != 0.0) {
      pr[j] /= alpha;
      nz_.push_back(j);
    }
  }
  pr[q] = 1.0;
  for (int i = 0; i < m_; ++i) {
    if (i == r) continue;
    double* pi = &tab_[static_cast<std::size_t>(i) * cols_];
    const double f = pi[q];
    if (f == 0.0) continue;
    for (int j : nz_) pi[j] -= f * pr[j];
    pi[q] = 0.0;
  }
  where_[head_[r]] = -1;
  head_[r] = q;
  where_[q] = r;
  ++pivots_since_refactor_;
  ++total_pivots_;
}

bool DualSimplex::pivot_in(const std::vector<int>& target) {
  std::vector<std::uint8_t> wanted(cols_, 0);
  for (int q : target) wanted[q] = 1;
  bool ok = true;
  for (int q : target) {
    if (where_[q] >= 0) continue;
    int best = -1;
    double best_abs = kRestorePivotTol;
    for (int i = 0; i < m_; ++i) {
      if (wanted[head_[i]]) continue;
      const double a = std::abs(tab_[static_cast<std::size_t>(i) * cols_ + q]);
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (best < 0) {
      ok = false;
      continue;
    }
    pivot(best, q);
  }
  return ok;
}

void DualSimplex::refactor() {
  std::vector<int> basic(head_);
  reset_to_slack_basis();
  pivot_in(basic);
  recompute_duals();
  for (int j = 0; j < cols_; ++j) {
    if (where_[j] < 0) x_[j] = side_[j] == Side::Upper ? hi_[j] : lo_[j];
  }
  recompute_primal();
}

Basis DualSimplex::basis() const {
  Basis b;
  b.basic = head_;
  b.at_upper.resize(cols_);
  for (int j = 0; j < cols_; ++j) b.at_upper[j] = side_[j] == Side::Upper;
  return b;
}

double DualSimplex::growth() const {
  double big = 0.0;
  for (double v : tab_) big = std::max(big, std::abs(v));
  return big;
}

void DualSimplex::restore(const Basis& b) {
  if (!pivot_in(b.basic) || pivots_since_refactor_ > 4L * m_ + 200 ||
      growth() > kGrowthLimit) {
    reset_to_slack_basis();
    pivot_in(b.basic);
  }
  for (int j = 0; j < cols_; ++j) {
    side_[j] = b.at_upper[j] ? Side::Upper : Side::Lower;
  }
  recompute_duals();
  for (int j = 0; j < cols_; ++j) {
    if (where_[j] >= 0) continue;
    const bool upper_ok = side_[j] == Side::Upper && std::isfinite(hi_[j]);
    const bool lower_ok = side_[j] == Side::Lower && std::isfinite(lo_[j]);
    if (upper_ok) {
      x_[j] = hi_[j];
    } else if (lower_ok) {
      x_[j] = lo_[j];
    } else {
      place_nonbasic(j);
    }
  }
  recompute_primal();
}

void DualSimplex::set_bounds(int var, double lo, double hi) {
  if (var < 0 || var >= n_) throw std::out_of_range("set_bounds: bad variable");
  lo_[var] = lo;
  hi_[var] = hi;
  artificial_lo_[var] = 0;
  artificial_hi_[var] = 0;
  if (where_[var] >= 0) return;
  const double old = x_[var];
  place_nonbasic(var);
  const double delta = x_[var] - old;
  if (delta == 0.0) return;
  for (int i = 0; i < m_; ++i) {
    const double t = tab_[static_cast<std::size_t>(i) * cols_ + var];
    if (t != 0.0) x_[head_[i]] -= t * delta;
  }
}

double DualSimplex::infeasibility(int row) const {
  const int b = head_[row];
  const double v = x_[b];
  if (v < lo_[b] - tol_for(lo_[b])) return lo_[b] - v;
  if (v > hi_[b] + tol_for(hi_[b])) return v - hi_[b];
  return 0.0;
}

bool DualSimplex::proves_infeasible(int r) const {
  // Row r of the tableau is y * [-A | I] with y read off the slack columns,
  // and sums to zero at every point. Rebuild it from A and bound it over the
  // true box; the point is infeasible only if zero is out of reach.
  const double* t = &tab_[static_cast<std::size_t>(r) * cols_];
  std::vector<double> coef(cols_, 0.0);
  for (int i = 0; i < m_; ++i) {
    const double y = t[n_ + i];
    coef[n_ + i] = y;
    if (y == 0.0) continue;
    const auto& row = lp_->rows[i];
    for (std::size_t k = 0; k < row.index.size(); ++k) {
      coef[row.index[k]] -= y * scale_[i] * row.value[k];
    }
  }
  double lo_sum = 0.0, hi_sum = 0.0, mag = 0.0;
  for (int j = 0; j < cols_; ++j) {
    const double c = coef[j];
    if (c == 0.0) continue;
    const double lo = artificial_lo_[j] ? -kInf : lo_[j];
    const double hi = artificial_hi_[j] ? kInf : hi_[j];
    // Roundoff-sized entries on unbounded columns are noise, as in the
    // ratio test; bounded columns count however small.
    if (std::abs(c) <= kPivotTol && !(std::isfinite(lo) && std::isfinite(hi))) {
      continue;
    }
    const double at_lo = c * lo, at_hi = c * hi;
    lo_sum += std::min(at_lo, at_hi);
    hi_sum += std::max(at_lo, at_hi);
    mag += std::abs(c) * std::max(std::abs(x_[j]), 1.0);
  }
  const double tol = 1e-9 * (1.0 + mag);
  return lo_sum > tol || hi_sum < -tol;
}

bool DualSimplex::duals_consistent() {
  // Row prices read off the slack columns must reproduce every structural
  // reduced cost from the original matrix; a drifted tableau fails this.
  recompute_duals();
  std::vector<double> dj(cost_.begin(), cost_.begin() + n_);
  for (int i = 0; i < m_; ++i) {
    const double pi = -d_[n_ + i];
    if (pi == 0.0) continue;
    const auto& row = lp_->rows[i];
    for (std::size_t k = 0; k < row.index.size(); ++k) {
      dj[row.index[k]] += pi * scale_[i] * row.value[k];
    }
  }
  for (int j = 0; j < n_; ++j) {
    const double expect = where_[j] >= 0 ? 0.0 : d_[j];
    if (std::abs(dj[j] - expect) > 1e-7) return false;
  }
  return true;
}

double DualSimplex::residual() const {
  double worst = 0.0;
  for (int i = 0; i < m_; ++i) {
    const auto& row = lp_->rows[i];
    double ax = 0.0;
    for (std::size_t k = 0; k < row.index.size(); ++k) {
      ax += row.value[k] * x_[row.index[k]];
    }
    worst = std::max(worst, std::abs(ax * scale_[i] - x_[n_ + i]) /
                                (1.0 + std::abs(x_[n_ + i])));
  }
  return worst;
}

LpResult DualSimplex::solve() {
  LpResult res;
  // Restore dual feasibility by bound flips (or artificial boxes). Needed
  // again after a refactor, since fresh reduced costs can differ in sign.
  auto repair_duals = [&] {
    bool flipped = false;
    for (int j = 0; j < cols_; ++j) {
      if (where_[j] >= 0 || lo_[j] == hi_[j]) continue;
      const bool bad = (side_[j] == Side::Lower && d_[j] < -kDualTol) ||
                       (side_[j] == Side::Upper && d_[j] > kDualTol);
      if (bad) {
        place_nonbasic(j);
        flipped = true;
      }
    }
    if (flipped) recompute_primal();
  };
  repair_duals();

  const long dantzig_budget = 10L * (m_ + cols_);
  const long limit = 40L * (m_ + cols_) + 10000;
  long iter = 0;
  bool retried = false;
  bool refactored_for_proof = false;
  while (true) {
    if (iter >= limit) {
      res.status = LpStatus::IterationLimit;
      break;
    }
    if (deadline_ && iter % 8 == 0 &&
        std::chrono::steady_clock::now() >= *deadline_) {
      res.status = LpStatus::TimeLimit;
      break;
    }
    const bool bland = iter >= dantzig_budget;
    if (pivots_since_refactor_ > 2L * m_ + 500) {
      refactor();
      repair_duals();
    }

    int r = -1;
    double worst = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double inf = infeasibility(i);
      if (inf <= 0.0) continue;
      if (bland) {
        if (r < 0 || head_[i] < head_[r]) r = i;
      } else if (inf > worst) {
        worst = inf;
        r = i;
      }
    }
    if (r < 0) {
      // Verify the row residuals before declaring optimality.
      if (residual() > 1e-6 || !duals_consistent()) {
        if (retried) {
          res.status = LpStatus::Numerical;
          break;
        }
        retried = true;
        refactor();
        repair_duals();
        continue;
      }
      res.status = LpStatus::Optimal;
      for (int j = 0; j < cols_; ++j) {
        if (where_[j] >= 0) continue;
        const bool at_art = (side_[j] == Side::Lower && artificial_lo_[j]) ||
                            (side_[j] == Side::Upper && artificial_hi_[j]);
        if (at_art && std::abs(d_[j]) > kDualTol) {
          res.status = LpStatus::Unbounded;
          break;
        }
      }
      break;
    }

    const int leaving = head_[r];
    const bool below = x_[leaving] < lo_[leaving];
    const double* pr = &tab_[static_cast<std::size_t>(r) * cols_];

    // Harris two-pass ratio test on the reduced costs.
    double theta_max = kInf;
    for (int j = 0; j < cols_; ++j) {
      if (where_[j] >= 0 || lo_[j] == hi_[j]) continue;
      const double a = pr[j];
      if (std::abs(a) <= kPivotTol) continue;
      const bool up = side_[j] == Side::Lower;
      const bool eligible = below ? (up ? a < 0.0 : a > 0.0)
                                  : (up ? a > 0.0 : a < 0.0);
      if (!eligible) continue;
      const double dj = up ? std::max(d_[j], 0.0) : std::max(-d_[j], 0.0);
      theta_max = std::min(theta_max, (dj + kDualTol) / std::abs(a));
    }
    if (!std::isfinite(theta_max)) {
      // The row is only trusted once it is re-derived from the original
      // matrix; a drifted tableau gets one refactor, then gives up.
      if (!proves_infeasible(r)) {
        if (refactored_for_proof) {
          res.status = LpStatus::Numerical;
          break;
        }
        refactored_for_proof = true;
        refactor();
        repair_duals();
        continue;
      }
      res.status = LpStatus::Infeasible;
      break;
    }
    int q = -1;
    double best = 0.0;
    for (int j = 0; j < cols_; ++j) {
      if (where_[j] >= 0 || lo_[j] == hi_[j]) continue;
      const double a = pr[j];
      if (std::abs(a) <= kPivotTol) continue;
      const bool up = side_[j] == Side::Lower;
      const bool eligible = below ? (up ? a < 0.0 : a > 0.0)
                                  : (up ? a > 0.0 : a < 0.0);
      if (!eligible) continue;
      const double dj = up ? std::max(d_[j], 0.0) : std::max(-d_[j], 0.0);
      const double ratio = dj / std::abs(a);
      if (ratio > theta_max) continue;
      if (bland) {
        if (q < 0) q = j;
      } else if (std::abs(a) > best) {
        best = std::abs(a);
        q = j;
      }
    }
    if (q < 0) {
      res.status = LpStatus::Infeasible;
      break;
    }

    const double alpha = pr[q];
    const double theta_d = d_[q] / alpha;
    for (int j = 0; j < cols_; ++j) {
      if (pr[j] != 0.0) d_[j] -= theta_d * pr[j];
    }
    d_[q] = 0.0;

    const double target = below ? lo_[leaving] : hi_[leaving];
    const double t = (x_[leaving] - target) / alpha;
    x_[q] += t;
    for (int i = 0; i < m_; ++i) {
      const double tq = tab_[static_cast<std::size_t>(i) * cols_ + q];
      if (tq != 0.0) x_[head_[i]] -= tq * t;
    }
    x_[leaving] = target;
    side_[leaving] = below ? Side::Lower : Side::Upper;
    pivot(r, q);
    ++iter;
  }
  res.iterations = iter;
  res.x.assign(x_.begin(), x_.begin() + n_);
  double obj = 0.0;
  for (int j = 0; j < n_; ++j) obj += lp_->cost[j] * res.x[j];
  res.objective = obj;
  return res;
}

LpResult solve_lp(const LinearProgram& lp) {
  DualSimplex s(lp);
  return s.solve();
}

}  // namespace clrpod::lp
