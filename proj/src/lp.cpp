#include "clustertail/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace clustertail {

namespace {

constexpr double kPivotTol = 1e-11;

struct Tableau {
  int m = 0;
  int cols = 0;                      // structural + artificial columns
  DenseMatrix t;                     // m x cols, holds B^{-1} A
  std::vector<double> rhs;           // B^{-1} b
  std::vector<double> reduced;       // cost row: c_j - c_B' B^{-1} A_j
  double value = 0.0;                // -c_B' B^{-1} b
  std::vector<int> basis;
  std::vector<bool> active_row;

  void pivot(int row, int col) {
    const double p = t(row, col);
    for (int c = 0; c < cols; ++c) t(row, c) /= p;
    rhs[row] /= p;
    for (int r = 0; r < m; ++r) {
      if (r == row) continue;
      const double f = t(r, col);
      if (f == 0.0) continue;
      for (int c = 0; c < cols; ++c) t(r, c) -= f * t(row, c);
      rhs[r] -= f * rhs[row];
      if (std::fabs(rhs[r]) < 1e-15) rhs[r] = 0.0;
    }
    const double f = reduced[col];
    if (f != 0.0) {
      for (int c = 0; c < cols; ++c) reduced[c] -= f * t(row, c);
      value -= f * rhs[row];
    }
    basis[row] = col;
  }

  void set_costs(const std::vector<double>& cost) {
    reduced = cost;
    value = 0.0;
    for (int r = 0; r < m; ++r) {
      if (!active_row[r]) continue;
      const double cb = cost[basis[r]];
      if (cb == 0.0) continue;
      for (int c = 0; c < cols; ++c) reduced[c] -= cb * t(r, c);
      value -= cb * rhs[r];
    }
  }

  // Returns kOptimal, kUnbounded or kIterationLimit. Columns >= `allowed` never enter.
  LpStatus run(int allowed, int& iterations, int max_iterations) {
    for (;;) {
      int enter = -1;
      for (int c = 0; c < allowed; ++c) {
        if (reduced[c] < -1e-10) {
          enter = c;
          break;
        }
      }
      if (enter < 0) return LpStatus::kOptimal;
      if (iterations >= max_iterations) return LpStatus::kIterationLimit;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m; ++r) {
        if (!active_row[r] || t(r, enter) <= kPivotTol) continue;
        const double ratio = rhs[r] / t(r, enter);
        if (ratio < best - 1e-13 || (ratio <= best + 1e-13 && leave >= 0 && basis[r] < basis[leave])) {
          best = std::min(best, ratio);
          leave = r;
        }
      }
      if (leave < 0) return LpStatus::kUnbounded;
      pivot(leave, enter);
      ++iterations;
    }
  }
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, int max_iterations) {
  const int m = lp.a.rows();
  const int n = lp.a.cols();
  if (static_cast<int>(lp.b.size()) != m || static_cast<int>(lp.c.size()) != n) {
    throw std::invalid_argument("solve_lp: dimension mismatch");
  }
  Tableau tab;
  tab.m = m;
  tab.cols = n + m;
  tab.t = DenseMatrix(m, n + m);
  tab.rhs.resize(m);
  tab.basis.resize(m);
  tab.active_row.assign(m, true);
  for (int r = 0; r < m; ++r) {
    const double sign = lp.b[r] < 0.0 ? -1.0 : 1.0;
    for (int c = 0; c < n; ++c) tab.t(r, c) = sign * lp.a(r, c);
    tab.t(r, n + r) = 1.0;
    tab.rhs[r] = sign * lp.b[r];
    tab.basis[r] = n + r;
  }

  LpResult result;
  // Phase 1: minimise the sum of artificials.
  std::vector<double> phase1(n + m, 0.0);
  for (int r = 0; r < m; ++r) phase1[n + r] = 1.0;
  tab.set_costs(phase1);
  LpStatus st = tab.run(n, result.iterations, max_iterations);
  if (st == LpStatus::kIterationLimit) {
    result.status = st;
    return result;
  }
  double bscale = 1.0;
  for (double v : lp.b) bscale = std::max(bscale, std::fabs(v));
  if (-tab.value > 1e-9 * bscale) {
    result.status = LpStatus::kInfeasible;
    return result;
  }
  // Drive remaining artificials out of the basis; rows where that is impossible are redundant.
  for (int r = 0; r < m; ++r) {
    if (tab.basis[r] < n) continue;
    int col = -1;
    for (int c = 0; c < n; ++c) {
      if (std::fabs(tab.t(r, c)) > 1e-9) {
        col = c;
        break;
      }
    }
    if (col >= 0) {
      tab.pivot(r, col);
    } else {
      tab.active_row[r] = false;
    }
  }

  // Phase 2.
  std::vector<double> cost(n + m, 0.0);
  std::copy(lp.c.begin(), lp.c.end(), cost.begin());
  tab.set_costs(cost);
  st = tab.run(n, result.iterations, max_iterations);
  if (st != LpStatus::kOptimal) {
    result.status = st;
    return result;
  }

  result.status = LpStatus::kOptimal;
  result.x.assign(n, 0.0);
  for (int r = 0; r < m; ++r)
    if (tab.active_row[r] && tab.basis[r] < n) result.x[tab.basis[r]] = std::max(0.0, tab.rhs[r]);
  result.objective = 0.0;
  for (int c = 0; c < n; ++c) result.objective += lp.c[c] * result.x[c];

  // Dual certificate: solve B' y = c_B over the active rows.
  std::vector<int> rows;
  for (int r = 0; r < m; ++r)
    if (tab.active_row[r]) rows.push_back(r);
  const int k = static_cast<int>(rows.size());
  result.dual.assign(m, 0.0);
  if (k > 0) {
    DenseMatrix bt(k, k);
    std::vector<double> cb(k);
    for (int a = 0; a < k; ++a) {
      const int col = tab.basis[rows[a]];
      cb[a] = col < n ? lp.c[col] : 0.0;
      for (int b = 0; b < k; ++b) bt(a, b) = col < n ? lp.a(rows[b], col) : (rows[b] == col - n ? 1.0 : 0.0);
    }
    if (auto inv = inverse(bt)) {
      for (int b = 0; b < k; ++b) {
        double y = 0.0;
        for (int a = 0; a < k; ++a) y += (*inv)(b, a) * cb[a];
        result.dual[rows[b]] = y;
      }
    }
  }
  double dual_obj = 0.0;
  for (int r = 0; r < m; ++r) dual_obj += lp.b[r] * result.dual[r];
  result.duality_gap = std::fabs(result.objective - dual_obj);
  double worst = 0.0;
  for (int c = 0; c < n; ++c) {
    double rc = lp.c[c];
    for (int r = 0; r < m; ++r) rc -= lp.a(r, c) * result.dual[r];
    worst = std::min(worst, rc);
  }
  result.dual_infeasibility = -worst;
  return result;
}

}  // namespace clustertail
