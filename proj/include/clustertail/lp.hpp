#pragma once

#include <vector>

#include "clustertail/linalg.hpp"

namespace clustertail {

// minimize c'x subject to A x = b, x >= 0.
struct LinearProgram {
  DenseMatrix a;
  std::vector<double> b;
  std::vector<double> c;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct LpResult {
  LpStatus status = LpStatus::kIterationLimit;
  std::vector<double> x;
  std::vector<double> dual;  // y with A'y <= c at optimality
  double objective = 0.0;
  // |c'x - b'y| and the most negative reduced cost, both checked at the optimum.
  double duality_gap = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
};

// Dense two-phase tableau simplex with Bland's anti-cycling rule. Intended for
// the tiny programs of the cone geometry (a few dozen columns at most).
LpResult solve_lp(const LinearProgram& lp, int max_iterations = 5000);

}  // namespace clustertail
