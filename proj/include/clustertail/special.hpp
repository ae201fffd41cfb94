#pragma once

namespace clustertail {

// Result of a truncated series evaluation together with a bound on the
// absolute truncation error.
struct CertifiedValue {
  double value = 0.0;
  double error_bound = 0.0;
};

// Hurwitz zeta over integer shifts: sum_{k >= first} k^{-s}, for s > 1 and
// first >= 1. Partial summation followed by an Euler-Maclaurin tail whose
// remainder is bounded by the first omitted correction term.
CertifiedValue hurwitz_zeta(double s, double first);

}  // namespace clustertail
