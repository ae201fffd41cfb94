#include "clustertail/special.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace clustertail {

namespace {

// B_{2j} / (2j)! for j = 1..7.
constexpr std::array<double, 7> kBernoulliOverFactorial = {
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
};

constexpr double kSwitchPoint = 32.0;

}  // namespace

CertifiedValue hurwitz_zeta(double s, double first) {
  if (!(s > 1.0) || !(first >= 1.0)) {
    throw std::invalid_argument("hurwitz_zeta requires s > 1 and first >= 1");
  }
  first = std::floor(first);
  double partial = 0.0;
  double n = first;
  // Sum the head explicitly until the tail expansion is accurate.
  while (n < kSwitchPoint) {
    partial += std::pow(n, -s);
    n += 1.0;
  }
  // Euler-Maclaurin at n: sum_{k>=n} f(k) = int_n^inf f + f(n)/2 - sum_j B_2j/(2j)! f^{(2j-1)}(n) + R.
  // For f(x) = x^{-s}, f^{(2j-1)}(n) = -s(s+1)...(s+2j-2) n^{-s-2j+1}.
  double tail = std::pow(n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(n, -s);
  double rising = s;  // s (s+1) ... (s + 2j - 2)
  double power = std::pow(n, -s - 1.0);
  double last_term = 0.0;
  for (std::size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
    const double term = kBernoulliOverFactorial[j] * rising * power;
    if (j + 1 == kBernoulliOverFactorial.size()) {
      last_term = term;
      break;
    }
    tail += term;
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
    power /= n * n;
  }
  const double value = partial + tail;
  // Rounding of the head sum is bounded by a few ulps per term.
  const double rounding = 4.0 * 0x1.0p-52 * value;
  return {value, std::fabs(last_term) + rounding};
}

}  // namespace clustertail
