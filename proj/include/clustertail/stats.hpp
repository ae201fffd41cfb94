#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace clustertail {

// Count, sum and sum of squares of a scalar stream.
struct Moments {
  std::uint64_t n = 0;
  double sum = 0.0;
  double sumsq = 0.0;

  void add(double x) {
    ++n;
    sum += x;
    sumsq += x * x;
  }
  void merge(const Moments& o) {
    n += o.n;
    sum += o.sum;
    sumsq += o.sumsq;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  // Unbiased sample variance.
  double variance() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double v = (sumsq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
    return v > 0.0 ? v : 0.0;
  }
  double std_error() const { return n ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

// z-score of a - b for independent estimates with standard errors sa, sb.
// Identical estimates give 0; a nonzero difference with zero error gives inf.
double z_score(double a, double sa, double b, double sb);

// Binomial proportion and its plug-in standard error.
struct Proportion {
  double p = 0.0;
  double se = 0.0;
};
Proportion proportion(std::uint64_t hits, std::uint64_t samples);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  int points = 0;
};

// Ordinary least squares of y on x; slope_se is the classical standard error
// (zero with exactly two points).
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Hill estimate of the tail index from the top-k order statistics of
// positive values. Throws TooFewSamples when k < 10, k >= size, or the top
// order statistics are all equal.
double hill_estimate(std::vector<double> values, std::size_t k);

}  // namespace clustertail
