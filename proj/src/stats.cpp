#include "clustertail/stats.hpp"

#include <algorithm>
#include <functional>
#include <limits>

#include "clustertail/error.hpp"

namespace clustertail {

double z_score(double a, double sa, double b, double sb) {
  const double diff = a - b;
  const double se = std::sqrt(sa * sa + sb * sb);
  if (diff == 0.0) return 0.0;
  if (se == 0.0) return diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  return diff / se;
}

Proportion proportion(std::uint64_t hits, std::uint64_t samples) {
  Proportion out;
  if (samples == 0) return out;
  out.p = static_cast<double>(hits) / static_cast<double>(samples);
  out.se = std::sqrt(out.p * (1.0 - out.p) / static_cast<double>(samples));
  return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  const std::size_t n = std::min(x.size(), y.size());
  f.points = static_cast<int>(n);
  if (n < 2) return f;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return f;
}

double hill_estimate(std::vector<double> values, std::size_t k) {
  if (k < 10 || k >= values.size()) {
    throw Error(ErrorKind::TooFewSamples, "Hill estimator needs 10 <= k < sample size");
  }
  for (double v : values) {
    if (!(v > 0.0)) throw Error(ErrorKind::InvalidArgument, "Hill estimator needs positive values");
  }
  std::nth_element(values.begin(), values.begin() + k, values.end(), std::greater<double>());
  const double threshold = values[k];
  double h = 0.0;
  for (std::size_t i = 0; i < k; ++i) h += std::log(values[i] / threshold);
  h /= static_cast<double>(k);
  if (!(h > 0.0)) throw Error(ErrorKind::TooFewSamples, "Hill estimator: degenerate top order statistics");
  return 1.0 / h;
}

}  // namespace clustertail
