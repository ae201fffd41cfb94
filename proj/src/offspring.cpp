#include "clustertail/offspring.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "clustertail/error.hpp"
#include "clustertail/special.hpp"

namespace clustertail {

namespace {

constexpr int kTableSize = 4096;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, what);
}

// Integrates h(y) * alpha e^{-alpha y} over y in [0, inf), where y = log(w / x_m) and
// h is a Poisson functional of the intensity phi x_m e^y. h must be bounded by
// c0 + c1 e^y; `tail_rate` and `tail_const` give the analytic value of the
// integral of the limiting integrand beyond the last breakpoint.
template <class H, class TailIntegral>
double pareto_log_integral(H&& h, double alpha, double centre, double width,
                           TailIntegral&& tail_beyond) {
  using boost::math::quadrature::gauss_kronrod;
  const auto integrand = [&](double y) { return h(y) * alpha * std::exp(-alpha * y); };
  std::vector<double> breaks{0.0};
  for (double off : {-12.0, -4.0, 0.0, 4.0, 12.0}) {
    const double b = centre + off * width;
    if (b > breaks.back()) breaks.push_back(b);
  }
  // Beyond y_hi the Poisson functional has converged to its limit.
  const double y_hi = std::max(breaks.back(), 0.0) + 40.0 / alpha;
  if (y_hi > breaks.back()) breaks.push_back(y_hi);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    double err = 0.0;
    total += gauss_kronrod<double, 61>::integrate(integrand, breaks[k], breaks[k + 1], 12, 1e-11, &err);
  }
  return total + tail_beyond(breaks.back());
}

}  // namespace

const char* to_string(Family family) {
  return family == Family::ZetaTail ? "zeta_tail" : "mixed_poisson";
}

// Conditional law of a nonzero zeta draw: cdf[k-1] = P(K <= k | K >= 1).
struct OffspringLaw::ZetaTable {
  double s = 0.0;       // alpha + 1
  double zeta_s = 0.0;  // zeta(alpha + 1)
  std::vector<double> cdf;
  double accept_scale = 0.0;  // (1 + 1/(K+1))^s for the tail rejection sampler
};

OffspringLaw OffspringLaw::zeta_tail(double alpha, double p) {
  require(std::isfinite(alpha) && alpha > 1.0, "zeta_tail: alpha must be > 1");
  require(p >= 0.0 && p <= 1.0, "zeta_tail: p must lie in [0, 1]");
  OffspringLaw law;
  law.family_ = Family::ZetaTail;
  law.alpha_ = alpha;
  law.p_ = p;
  auto table = std::make_shared<ZetaTable>();
  table->s = alpha + 1.0;
  table->zeta_s = hurwitz_zeta(table->s, 1.0).value;
  table->cdf.resize(kTableSize);
  for (int k = 1; k <= kTableSize; ++k) {
    table->cdf[k - 1] = 1.0 - hurwitz_zeta(table->s, k + 1.0).value / table->zeta_s;
  }
  table->accept_scale = std::pow(1.0 + 1.0 / (kTableSize + 1.0), table->s);
  law.table_ = std::move(table);
  return law;
}

OffspringLaw OffspringLaw::zeta_tail_with_mean(double alpha, double mean) {
  require(std::isfinite(alpha) && alpha > 1.0, "zeta_tail: alpha must be > 1");
  require(std::isfinite(mean) && mean >= 0.0, "zeta_tail: mean must be >= 0");
  // The mean is linear in p, so the activity follows from the unit-activity mean.
  const double unit_mean = hurwitz_zeta(alpha, 1.0).value / hurwitz_zeta(alpha + 1.0, 1.0).value;
  const double p = mean / unit_mean;
  require(p <= 1.0, "zeta_tail: requested mean exceeds the p = 1 mean " + std::to_string(unit_mean));
  return zeta_tail(alpha, p);
}

OffspringLaw OffspringLaw::mixed_poisson(double alpha, double p, double x_m, double phi) {
  require(std::isfinite(alpha) && alpha > 1.0, "mixed_poisson: alpha must be > 1");
  require(p >= 0.0 && p <= 1.0, "mixed_poisson: p must lie in [0, 1]");
  require(std::isfinite(x_m) && x_m > 0.0, "mixed_poisson: x_m must be > 0");
  require(std::isfinite(phi) && phi > 0.0, "mixed_poisson: phi must be > 0");
  OffspringLaw law;
  law.family_ = Family::MixedPoisson;
  law.alpha_ = alpha;
  law.p_ = p;
  law.x_m_ = x_m;
  law.phi_ = phi;
  return law;
}

double OffspringLaw::mean() const {
  if (p_ == 0.0) return 0.0;
  if (family_ == Family::ZetaTail) {
    return p_ * hurwitz_zeta(alpha_, 1.0).value / table_->zeta_s;
  }
  return p_ * phi_ * x_m_ * alpha_ / (alpha_ - 1.0);
}

double OffspringLaw::survival(double x) const {
  require(x >= 0.0, "survival: x must be >= 0");
  if (p_ == 0.0) return 0.0;
  const double m = std::floor(x);
  if (family_ == Family::ZetaTail) {
    if (m < 1.0) return p_;
    return p_ * hurwitz_zeta(table_->s, m + 1.0).value / table_->zeta_s;
  }
  // P(Poisson(phi w) > m) = P(m + 1, phi w), integrated against the Pareto law of w.
  const double scale = phi_ * x_m_;
  const double centre = std::log((m + 1.0) / scale);
  const double width = 1.0 / std::sqrt(m + 1.0) + 0.25;
  const auto h = [&](double y) { return boost::math::gamma_p(m + 1.0, scale * std::exp(y)); };
  const double a = alpha_;
  const double value = pareto_log_integral(h, a, centre, width,
                                           [a](double y) { return std::exp(-a * y); });
  return p_ * value;
}

double OffspringLaw::truncated_mean(double m_in) const {
  require(m_in >= 0.0, "truncated_mean: threshold must be >= 0");
  if (p_ == 0.0) return 0.0;
  const double m = std::floor(m_in);
  if (m < 1.0) return 0.0;
  if (family_ == Family::ZetaTail) {
    const double head = hurwitz_zeta(alpha_, 1.0).value - hurwitz_zeta(alpha_, m + 1.0).value;
    return p_ * head / table_->zeta_s;
  }
  // E[X 1{X > m}] = lambda P(X >= m) = lambda P(m, lambda) for X ~ Poisson(lambda).
  const double scale = phi_ * x_m_;
  const double centre = std::log(m / scale);
  const double width = 1.0 / std::sqrt(m) + 0.25;
  const auto h = [&](double y) {
    const double lam = scale * std::exp(y);
    return lam * boost::math::gamma_p(m, lam);
  };
  const double a = alpha_;
  const double excess = pareto_log_integral(h, a, centre, width, [a, scale](double y) {
    return scale * a * std::exp((1.0 - a) * y) / (a - 1.0);
  });
  return mean() - p_ * excess;
}

std::uint64_t OffspringLaw::sample(Stream& stream) const {
  const double u = stream.uniform();
  if (u >= p_) return 0;
  if (family_ == Family::ZetaTail) return sample_zeta(stream, u / p_);
  return sample_mixed_poisson(stream);
}

std::uint64_t OffspringLaw::sample_zeta(Stream& stream, double v) const {
  const auto& cdf = table_->cdf;
  if (v < cdf.back()) {
    std::size_t k = 0;
    while (v >= cdf[k]) ++k;
    return k + 1;
  }
  // Tail beyond the table: propose floor(X) with X Pareto on [K+1, inf) of
  // density proportional to x^{-s}; accept with probability
  // k^{-s} / (c * int_k^{k+1} x^{-s} dx) <= 1.
  const double s = table_->s;
  const double lower = kTableSize + 1.0;
  for (;;) {
    const double x = lower * std::pow(stream.uniform_pos(), -1.0 / (s - 1.0));
    if (!(x < static_cast<double>(kMaxDraw))) return kMaxDraw;
    const double k = std::floor(x);
    const double cell = -std::expm1((1.0 - s) * std::log1p(1.0 / k));
    const double ratio = (s - 1.0) / (k * cell);
    if (stream.uniform() * table_->accept_scale <= ratio) return static_cast<std::uint64_t>(k);
  }
}

std::uint64_t OffspringLaw::sample_mixed_poisson(Stream& stream) const {
  const double w = x_m_ * std::pow(stream.uniform_pos(), -1.0 / alpha_);
  return sample_poisson(stream, w * phi_);
}

std::uint64_t sample_poisson(Stream& stream, double mean) {
  if (!(mean > 0.0)) return 0;
  if (mean < 12.0) {
    // Sequential inversion.
    const double u = stream.uniform();
    double pmf = std::exp(-mean);
    double cdf = pmf;
    std::uint64_t k = 0;
    while (u >= cdf && k < 1000) {
      ++k;
      pmf *= mean / static_cast<double>(k);
      cdf += pmf;
    }
    return k;
  }
  if (mean > 1e15) {
    // Normal approximation; relative error far below the count resolution.
    const double u1 = stream.uniform_pos(), u2 = stream.uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    const double x = std::min(mean + std::sqrt(mean) * z, static_cast<double>(kMaxDraw));
    return static_cast<std::uint64_t>(std::max(0.0, std::floor(x)));
  }
  // PTRS, Hormann (1993).
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = stream.uniform() - 0.5;
    const double v = stream.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(std::min(k, static_cast<double>(kMaxDraw)));
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - boost::math::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(std::min(k, static_cast<double>(kMaxDraw)));
    }
  }
}

std::string OffspringLaw::describe() const {
  std::ostringstream os;
  os << to_string(family_) << "(alpha=" << alpha_ << ", p=" << p_;
  if (family_ == Family::MixedPoisson) os << ", x_m=" << x_m_ << ", phi=" << phi_;
  os << ")";
  return os.str();
}

}  // namespace clustertail
