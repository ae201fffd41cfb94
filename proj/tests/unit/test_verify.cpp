#include <cmath>
#include <random>

#include "clustertail/stats.hpp"
#include "clustertail/verify.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace clustertail;
using testing_support::kind_of;
using testing_support::null_model;
using testing_support::r2;

namespace {

std::vector<double> pareto_sample(double alpha, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& x : out) x = std::pow(1.0 - u(rng), -1.0 / alpha);
  return out;
}

RareEventSet flat() { return RareEventSet::create({Box{{1, 0.1}, {2, 0.4}}}); }

}  // namespace

TEST_CASE("moments merge like a single stream") {
  Moments all, left, right;
  for (int k = 1; k <= 100; ++k) {
    all.add(k);
    (k <= 37 ? left : right).add(k);
  }
  left.merge(right);
  CHECK(left.n == all.n);
  CHECK(left.mean() == doctest::Approx(50.5));
  CHECK(left.variance() == doctest::Approx(all.variance()));
  CHECK(all.variance() == doctest::Approx(841.6666667));
  CHECK(Moments{}.std_error() == 0.0);
}

TEST_CASE("z scores and proportions") {
  CHECK(z_score(1.0, 0.0, 1.0, 0.0) == 0.0);
  CHECK(std::isinf(z_score(1.0, 0.0, 2.0, 0.0)));
  CHECK(z_score(3.0, 0.3, 1.0, 0.4) == doctest::Approx(4.0));
  const auto p = proportion(25, 100);
  CHECK(p.p == 0.25);
  CHECK(p.se == doctest::Approx(std::sqrt(0.25 * 0.75 / 100)));
  CHECK(proportion(0, 0).p == 0.0);
}

TEST_CASE("line fits") {
  const auto f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope_se == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f.points == 4);
  // Noisy points against the closed-form standard error.
  const std::vector<double> x{1, 2, 3, 4, 5}, y{1.1, 1.9, 3.2, 3.8, 5.0};
  const auto g = fit_line(x, y);
  double sse = 0.0;
  for (int k = 0; k < 5; ++k) sse += std::pow(y[k] - g.intercept - g.slope * x[k], 2);
  CHECK(g.slope == doctest::Approx(0.97));
  CHECK(g.slope_se == doctest::Approx(std::sqrt(sse / 3.0 / 10.0)));
}

TEST_CASE("slope fits are invariant to rescaling n") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> lx, ly, shifted;
    for (double n : {8.0, 16.0, 32.0, 64.0}) {
      lx.push_back(std::log(n));
      shifted.push_back(std::log(n * 4.0));
      ly.push_back(-1.6 * std::log(n) + 0.1 * u(rng));
    }
    const auto a = fit_line(lx, ly), b = fit_line(shifted, ly);
    CHECK(a.slope == doctest::Approx(b.slope).epsilon(1e-12));
    CHECK(a.slope_se == doctest::Approx(b.slope_se).epsilon(1e-12));
  }
}

TEST_CASE("hill estimator on exact Pareto samples") {
  CHECK(hill_estimate(pareto_sample(2.0, 1000000, 11), 10000) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(hill_estimate(pareto_sample(1.6, 1000000, 12), 10000) == doctest::Approx(1.6).epsilon(0.0625));
  CHECK(kind_of([] { hill_estimate(std::vector<double>(1000, 3.0), 100); }) == ErrorKind::TooFewSamples);
  CHECK(kind_of([] { hill_estimate(pareto_sample(2.0, 100, 1), 9); }) == ErrorKind::TooFewSamples);
  CHECK(kind_of([] { hill_estimate(pareto_sample(2.0, 100, 1), 100); }) == ErrorKind::TooFewSamples);
}

TEST_CASE("sweep rows are well formed") {
  const auto& m = r2();
  const RunOptions opts{7, 2, kDefaultNodeCap};
  const auto s = sweep_probability(m, 0, flat(), {4, 8, 16, 32}, 200000, opts);
  CHECK(s.subset == IndexSet{0});
  CHECK(s.target_alpha == doctest::Approx(1.6));
  CHECK(s.bounded_away);
  REQUIRE(s.rows.size() == 4);
  for (const auto& r : s.rows) {
    CHECK(r.hits <= r.samples);
    CHECK(r.p_hat == static_cast<double>(r.hits) / static_cast<double>(r.samples));
    CHECK(r.se == proportion(r.hits, r.samples).se);
    CHECK(r.lambda == doctest::Approx(m.rate_lambda(IndexSet{0}, r.n)));
    if (r.lambda > 0) CHECK(r.ratio == doctest::Approx(r.p_hat / r.lambda));
  }
  CHECK(s.fit.points == 4);
  CHECK(!s.insufficient_hits);
  // Same seed, other thread count: identical rows.
  const auto t = sweep_probability(m, 0, flat(), {4, 8, 16, 32}, 200000, RunOptions{7, 1, kDefaultNodeCap});
  for (std::size_t k = 0; k < 4; ++k) CHECK(t.rows[k].hits == s.rows[k].hits);
}

TEST_CASE("sweep preconditions") {
  const auto& m = r2();
  const RunOptions opts{1, 1, kDefaultNodeCap};
  CHECK(kind_of([&] { sweep_probability(m, 0, flat(), {2, 4}, 10, opts); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { sweep_probability(m, 0, flat(), {4, 2, 8}, 10, opts); }) == ErrorKind::InvalidArgument);
  const auto null = null_model(2);
  const auto away = sweep_membership(null, 0, [](const std::vector<double>& x) { return x[0] > 0.5; },
                                     {2, 4, 8}, 1000, opts);
  CHECK(away.insufficient_hits);
  for (const auto& r : away.rows) CHECK(r.hits == 0);
}

TEST_CASE("identities on a p=0 model are exactly 0 = 0") {
  const auto null = null_model(2);
  const RunOptions opts{1, 2, kDefaultNodeCap};
  const auto rep = check_identities(null, {5, 20}, 2000, opts);
  CHECK(rep.all_pass());
  for (const auto& c : rep.checks) {
    CHECK(std::isfinite(c.z));
    if (c.name.rfind("mean", 0) != 0) continue;
    CHECK(c.se == 0.0);
  }
  const auto pruned = check_pruned_identity(null, {20}, 2000, opts);
  CHECK(pruned.checks.size() == 8);
  for (const auto& c : pruned.checks) {
    CHECK(c.lhs == 0.0);
    CHECK(c.rhs == 0.0);
    CHECK(c.z == 0.0);
  }
}

TEST_CASE("identities hold on the reference model at small scale") {
  const RunOptions opts{2, 2, kDefaultNodeCap};
  CHECK(check_mean_identity(r2(), 100000, opts).all_pass());
  CHECK(check_pruned_identity(r2(), {5}, 100000, opts).all_pass());
}

TEST_CASE("concentration on a p=0 model never deviates") {
  const auto rep = check_concentration(null_model(2), 0, {0.05}, {10, 100}, 100, 0.25, RunOptions{1, 1, kDefaultNodeCap});
  for (const auto& r : rep.rows) CHECK(r.exceed == 0);
}

TEST_CASE("type frequencies on a p=0 model have no hits") {
  const auto rep = check_type_frequencies(null_model(2), 0, flat(), 8, 0.1, 1000, RunOptions{1, 1, kDefaultNodeCap});
  CHECK(rep.hits == 0);
  CHECK(rep.insufficient_hits);
}

TEST_CASE("counterexample preconditions") {
  const RunOptions opts{1, 1, kDefaultNodeCap};
  CHECK(kind_of([&] { counterexample_experiment(r2(), 1.0, {2, 4, 8}, 100, opts); }) ==
        ErrorKind::PreconditionViolation);
  auto laws = counterexample_laws();
  laws[0][1] = OffspringLaw::zeta_tail(5.0, 1.0);  // B_{2<-1} never zero
  const auto never_zero = ModelConfig::create(laws);
  CHECK(kind_of([&] { counterexample_experiment(never_zero, 1.0, {2, 4, 8}, 100, opts); }) ==
        ErrorKind::PreconditionViolation);
  const auto ce = ModelConfig::create(counterexample_laws());
  const auto far = counterexample_experiment(ce, 1e12, {2, 4, 8}, 1000, opts);
  CHECK(far.sweep.insufficient_hits);
  CHECK(far.naive_alpha == doctest::Approx(5.0));
  CHECK(far.lower_bound_alpha == doctest::Approx(4.4));
}
