#include <cmath>
#include <set>

#include <boost/math/special_functions/zeta.hpp>

#include "clustertail/index_set.hpp"
#include "clustertail/linalg.hpp"
#include "clustertail/random.hpp"
#include "clustertail/special.hpp"
#include "doctest.h"

using namespace clustertail;

TEST_CASE("philox known-answer vectors") {
  auto z = philox4x32_10({0, 0, 0, 0}, {0, 0});
  CHECK(z == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  auto f = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(f == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  auto p = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  CHECK(p == std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and distinct per key") {
  Stream a(StreamKey{7, 3, 0}), b(StreamKey{7, 3, 0}), c(StreamKey{7, 3, 1}), e(StreamKey{7, 4, 0});
  std::set<std::uint64_t> seen;
  for (int k = 0; k < 100; ++k) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    seen.insert(x);
    seen.insert(c.next_u64());
    seen.insert(e.next_u64());
  }
  CHECK(seen.size() == 300);
}

TEST_CASE("uniforms lie in their ranges and have mean one half") {
  Stream s(StreamKey{1, 2, 3});
  double sum = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double u = s.uniform();
    const double v = s.uniform_pos();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(v > 0.0);
    REQUIRE(v <= 1.0);
    sum += u;
  }
  CHECK(std::fabs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("hurwitz zeta against the Riemann zeta oracle") {
  for (double s : {1.6, 2.2, 2.6, 3.2, 4.4, 6.4}) {
    const auto z = hurwitz_zeta(s, 1.0);
    CHECK(z.value == doctest::Approx(boost::math::zeta(s)).epsilon(1e-13));
    CHECK(z.error_bound <= 1e-12);
    // Shifted sums: zeta(s) minus the first terms.
    for (int first : {2, 11, 40, 1000}) {
      double head = 0.0;
      for (int k = 1; k < first; ++k) head += std::pow(k, -s);
      CHECK(hurwitz_zeta(s, first).value == doctest::Approx(boost::math::zeta(s) - head).epsilon(1e-9));
    }
  }
}

TEST_CASE("hurwitz zeta far tail against brute-force summation") {
  // sum_{k >= 10^4} k^{-2.6}: brute force to 10^7 plus the integral tail.
  long double acc = 0.0L;
  for (long k = 10000000; k >= 10000; --k) acc += std::pow(static_cast<long double>(k), -2.6L);
  const long double tail = std::pow(1e7L + 0.5L, -1.6L) / 1.6L;
  CHECK(hurwitz_zeta(2.6, 1e4).value == doctest::Approx(static_cast<double>(acc + tail)).epsilon(1e-10));
}

TEST_CASE("index sets") {
  IndexSet s{0, 2};
  CHECK(s.size() == 2);
  CHECK(s.contains(2));
  CHECK(!s.contains(1));
  CHECK(s.to_string() == "{1,3}");
  CHECK(IndexSet{0}.subset_of(s));
  CHECK(IndexSet{1}.disjoint(s));
  CHECK(nonempty_subsets(3).size() == 7);
  CHECK(IndexSet().to_string() == "{}");
}

TEST_CASE("dense inverse and spectral radius") {
  DenseMatrix a(2, 2);
  a(0, 0) = 0.6;
  a(0, 1) = -0.15;
  a(1, 0) = -0.1;
  a(1, 1) = 0.65;
  const auto inv = inverse(a);
  REQUIRE(inv);
  // 2x2 closed form.
  const double det = 0.6 * 0.65 - 0.15 * 0.1;
  CHECK((*inv)(0, 0) == doctest::Approx(0.65 / det));
  CHECK((*inv)(0, 1) == doctest::Approx(0.15 / det));
  CHECK((*inv)(1, 0) == doctest::Approx(0.1 / det));
  CHECK((*inv)(1, 1) == doctest::Approx(0.6 / det));

  DenseMatrix b(2, 2);
  b(0, 0) = 0.4;
  b(0, 1) = 0.15;
  b(1, 0) = 0.1;
  b(1, 1) = 0.35;
  // Eigenvalues of a 2x2 matrix: (tr +- sqrt(tr^2 - 4 det)) / 2.
  const double tr = 0.75, dt = 0.4 * 0.35 - 0.015;
  const auto rho = spectral_radius(b);
  CHECK(rho.converged);
  CHECK(rho.value == doctest::Approx((tr + std::sqrt(tr * tr - 4 * dt)) / 2).epsilon(1e-10));

  DenseMatrix singular(2, 2, 1.0);
  CHECK(!inverse(singular));
}
