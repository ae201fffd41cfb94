#include <cmath>
#include <random>

#include "clustertail/error.hpp"
#include "clustertail/geometry.hpp"
#include "clustertail/lp.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace clustertail;
using testing_support::kind_of;
using testing_support::r2;

namespace {

RareEventSet box(double x0, double x1, double y0, double y1) {
  return RareEventSet::create({Box{{x0, y0}, {x1, y1}}});
}

// Ray oracle: {w s : w >= 0} meets the box iff the per-coordinate parameter
// intervals [lo_k / s_k, hi_k / s_k] intersect (s_k > 0).
bool ray_meets(const Box& b, const std::vector<double>& s) {
  double lo = 0.0, hi = 1e300;
  for (std::size_t k = 0; k < s.size(); ++k) {
    lo = std::max(lo, b.lo[k] / s[k]);
    hi = std::min(hi, b.hi[k] / s[k]);
  }
  return lo <= hi * (1 + 1e-12);
}

// Planar wedge oracle: the wedge spanned by two independent vectors meets a
// box iff a box corner lies in the wedge or one of the rays meets the box.
bool wedge_meets(const Box& b, const std::vector<double>& s1, const std::vector<double>& s2) {
  const double det = s1[0] * s2[1] - s1[1] * s2[0];
  for (double x : {b.lo[0], b.hi[0]})
    for (double y : {b.lo[1], b.hi[1]}) {
      const double w1 = (x * s2[1] - y * s2[0]) / det;
      const double w2 = (s1[0] * y - s1[1] * x) / det;
      if (w1 >= -1e-12 && w2 >= -1e-12) return true;
    }
  return ray_meets(b, s1) || ray_meets(b, s2);
}

}  // namespace

TEST_CASE("simplex solves small programs with a dual certificate") {
  // min -x - y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6: optimum at (1.6, 1.2).
  LinearProgram lp{DenseMatrix(2, 4), {4, 6}, {-1, -1, 0, 0}};
  lp.a(0, 0) = 1;
  lp.a(0, 1) = 2;
  lp.a(0, 2) = 1;
  lp.a(1, 0) = 3;
  lp.a(1, 1) = 1;
  lp.a(1, 3) = 1;
  const auto r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::kOptimal);
  CHECK(r.x[0] == doctest::Approx(1.6));
  CHECK(r.x[1] == doctest::Approx(1.2));
  CHECK(r.objective == doctest::Approx(-2.8));
  CHECK(r.duality_gap < 1e-9);
  CHECK(r.dual_infeasibility < 1e-9);

  LinearProgram infeasible{DenseMatrix(1, 1), {-1}, {0}};
  infeasible.a(0, 0) = 1;
  CHECK(solve_lp(infeasible).status == LpStatus::kInfeasible);

  LinearProgram unbounded{DenseMatrix(1, 2), {1}, {-1, 0}};
  unbounded.a(0, 0) = 1;
  unbounded.a(0, 1) = -1;
  CHECK(solve_lp(unbounded).status == LpStatus::kUnbounded);
}

TEST_CASE("polar coordinates") {
  auto p = polar({3, 1});
  CHECK(p.r == 4);
  CHECK(p.theta == std::vector<double>{0.75, 0.25});
  p = polar({0, 0});
  CHECK(p.r == 0);
  CHECK(p.theta == std::vector<double>{1, 0});
  p = polar({0, 5});
  CHECK(p.theta == std::vector<double>{0, 1});
  CHECK(kind_of([] { polar({-1, 2}); }) == ErrorKind::NegativeCoordinate);
}

TEST_CASE("rare-event set validation") {
  CHECK(kind_of([] { RareEventSet::create({}); }) == ErrorKind::EmptySet);
  CHECK(kind_of([] { box(2, 1, 0, 1); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { box(-1, 1, 0, 1); }) == ErrorKind::NegativeCoordinate);
  CHECK(kind_of([] { box(0, 1, 0, 1); }) == ErrorKind::InvalidArgument);
  const auto s = parse_set_json(R"({"boxes":[{"lo":[1,0.1],"hi":[2,0.4]}]})");
  CHECK(s.contains({1.5, 0.2}));
  CHECK(!s.contains({1.5, 0.5}));
  CHECK(kind_of([] { parse_set_json(R"({"boxes":[{"lo":[1,0.1]}]})"); }) == ErrorKind::ConfigFormat);
}

TEST_CASE("cone distance") {
  const auto& m = r2();
  const auto s1 = m.expected_cluster(0);
  auto d = cone_distance_L1({2 * s1[0], 2 * s1[1]}, IndexSet{0}, m);
  CHECK(d.distance == doctest::Approx(0.0).scale(1));
  CHECK(d.weights[0] == doctest::Approx(2.0));
  // 1-d piecewise-linear oracle: min_w |w s11| + |1 - w s12| is attained at w = 0.
  d = cone_distance_L1({0, 1}, IndexSet{0}, m);
  CHECK(d.distance == doctest::Approx(1.0));
  CHECK(d.weights[0] == doctest::Approx(0.0).scale(1));
  CHECK(cone_distance_L1({3, 4}, IndexSet(), m).distance == 7.0);
}

TEST_CASE("cone distance properties on random points") {
  const auto& m = r2();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int t = 0; t < 300; ++t) {
    const std::vector<double> x{u(rng), u(rng)};
    for (IndexSet s : nonempty_subsets(2)) {
      const double base = cone_distance_L1(x, s, m).distance;
      const double scaled = cone_distance_L1({2.5 * x[0], 2.5 * x[1]}, s, m).distance;
      CHECK(scaled == doctest::Approx(2.5 * base).epsilon(1e-8).scale(1));
      // Degenerate box at x: intersection iff zero distance.
      const auto degenerate = RareEventSet::create({Box{x, x}});
      CHECK(static_cast<bool>(set_intersects_cone(degenerate, s, m)) == (base < 1e-9));
    }
    const double d1 = cone_distance_L1(x, IndexSet{0}, m).distance;
    const double d12 = cone_distance_L1(x, IndexSet{0, 1}, m).distance;
    CHECK(d12 <= d1 + 1e-12);
  }
}

TEST_CASE("set-cone intersection on the reference model") {
  const auto& m = r2();
  const auto square = box(1, 2, 1, 2);
  CHECK(!set_intersects_cone(square, IndexSet{0}, m));
  const auto w = set_intersects_cone(square, IndexSet{0, 1}, m);
  REQUIRE(w);
  CHECK(w->weights[0] == doctest::Approx(0.675));
  CHECK(w->weights[1] == doctest::Approx(0.825));
  CHECK(w->point[0] == doctest::Approx(1.5));
  CHECK(w->point[1] == doctest::Approx(1.5));
  const auto flat = box(1, 2, 0.1, 0.4);
  const auto w1 = set_intersects_cone(flat, IndexSet{0}, m);
  REQUIRE(w1);
  CHECK(w1->weights[0] >= 0.5769);
  CHECK(w1->weights[0] <= 1.1539);
}

TEST_CASE("bounded away and j(A)") {
  const auto& m = r2();
  const auto square = box(1, 2, 1, 2);
  const auto flat = box(1, 2, 0.1, 0.4);
  auto rep = is_bounded_away(square, IndexSet{0, 1}, m);
  CHECK(rep.bounded_away);
  CHECK(rep.distance > 0.0);
  rep = is_bounded_away(flat, IndexSet{0, 1}, m);
  CHECK(!rep.bounded_away);
  CHECK(rep.blocking == std::vector<IndexSet>{IndexSet{0}});
  CHECK(is_bounded_away(flat, IndexSet{0}, m).bounded_away);
  CHECK(is_bounded_away(square, IndexSet{0}, m).bounded_away);

  auto ja = solve_jA(flat, m);
  CHECK(ja.subset == IndexSet{0});
  CHECK(ja.alpha == doctest::Approx(1.6));
  CHECK(ja.bounded_away.bounded_away);
  ja = solve_jA(square, m);
  CHECK(ja.subset == IndexSet{0, 1});
  CHECK(ja.alpha == doctest::Approx(2.8));
  CHECK(ja.bounded_away.bounded_away);

  const auto one = ModelConfig::create({{OffspringLaw::zeta_tail_with_mean(2.0, 0.5)}});
  CHECK(solve_jA(RareEventSet::create({Box{{3}, {4}}}), one).subset == IndexSet{0});
}

TEST_CASE("geometry errors") {
  const auto& m = r2();
  // Points in the quadrant outside the cone of both expected clusters.
  const auto below = RareEventSet::create({Box{{10, 0}, {11, 0.1}}});
  CHECK(kind_of([&] { solve_jA(below, m); }) == ErrorKind::NoConeIntersects);
  // Equal alpha* for both dimensions makes the singletons tie.
  LawMatrix laws = reference_r2_laws();
  laws[0][0] = OffspringLaw::zeta_tail_with_mean(2.2, 0.4);
  laws[1][1] = OffspringLaw::zeta_tail_with_mean(2.2 + 1e-13, 0.35);
  const auto tied = ModelConfig::create(laws, Strictness::kRelaxed);
  const auto both = RareEventSet::create({Box{{1, 0.1}, {2, 0.4}}, Box{{0.3, 1}, {0.5, 2}}});
  CHECK(kind_of([&] { solve_jA(both, tied); }) == ErrorKind::NonUniqueArgmin);
}

TEST_CASE("j(A) against planar oracles on random models and boxes") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    LawMatrix laws(2);
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i)
        laws[j].push_back(OffspringLaw::zeta_tail_with_mean(1.2 + 3.0 * u(rng) + 0.001 * (2 * j + i), 0.05 + 0.35 * u(rng)));
    if (!assess(laws).ok()) continue;
    const auto m = ModelConfig::create(laws);
    const double x0 = 3 * u(rng), y0 = 3 * u(rng);
    const Box b{{x0, y0}, {x0 + 0.05 + u(rng), y0 + 0.05 + u(rng)}};
    const auto set = RareEventSet::create({b});
    const auto s1 = m.expected_cluster(0), s2 = m.expected_cluster(1);
    const bool m1 = ray_meets(b, s1), m2 = ray_meets(b, s2), m12 = wedge_meets(b, s1, s2);
    CHECK(static_cast<bool>(set_intersects_cone(set, IndexSet{0}, m)) == m1);
    CHECK(static_cast<bool>(set_intersects_cone(set, IndexSet{1}, m)) == m2);
    CHECK(static_cast<bool>(set_intersects_cone(set, IndexSet{0, 1}, m)) == m12);
    if (!m12) {
      CHECK(kind_of([&] { solve_jA(set, m); }) == ErrorKind::NoConeIntersects);
      continue;
    }
    IndexSet expect;
    double best = 1e300;
    if (m1 && m.alpha_of(IndexSet{0}) < best) best = m.alpha_of(expect = IndexSet{0});
    if (m2 && m.alpha_of(IndexSet{1}) < best) best = m.alpha_of(expect = IndexSet{1});
    if (m12 && m.alpha_of(IndexSet{0, 1}) < best) best = m.alpha_of(expect = IndexSet{0, 1});
    CHECK(solve_jA(set, m).subset == expect);
    ++checked;
  }
  CHECK(checked > 300);
}
