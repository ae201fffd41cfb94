#include <cmath>
#include <random>
#include <set>

#include "clustertail/measures.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace clustertail;
using testing_support::kind_of;
using testing_support::r2;

namespace {

// Brute-force oracle: every 0/1 matrix with rows over J (one row per depth up
// to |J|) satisfying the type constraints.
std::set<std::string> brute_force_types(IndexSet j) {
  std::set<std::string> out;
  const int n = j.size();
  const std::vector<int> el = j.elements();
  // Assign each member a depth in 1..n; keep assignments whose used depths
  // form a prefix and whose first depth holds exactly one member.
  std::vector<int> depth(n, 1);
  for (;;) {
    int maxd = 0;
    for (int x : depth) maxd = std::max(maxd, x);
    std::vector<IndexSet> rows(maxd);
    for (int q = 0; q < n; ++q) rows[depth[q] - 1].insert(el[q]);
    bool ok = rows[0].size() == 1;
    for (const auto& r : rows) ok = ok && !r.empty();
    if (ok) out.insert(GeneralizedType{rows}.to_string());
    int q = 0;
    while (q < n && ++depth[q] > n) depth[q++] = 1;
    if (q == n) break;
  }
  return out;
}

RareEventSet flat() { return RareEventSet::create({Box{{1, 0.1}, {2, 0.4}}}); }
RareEventSet scaled_flat(double a) { return RareEventSet::create({Box{{a, 0.1 * a}, {2 * a, 0.4 * a}}}); }

// Closed form of C^({1})(A) for a box meeting the ray of sbar_1 in weights [w_lo, w_hi].
double ray_closed_form(double a) {
  const auto& m = r2();
  const double w_lo = std::max(a / m.sbar(0, 0), 0.1 * a / m.sbar(0, 1));
  const double w_hi = std::min(2 * a / m.sbar(0, 0), 0.4 * a / m.sbar(0, 1));
  return std::pow(w_lo, -1.6) - std::pow(w_hi, -1.6);
}

}  // namespace

TEST_CASE("type enumeration counts and order") {
  CHECK(enumerate_types(IndexSet{0}, 2).size() == 1);
  const auto two = enumerate_types(IndexSet{0, 1}, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0].to_string() == "({1},{2})");
  CHECK(two[1].to_string() == "({2},{1})");
  CHECK(enumerate_types(IndexSet{0, 1, 2}, 3).size() == 9);
  CHECK(kind_of([] { enumerate_types(IndexSet(), 2); }) == ErrorKind::EmptySet);
  for (int d = 1; d <= 4; ++d) {
    for (IndexSet j : nonempty_subsets(d)) {
      const auto types = enumerate_types(j, d);
      std::set<std::string> got;
      for (const auto& t : types) {
        CHECK(t.is_jump_type());
        CHECK(t.active() == j);
        got.insert(t.to_string());
      }
      CHECK(got.size() == types.size());
      CHECK(got == brute_force_types(j));
      CHECK(std::is_sorted(types.begin(), types.end()));
    }
  }
}

TEST_CASE("assignment enumeration") {
  CHECK(enumerate_assignments(IndexSet{0, 1}, IndexSet{0, 1, 2}).size() == 8);
  const auto empty = enumerate_assignments(IndexSet{0, 1}, IndexSet());
  REQUIRE(empty.size() == 1);
  CHECK(empty[0] == std::vector<IndexSet>{IndexSet(), IndexSet()});
  const auto single = enumerate_assignments(IndexSet{0}, IndexSet{0, 1});
  REQUIRE(single.size() == 1);
  CHECK(single[0][0] == IndexSet{0, 1});
  for (int a = 1; a <= 4; ++a) {
    for (int b = 0; b <= 4; ++b) {
      const IndexSet src = IndexSet::full(a);
      const IndexSet tgt(IndexSet::full(b).mask() << 4);
      const auto all = enumerate_assignments(src, tgt);
      CHECK(all.size() == static_cast<std::size_t>(std::pow(a, b)));
      for (const auto& parts : all) {
        IndexSet u;
        for (IndexSet p : parts) {
          CHECK(p.disjoint(u));
          u = u | p;
        }
        CHECK(u == tgt);
      }
    }
  }
}

TEST_CASE("g values") {
  const auto& m = r2();
  CHECK(g_value(IndexSet{0}, IndexSet(), {2.0}, m) == 1.0);
  CHECK(g_value(IndexSet{0}, IndexSet{1}, {3.0}, m) == doctest::Approx(0.8).epsilon(1e-12));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int t = 0; t < 200; ++t) {
    for (IndexSet src : nonempty_subsets(2)) {
      for (IndexSet tgt : {IndexSet(), IndexSet{0}, IndexSet{1}, IndexSet{0, 1}}) {
        std::vector<double> w(src.size());
        for (auto& x : w) x = u(rng);
        const double g = g_value(src, tgt, w, m);
        // Factorised oracle: prod_{j in J} sum_{i in I} w_i sbar_{i, l*(j)}.
        double f = 1.0;
        for (int j : tgt.elements()) {
          double s = 0.0;
          const auto el = src.elements();
          for (std::size_t p = 0; p < el.size(); ++p) s += w[p] * m.sbar(el[p], m.l_star(j));
          f *= s;
        }
        CHECK(g == doctest::Approx(f).epsilon(1e-12));
        std::vector<double> w2(w);
        for (auto& x : w2) x *= 2.0;
        CHECK(g_value(src, tgt, w2, m) == doctest::Approx(g * std::pow(2.0, tgt.size())).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("tilde alpha") {
  const auto& m = r2();
  CHECK(tilde_alpha(GeneralizedType{}, m) == 0.0);
  CHECK(tilde_alpha(GeneralizedType{{IndexSet{0}, IndexSet{1}}}, m) == doctest::Approx(2.8));
  const GeneralizedType twice{{IndexSet{0}, IndexSet{0}}};
  CHECK(!twice.is_jump_type());
  CHECK(tilde_alpha(twice, m) == doctest::Approx(2.2));
  CHECK(tilde_alpha(twice, m) > m.alpha_of(IndexSet{0}));
  for (IndexSet j : nonempty_subsets(2))
    for (const auto& t : enumerate_types(j, 2)) CHECK(tilde_alpha(t, m) == m.alpha_of(j));
}

TEST_CASE("delta bar") {
  const auto& m = r2();
  const auto bar = delta_bar(flat(), IndexSet{0}, m);
  REQUIRE(bar);
  CHECK(*bar == doctest::Approx(1.0 / 1.7333333).epsilon(1e-6));
  CHECK(*delta_bar(scaled_flat(3.0), IndexSet{0}, m) == doctest::Approx(3.0 * *bar).epsilon(1e-9));
  CHECK(!delta_bar(RareEventSet::create({Box{{1, 1}, {2, 2}}}), IndexSet{0}, m));
}

TEST_CASE("ray-case measure against the closed form") {
  const auto& m = r2();
  const double exact = ray_closed_form(1.0);
  CHECK(exact == doctest::Approx(1.6161).epsilon(1e-3));
  const JumpType t{{IndexSet{0}}};
  const double bar = *delta_bar(flat(), IndexSet{0}, m);
  const auto est = estimate_CI(t, flat(), m, bar / 2, 200000, MeasureStream{1, 0, 2});
  CHECK(std::fabs(est.value - exact) <= 3 * est.std_error);
  CHECK(!est.delta_above_bar);
  const auto total = estimate_C_total(IndexSet{0}, flat(), m, 0.0, 200000, MeasureStream{1, 0, 2});
  CHECK(total.delta == doctest::Approx(bar / 2));
  CHECK(std::fabs(total.total[0] - m.sbar(0, 0) * exact) <= 3 * total.total_se[0]);
  CHECK(m.sbar(0, 0) * exact == doctest::Approx(2.8013).epsilon(1e-3));
}

TEST_CASE("measure estimator edge cases") {
  const auto& m = r2();
  const JumpType t{{IndexSet{0}}};
  const auto square = RareEventSet::create({Box{{1, 1}, {2, 2}}});
  const auto miss = estimate_CI(t, square, m, 0.1, 10000, MeasureStream{1, 0, 1});
  CHECK(miss.value == 0.0);
  CHECK(miss.std_error == 0.0);
  CHECK(kind_of([&] { estimate_CI(t, flat(), m, 0.0, 10, MeasureStream{}); }) == ErrorKind::ZeroDelta);
  CHECK(kind_of([&] { estimate_CI(JumpType{}, flat(), m, 0.1, 10, MeasureStream{}); }) == ErrorKind::DepthZeroType);
  const auto none = estimate_C_total(IndexSet{0}, square, m, 0.0, 1000, MeasureStream{});
  CHECK(none.total == std::vector<double>{0.0, 0.0});
  const auto both = estimate_C_total(IndexSet{0, 1}, square, m, 0.0, 20000, MeasureStream{3, 0, 1});
  CHECK(both.per_type.size() == 2);
  CHECK(both.total[0] > 0.0);
}

TEST_CASE("measure estimates are thread-count invariant") {
  const auto& m = r2();
  const auto square = RareEventSet::create({Box{{1, 1}, {2, 2}}});
  const auto a = estimate_C_total(IndexSet{0, 1}, square, m, 0.0, 30000, MeasureStream{4, 0, 1});
  const auto b = estimate_C_total(IndexSet{0, 1}, square, m, 0.0, 30000, MeasureStream{4, 0, 3});
  CHECK(a.total == b.total);
  CHECK(a.total_se == b.total_se);
}
