#include <cmath>
#include <map>

#include "clustertail/parallel.hpp"
#include "clustertail/simulate.hpp"
#include "clustertail/stats.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace clustertail;
using testing_support::r2;

namespace {

// Draws scripted per node id; unscripted nodes have no children.
struct ScriptedSource {
  int d = 2;
  std::map<std::uint64_t, std::vector<std::uint64_t>> script;

  int dim() const { return d; }
  void draws(std::uint64_t node, int, std::uint64_t* out) const {
    auto it = script.find(node);
    for (int i = 0; i < d; ++i) out[i] = it == script.end() ? 0 : it->second[i];
  }
};

bool leq(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("null model clusters are the root alone") {
  const auto m = testing_support::null_model(3);
  for (std::uint64_t s = 0; s < 100; ++s) {
    for (int root = 0; root < 3; ++root) {
      const auto c = sample_cluster(m, root, SampleKey{1, s, 0});
      std::vector<std::uint64_t> e(3, 0);
      e[root] = 1;
      CHECK(c.totals == e);
      const auto p = sample_pruned(m, root, 3.0, SampleKey{1, s, 0});
      CHECK(p.totals == e);
      CHECK(p.W == std::vector<std::uint64_t>(3, 0));
      CHECK(p.N == std::vector<std::uint64_t>(3, 0));
    }
  }
}

TEST_CASE("node cap censors on the first birth") {
  const auto& m = r2();
  int births = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto full = sample_cluster(m, 0, SampleKey{3, s, 0});
    const auto capped = sample_cluster(m, 0, SampleKey{3, s, 0}, 1);
    const bool born = full.totals[0] + full.totals[1] > 1;
    births += born;
    CHECK((capped.censored == Censoring::kNodeCap) == born);
  }
  CHECK(births > 0);
}

TEST_CASE("cluster means match the expected clusters") {
  const auto& m = r2();
  for (int root = 0; root < 2; ++root) {
    std::vector<Moments> mom(2);
    for (std::uint64_t s = 0; s < 200000; ++s) {
      const auto c = sample_cluster(m, root, SampleKey{77, s, 0});
      for (int i = 0; i < 2; ++i) mom[i].add(static_cast<double>(c.totals[i]));
    }
    for (int i = 0; i < 2; ++i) CHECK(std::fabs(mom[i].mean() - m.sbar(root, i)) <= 4 * mom[i].std_error());
  }
}

TEST_CASE("threshold below the support prunes every nonzero draw of the root") {
  const auto& m = r2();
  for (std::uint64_t s = 0; s < 2000; ++s) {
    const auto p = sample_pruned(m, 1, 0.5, SampleKey{5, s, 0});
    CHECK(p.totals == std::vector<std::uint64_t>{0, 1});
    const auto full = sample_cluster(m, 1, SampleKey{5, s, 0});
    // The root's own draws are exactly the pruned masses.
    for (int i = 0; i < 2; ++i) {
      CHECK(p.N[i] == (p.W[i] > 0 ? 1u : 0u));
      CHECK(p.pairN[i][1] == p.N[i]);
    }
    CHECK(full.totals[0] + full.totals[1] >= 1 + p.W[0] + p.W[1]);
  }
}

TEST_CASE("pruned counters satisfy W > 0 iff N >= 1 iff W > M") {
  const auto& m = r2();
  for (double threshold : {1.0, 5.0, 20.0}) {
    for (std::uint64_t s = 0; s < 20000; ++s) {
      const auto p = sample_pruned(m, static_cast<int>(s % 2), threshold, SampleKey{9, s, 0});
      for (int i = 0; i < 2; ++i) {
        const bool w = p.W[i] > 0, n = p.N[i] >= 1, big = static_cast<double>(p.W[i]) > threshold;
        CHECK(w == n);
        CHECK(w == big);
        CHECK(p.N[i] == p.pairN[i][0] + p.pairN[i][1]);
      }
    }
  }
}

TEST_CASE("replayed draw tape gives coupled monotone totals") {
  const auto& m = r2();
  for (std::uint64_t s = 0; s < 2000; ++s) {
    const StreamSource source(m, 21, 0);
    DrawTape<StreamSource> tape(source);
    GrowthTally full(2), mid(2), low(2);
    std::uint64_t nodes = 0;
    const int root = static_cast<int>(s % 2);
    const std::vector<Group> roots{Group{root_key(s), root, 1}};
    grow(tape, roots, kNoThreshold, kDefaultNodeCap, nodes, full, nullptr);
    tape.set_replay_only(true);
    nodes = 0;
    grow(tape, roots, 20.0, kDefaultNodeCap, nodes, mid, nullptr);
    nodes = 0;
    grow(tape, roots, 5.0, kDefaultNodeCap, nodes, low, nullptr);
    CHECK(leq(low.totals, mid.totals));
    CHECK(leq(mid.totals, full.totals));
    // The tape and the live stream agree.
    CHECK(full.totals == sample_cluster(m, root, SampleKey{21, s, 0}).totals);
    CHECK(low.totals == sample_pruned(m, root, 5.0, SampleKey{21, s, 0}).totals);
  }
}

TEST_CASE("decomposition without big jumps has depth 0") {
  ScriptedSource src;
  const std::uint64_t parent = root_key(0);
  src.script[child_node_id(parent, 0, 0)] = {1, 0};
  DecompositionParams p;
  p.n = 16;
  p.delta = 0.1;
  const auto dec = decompose(src, 0, parent, p);
  CHECK(dec.depth == 0);
  CHECK(dec.gtype.rows.empty());
  CHECK(dec.reconstructed == std::vector<std::uint64_t>{2, 0});
  CHECK(dec.pieces.size() == 1);
  CHECK(dec.pieces[0][0] == dec.reconstructed);
}

TEST_CASE("single big jump bookkeeping") {
  ScriptedSource src;
  const std::uint64_t parent = root_key(4);
  const std::uint64_t root = child_node_id(parent, 0, 0);
  src.script[root] = {0, 20};
  DecompositionParams p;
  p.n = 16;
  p.delta = 0.1;
  const auto dec = decompose(src, 0, parent, p);
  CHECK(dec.depth == 1);
  REQUIRE(dec.gtype.rows.size() == 1);
  CHECK(dec.gtype.rows[0] == IndexSet{1});
  CHECK(dec.tau[1] == std::vector<std::uint64_t>{0, 20});
  CHECK(dec.tau[1][1] > p.n * p.delta);
  CHECK(dec.thresholds[1][1] == doctest::Approx(2.0));
  CHECK(dec.reconstructed == std::vector<std::uint64_t>{1, 20});
}

TEST_CASE("decomposition reconstructs the coupled cluster exactly") {
  const auto& m = r2();
  DecompositionParams p;
  p.n = 16;
  p.delta = 0.1;
  int deep = 0;
  for (std::uint64_t s = 0; s < 20000; ++s) {
    const int root = static_cast<int>(s % 2);
    const auto dec = sample_decomposition(m, root, SampleKey{31, s, 0}, p);
    REQUIRE(dec.censored == Censoring::kNone);
    const auto direct = sample_cluster(m, root, SampleKey{31, s, 0});
    CHECK(dec.reconstructed == direct.totals);
    std::vector<std::uint64_t> sum(2, 0);
    for (const auto& step : dec.pieces)
      for (const auto& piece : step)
        for (int i = 0; i < 2; ++i) sum[i] += piece[i];
    CHECK(sum == dec.reconstructed);
    CHECK(dec.reconstructed[root] >= 1);
    for (int k = 1; k < static_cast<int>(dec.tau.size()); ++k)
      for (int i = 0; i < 2; ++i)
        if (dec.tau[k][i] > 0) CHECK(static_cast<double>(dec.tau[k][i]) > p.n * std::pow(p.delta, k));
    CHECK(dec.tau.size() == static_cast<std::size_t>(dec.depth + 2));
    deep += dec.depth >= 2;
  }
  CHECK(deep > 0);
}

TEST_CASE("hat S") {
  const auto& m = r2();
  Decomposition dec;
  dec.n = 10;
  dec.tau = {{1, 0}, {0, 0}};
  CHECK(hat_S(dec, m) == std::vector<double>{0, 0});
  dec.tau = {{1, 0}, {5, 0}, {0, 0}};
  auto h = hat_S(dec, m);
  CHECK(h[0] == doctest::Approx(0.86667).epsilon(1e-4));
  CHECK(h[1] == doctest::Approx(0.13333).epsilon(1e-4));
  dec.tau = {{1, 0}, {5, 0}, {0, 10}, {0, 0}};
  h = hat_S(dec, m);
  CHECK(h[0] == doctest::Approx(1.26667).epsilon(1e-4));
  CHECK(h[1] == doctest::Approx(1.73333).epsilon(1e-4));
}

TEST_CASE("parallel reduction is independent of the thread count") {
  const auto& m = r2();
  auto run = [&](int threads) {
    return parallel_reduce(
        30000, threads, Moments{},
        [&](std::uint64_t b, std::uint64_t e, Moments& acc) {
          for (std::uint64_t s = b; s < e; ++s) acc.add(static_cast<double>(sample_cluster(m, 0, SampleKey{8, s, 0}).totals[0]));
        },
        [](Moments& a, const Moments& b) { a.merge(b); });
  };
  const Moments one = run(1), four = run(4), seven = run(7);
  CHECK(one.sum == four.sum);
  CHECK(one.sumsq == seven.sumsq);
  CHECK(one.n == 30000);
}
