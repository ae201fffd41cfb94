#include "clustertail/simulate.hpp"

#include "clustertail/error.hpp"

namespace clustertail {

namespace {

void check_root(const ModelConfig& config, int root) {
  if (root < 0 || root >= config.dim()) {
    throw Error(ErrorKind::InvalidArgument, "root dimension out of range");
  }
}

// Per-thread tally reused across samples.
GrowthTally& scratch_tally(int d) {
  thread_local GrowthTally tally;
  if (static_cast<int>(tally.totals.size()) != d) {
    tally = GrowthTally(d);
  } else {
    tally.reset();
  }
  return tally;
}

}  // namespace

ClusterSample sample_cluster(const ModelConfig& config, int root, const SampleKey& key,
                             std::uint64_t node_cap) {
  check_root(config, root);
  const StreamSource source(config, key.seed, key.lane);
  GrowthTally& tally = scratch_tally(config.dim());
  std::uint64_t nodes = 0;
  const Group start{root_key(key.index), root, 1};
  const bool ok = grow(source, std::span<const Group>(&start, 1), kNoThreshold, node_cap, nodes, tally, nullptr);
  ClusterSample out;
  out.root = root;
  out.totals = tally.totals;
  if (!ok) out.censored = Censoring::kNodeCap;
  return out;
}

PrunedSample sample_pruned(const ModelConfig& config, int root, double threshold, const SampleKey& key,
                           std::uint64_t node_cap) {
  check_root(config, root);
  if (!(threshold > 0.0)) throw Error(ErrorKind::InvalidArgument, "pruning threshold must be > 0");
  const StreamSource source(config, key.seed, key.lane);
  GrowthTally& tally = scratch_tally(config.dim());
  std::uint64_t nodes = 0;
  const Group start{root_key(key.index), root, 1};
  const bool ok = grow(source, std::span<const Group>(&start, 1), threshold, node_cap, nodes, tally, nullptr);
  PrunedSample out;
  out.root = root;
  out.threshold = threshold;
  out.totals = tally.totals;
  out.W = tally.W;
  out.N = tally.N;
  out.pairN = tally.pairN;
  if (!ok) out.censored = Censoring::kNodeCap;
  return out;
}

Decomposition sample_decomposition(const ModelConfig& config, int root, const SampleKey& key,
                                   const DecompositionParams& params) {
  check_root(config, root);
  if (!(params.n > 0.0)) throw Error(ErrorKind::InvalidArgument, "decomposition: n must be > 0");
  if (!(params.delta > 0.0 && params.delta < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "decomposition: delta must lie in (0, 1)");
  }
  const StreamSource source(config, key.seed, key.lane);
  return decompose(source, root, root_key(key.index), params);
}

std::vector<double> hat_S(const Decomposition& dec, const ModelConfig& config) {
  const int d = config.dim();
  std::vector<double> out(d, 0.0);
  for (std::size_t k = 1; k < dec.tau.size(); ++k) {
    for (int i = 0; i < d; ++i) {
      if (dec.tau[k][i] == 0) continue;
      const double w = static_cast<double>(dec.tau[k][i]) / dec.n;
      for (int c = 0; c < d; ++c) out[c] += w * config.sbar(i, c);
    }
  }
  return out;
}

}  // namespace clustertail
