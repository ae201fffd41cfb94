#pragma once

#include <cstdint>
#include <vector>

#include "clustertail/engine.hpp"
#include "clustertail/jump_type.hpp"
#include "clustertail/model.hpp"

namespace clustertail {

inline constexpr std::uint64_t kDefaultNodeCap = 10'000'000;
inline constexpr int kDefaultDepthCap = 64;

// Which random numbers a sample uses. Lane 0 carries the cluster topology;
// other lanes give independent replicas with the same sample indices.
struct SampleKey {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  std::uint32_t lane = 0;
};

enum class Censoring { kNone, kNodeCap, kDepthCap };

struct ClusterSample {
  int root = 0;
  std::vector<std::uint64_t> totals;
  Censoring censored = Censoring::kNone;
};

struct PrunedSample {
  int root = 0;
  double threshold = 0.0;
  std::vector<std::uint64_t> totals;  // S^<=(M)
  std::vector<std::uint64_t> W;
  std::vector<std::uint64_t> N;
  std::vector<std::vector<std::uint64_t>> pairN;  // [child dim][parent dim]
  Censoring censored = Censoring::kNone;
};

// Total progeny of one tree. Censored (totals partial) once more than
// `node_cap` nodes have been generated.
ClusterSample sample_cluster(const ModelConfig& config, int root, const SampleKey& key,
                             std::uint64_t node_cap = kDefaultNodeCap);

// Same tree, grown with every sibling group larger than `threshold` suppressed.
PrunedSample sample_pruned(const ModelConfig& config, int root, double threshold, const SampleKey& key,
                           std::uint64_t node_cap = kDefaultNodeCap);

struct DecompositionParams {
  double n = 1.0;
  double delta = 0.1;
  std::uint64_t node_cap = kDefaultNodeCap;
  int depth_cap = kDefaultDepthCap;
};

struct Decomposition {
  int root = 0;
  double n = 0.0;
  double delta = 0.0;
  // tau[k][i] for k = 0..depth+1; tau[0] = e_root and tau[depth+1] = 0.
  std::vector<std::vector<std::uint64_t>> tau;
  // thresholds[k-1][i] = M_i(k); zero where no cluster of type i was grown.
  std::vector<std::vector<double>> thresholds;
  // pieces[k-1][i]: summed pruned totals of the clusters rooted at type i in step k.
  std::vector<std::vector<std::vector<std::uint64_t>>> pieces;
  std::vector<std::uint64_t> reconstructed;
  int depth = 0;
  GeneralizedType gtype;
  Censoring censored = Censoring::kNone;
};

// The recursive pruned decomposition of S_root at level (n, delta).
template <class Source>
Decomposition decompose(const Source& source, int root, std::uint64_t root_parent,
                        const DecompositionParams& params);

Decomposition sample_decomposition(const ModelConfig& config, int root, const SampleKey& key,
                                   const DecompositionParams& params);

// sum_k sum_i n^{-1} tau_i(k) sbar_i.
std::vector<double> hat_S(const Decomposition& dec, const ModelConfig& config);

// Internal: the generic decomposition loop.
template <class Source>
Decomposition decompose(const Source& source, int root, std::uint64_t root_parent,
                        const DecompositionParams& params) {
  const int d = source.dim();
  Decomposition out;
  out.root = root;
  out.n = params.n;
  out.delta = params.delta;
  out.reconstructed.assign(d, 0);
  out.tau.push_back(std::vector<std::uint64_t>(d, 0));
  out.tau[0][root] = 1;

  std::vector<std::vector<Group>> pending(d);
  pending[root].push_back(Group{root_parent, root, 1});
  std::uint64_t nodes = 0;
  for (int k = 1;; ++k) {
    if (k > params.depth_cap + 1) {
      out.censored = Censoring::kDepthCap;
      break;
    }
    const auto& prev = out.tau[k - 1];
    std::vector<double> m(d, 0.0);
    std::vector<std::vector<Group>> produced(d);
    std::vector<std::vector<std::uint64_t>> piece(d, std::vector<std::uint64_t>(d, 0));
    std::vector<std::uint64_t> tau(d, 0);
    bool ok = true;
    for (int i = 0; i < d && ok; ++i) {
      if (prev[i] == 0) continue;
      m[i] = (k == 1) ? params.n * params.delta : params.delta * static_cast<double>(prev[i]);
      GrowthTally tally(d);
      std::vector<Group> pruned;
      ok = grow(source, std::span<const Group>(pending[i]), m[i], params.node_cap, nodes, tally, &pruned);
      piece[i] = tally.totals;
      for (int l = 0; l < d; ++l) {
        out.reconstructed[l] += tally.totals[l];
        tau[l] += tally.W[l];
      }
      for (const Group& g : pruned) produced[g.dim].push_back(g);
    }
    out.thresholds.push_back(std::move(m));
    out.pieces.push_back(std::move(piece));
    out.tau.push_back(tau);
    if (!ok) {
      out.censored = Censoring::kNodeCap;
      break;
    }
    bool active = false;
    for (std::uint64_t t : tau) active = active || t > 0;
    if (!active) break;
    pending = std::move(produced);
  }
  // Depth: the last k with tau(k) != 0.
  for (std::size_t k = 1; k < out.tau.size(); ++k) {
    IndexSet row;
    for (int i = 0; i < d; ++i)
      if (out.tau[k][i] > 0) row.insert(i);
    if (row.empty()) break;
    out.gtype.rows.push_back(row);
  }
  out.depth = out.gtype.depth();
  return out;
}

}  // namespace clustertail
