#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "clustertail/geometry.hpp"
#include "clustertail/jump_type.hpp"
#include "clustertail/model.hpp"

namespace clustertail {

// All jump types with active set `set`: ordered set partitions whose first
// block is a singleton, sorted by (depth, rows). Throws EmptySet.
std::vector<JumpType> enumerate_types(IndexSet set, int d);

// All maps from `targets` (J) to `sources` (I), each given as the preimage
// family: result[a][p] is the part of J sent to the p-th member of I.
// |I|^|J| entries; J empty gives a single all-empty assignment.
std::vector<std::vector<IndexSet>> enumerate_assignments(IndexSet sources, IndexSet targets);

// g_{I<-J}(w) = sum over assignments of prod_{i in I} prod_{j in J(i)} w_i sbar_{i, l*(j)}.
// w is indexed by position within I (ascending). g_{I<-empty} = 1.
double g_value(IndexSet sources, IndexSet targets, const std::vector<double>& w, const ModelConfig& config);

// 1 + sum over rows and members of (alpha*(j) - 1); 0 for the depth-0 type.
double tilde_alpha(const GeneralizedType& type, const ModelConfig& config);

// Smallest LP-minimal weight over cone-feasible boxes and members of J; nullopt
// when no box meets the cone of J.
std::optional<double> delta_bar(const RareEventSet& set, IndexSet subset, const ModelConfig& config);

struct MeasureEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  double delta = 0.0;
  bool delta_above_bar = false;  // delta > eps_bar: estimator may miss mass
};

struct MeasureStream {
  std::uint64_t seed = 0;
  std::uint32_t lane = 0;
  int threads = 1;
};

// Monte Carlo estimate of C^I(A) with Pareto(alpha*(j)) weights truncated at delta.
// Throws ZeroDelta (delta <= 0) or DepthZeroType.
MeasureEstimate estimate_CI(const JumpType& type, const RareEventSet& set, const ModelConfig& config,
                            double delta, std::uint64_t samples, const MeasureStream& stream);

struct TypeEstimate {
  JumpType type;
  MeasureEstimate estimate;
};

struct TotalEstimate {
  IndexSet subset;
  double delta = 0.0;
  bool delta_above_bar = false;
  std::vector<TypeEstimate> per_type;
  // sum_I sbar_{i, l*(j_1^I)} C^I(A) for each root i, with quadrature-combined SEs.
  std::vector<double> total;
  std::vector<double> total_se;
};

// delta <= 0 selects eps_bar / 2. Each type gets its own lane (stream.lane + type index).
// Returns zeros when the set misses the cone of J.
TotalEstimate estimate_C_total(IndexSet subset, const RareEventSet& set, const ModelConfig& config,
                               double delta, std::uint64_t samples, const MeasureStream& stream);

}  // namespace clustertail
