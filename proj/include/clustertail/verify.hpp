#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clustertail/geometry.hpp"
#include "clustertail/jump_type.hpp"
#include "clustertail/measures.hpp"
#include "clustertail/model.hpp"
#include "clustertail/simulate.hpp"
#include "clustertail/stats.hpp"

namespace clustertail {

struct RunOptions {
  std::uint64_t seed = 0;
  int threads = 1;
  std::uint64_t node_cap = kDefaultNodeCap;
};

inline constexpr std::uint64_t kMinHits = 20;

struct SweepRow {
  double n = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  std::uint64_t censored = 0;
  double p_hat = 0.0;
  double se = 0.0;
  double lambda = 0.0;
  double ratio = 0.0;  // p_hat / lambda
};

struct SweepResult {
  std::string experiment;
  int root = 0;
  IndexSet subset;
  double target_alpha = 0.0;  // the fitted slope is compared against -target_alpha
  std::vector<SweepRow> rows;
  LineFit fit;                 // log p_hat against log n over rows with hits
  bool insufficient_hits = false;
  bool bounded_away = false;
};

// Crude Monte Carlo of P(S_root / n in A) for every n in `n_list`, reusing the
// same clusters for all n. Requires a unique j(A) with A bounded away from the
// lower cones, and at least 3 increasing n values.
SweepResult sweep_probability(const ModelConfig& config, int root, const RareEventSet& set,
                              const std::vector<double>& n_list, std::uint64_t samples,
                              const RunOptions& opts);

// Generic sweep over a membership predicate on the rescaled cluster; fills
// rows and the slope but leaves lambda and ratio at zero.
SweepResult sweep_membership(const ModelConfig& config, int root,
                             const std::function<bool(const std::vector<double>&)>& member,
                             const std::vector<double>& n_list, std::uint64_t samples,
                             const RunOptions& opts);

struct IdentityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double se = 0.0;
  double z = 0.0;
  bool pass = false;
};

struct IdentityReport {
  std::vector<IdentityCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

inline constexpr double kIdentityZ = 4.0;

// Mean identity: empirical E S_i against the expected clusters.
IdentityReport check_mean_identity(const ModelConfig& config, std::uint64_t samples, const RunOptions& opts);

// E N_{i;j<-l}(M) = E S^<=_{i,l}(M) P(B_{j<-l} > M) for every (i, j, l, M).
IdentityReport check_pruned_identity(const ModelConfig& config, const std::vector<double>& thresholds,
                                     std::uint64_t samples, const RunOptions& opts);

// Two-stage construction (pruned tree at M plus W_i fresh clusters along each
// dimension) against direct clusters: first and second moments and two tail
// probabilities of the total, per root.
IdentityReport check_regeneration(const ModelConfig& config, double threshold, std::uint64_t samples,
                                  const RunOptions& opts);

// All three of the above.
IdentityReport check_identities(const ModelConfig& config, const std::vector<double>& thresholds,
                                std::uint64_t samples, const RunOptions& opts);

struct ConcentrationRow {
  double n = 0.0;
  double delta = 0.0;
  std::uint64_t repetitions = 0;
  std::uint64_t exceed = 0;
  double probability = 0.0;
  double se = 0.0;
};

struct ConcentrationReport {
  int root = 0;
  double epsilon = 0.25;
  std::vector<ConcentrationRow> rows;
  // Per delta: probability at the largest n no larger than at the smallest.
  bool decreasing = true;
};

// P(|| n^{-1} sum_{m <= n} S^<=_root(n delta)^{(m)} - sbar_root ||_1 > eps).
ConcentrationReport check_concentration(const ModelConfig& config, int root, const std::vector<double>& deltas,
                                        const std::vector<double>& n_list, std::uint64_t repetitions,
                                        double epsilon, const RunOptions& opts);

struct TypeFrequencyReport {
  int root = 0;
  double n = 0.0;
  double delta = 0.0;
  IndexSet subset;  // j(A)
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  std::uint64_t censored = 0;
  std::map<GeneralizedType, std::uint64_t> counts;  // over hits
  double mass_on_subset = 0.0;  // share of hits whose type is a jump type on j(A)
  bool insufficient_hits = false;
};

// Decomposes clusters at (n, delta) and tabulates the extracted types among
// those whose reconstructed cluster lies in nA.
TypeFrequencyReport check_type_frequencies(const ModelConfig& config, int root, const RareEventSet& set,
                                           double n, double delta, std::uint64_t samples,
                                           const RunOptions& opts);

struct HillReport {
  std::uint64_t samples = 0;
  std::uint64_t k = 0;
  std::uint64_t censored = 0;
  double estimate = 0.0;
};

// Hill estimate on ||S_root||_1 from the top `k` of `samples` clusters.
HillReport hill_on_clusters(const ModelConfig& config, int root, std::uint64_t samples, std::uint64_t k,
                            const RunOptions& opts);

struct CounterexampleResult {
  SweepResult sweep;
  double radius = 0.0;
  double naive_alpha = 0.0;       // alpha*(2)
  double lower_bound_alpha = 0.0; // 2 alpha*(1)
  bool slower_than_naive = false;
  bool within_lower_bound = false;  // slope >= -2 alpha*(1) - 0.4
};

// Sweep over the tube complement {x >= 0 : |x_2 - x_1 sbar_{1,2} / sbar_{1,1}| > r}
// for a two-dimensional model meeting the counterexample index conditions.
// Throws PreconditionViolation otherwise.
CounterexampleResult counterexample_experiment(const ModelConfig& config, double radius,
                                               const std::vector<double>& n_list, std::uint64_t samples,
                                               const RunOptions& opts);

}  // namespace clustertail
