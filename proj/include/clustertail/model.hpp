#pragma once

#include <string>
#include <vector>

#include "clustertail/index_set.hpp"
#include "clustertail/linalg.hpp"
#include "clustertail/offspring.hpp"

namespace clustertail {

// laws[j][i] is the law of B_{i<-j}: children along dimension i of a type-j parent.
using LawMatrix = std::vector<std::vector<OffspringLaw>>;

struct ValidationReport {
  int dim = 0;
  DenseMatrix mean_matrix;  // (i, j) = E B_{i<-j}
  double spectral_radius = 0.0;
  bool subcritical = false;
  bool distinct_tail_indices = false;
  bool connected = false;
  std::vector<double> sorted_tail_indices;
  // Columns are the expected clusters E S_j; empty when I - B is singular.
  DenseMatrix expected_clusters;

  bool ok() const { return subcritical && distinct_tail_indices && connected; }
};

// Checks sub-criticality, distinct tail indices and full connectivity. Never throws
// for well-formed input; the verdicts are carried in the report.
ValidationReport assess(const LawMatrix& laws);

enum class Strictness {
  kStrict,   // every assumption must hold
  kRelaxed,  // only sub-criticality is enforced (degenerate test models)
};

// Validated, immutable branching model with its derived tail calculus.
class ModelConfig {
 public:
  // Throws Error with kind SubcriticalityViolation, DuplicateTailIndex or
  // ConnectivityViolation (checked in that order).
  static ModelConfig create(LawMatrix laws, Strictness strictness = Strictness::kStrict);

  int dim() const { return dim_; }
  // Law of B_{child<-parent}.
  const OffspringLaw& law(int parent, int child) const { return laws_[parent][child]; }
  const LawMatrix& laws() const { return laws_; }
  const ValidationReport& report() const { return report_; }

  const DenseMatrix& mean_matrix() const { return report_.mean_matrix; }
  double spectral_radius() const { return report_.spectral_radius; }

  // E S_j as a d-vector.
  std::vector<double> expected_cluster(int root) const;
  // Coordinate `coord` of E S_root.
  double sbar(int root, int coord) const { return report_.expected_clusters(coord, root); }

  // min over parents l of the tail index of B_{j<-l}, and its argmin.
  double alpha_star(int j) const { return alpha_star_[j]; }
  int l_star(int j) const { return l_star_[j]; }

  // 1 + sum_{i in J} (alpha*(i) - 1); throws EmptySet for J empty.
  double alpha_of(IndexSet set) const;
  // Same, with alpha(empty) = 0.
  double alpha_of_or_zero(IndexSet set) const;

  // lambda_J(n) = n^{-1} prod_{i in J} n P(B_{i<-l*(i)} > n).
  double rate_lambda(IndexSet set, double n) const;

 private:
  int dim_ = 0;
  LawMatrix laws_;
  ValidationReport report_;
  std::vector<double> alpha_star_;
  std::vector<int> l_star_;
};

}  // namespace clustertail
