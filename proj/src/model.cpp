#include "clustertail/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "clustertail/error.hpp"

namespace clustertail {

namespace {

constexpr double kDuplicateTolerance = 1e-12;

void check_shape(const LawMatrix& laws) {
  const auto d = laws.size();
  if (d == 0 || d > static_cast<std::size_t>(kMaxDim)) {
    throw Error(ErrorKind::InvalidArgument, "model dimension must lie in [1, " + std::to_string(kMaxDim) + "]");
  }
  for (const auto& row : laws) {
    if (row.size() != d) throw Error(ErrorKind::InvalidArgument, "offspring law matrix must be d x d");
  }
}

}  // namespace

ValidationReport assess(const LawMatrix& laws) {
  check_shape(laws);
  const int d = static_cast<int>(laws.size());
  ValidationReport rep;
  rep.dim = d;
  rep.mean_matrix = DenseMatrix(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) rep.mean_matrix(i, j) = laws[j][i].mean();

  rep.spectral_radius = spectral_radius(rep.mean_matrix).value;

  DenseMatrix shifted = DenseMatrix::identity(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) shifted(i, j) -= rep.mean_matrix(i, j);
  auto inv = inverse(shifted);

  // I - B is a nonsingular M-matrix iff rho(B) < 1, in which case its inverse is
  // entrywise nonnegative; the second test guards the power-iteration estimate.
  bool inverse_nonnegative = inv.has_value();
  double max_entry = 0.0;
  if (inv) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        inverse_nonnegative = inverse_nonnegative && (*inv)(i, j) >= -1e-12;
        max_entry = std::max(max_entry, (*inv)(i, j));
      }
  }
  rep.subcritical = rep.spectral_radius < 1.0 - 1e-12 && inverse_nonnegative;
  if (rep.subcritical) rep.expected_clusters = *inv;

  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) rep.sorted_tail_indices.push_back(laws[j][i].alpha());
  std::sort(rep.sorted_tail_indices.begin(), rep.sorted_tail_indices.end());
  rep.distinct_tail_indices = true;
  for (std::size_t k = 1; k < rep.sorted_tail_indices.size(); ++k) {
    if (rep.sorted_tail_indices[k] - rep.sorted_tail_indices[k - 1] <= kDuplicateTolerance) {
      rep.distinct_tail_indices = false;
    }
  }

  rep.connected = rep.subcritical;
  if (rep.subcritical) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (!((*inv)(i, j) > 1e-15 * max_entry)) rep.connected = false;
  }
  return rep;
}

ModelConfig ModelConfig::create(LawMatrix laws, Strictness strictness) {
  ValidationReport rep = assess(laws);
  if (!rep.subcritical) {
    std::ostringstream os;
    os << "mean offspring matrix is not sub-critical (spectral radius " << rep.spectral_radius << ")";
    throw Error(ErrorKind::SubcriticalityViolation, os.str());
  }
  if (strictness == Strictness::kStrict) {
    if (!rep.distinct_tail_indices) {
      throw Error(ErrorKind::DuplicateTailIndex, "tail indices of the offspring laws must be pairwise distinct");
    }
    if (!rep.connected) {
      throw Error(ErrorKind::ConnectivityViolation, "some expected cluster entry E S_{i,j} is zero");
    }
  }
  ModelConfig cfg;
  cfg.dim_ = rep.dim;
  cfg.laws_ = std::move(laws);
  cfg.report_ = std::move(rep);
  cfg.alpha_star_.resize(cfg.dim_);
  cfg.l_star_.resize(cfg.dim_);
  for (int j = 0; j < cfg.dim_; ++j) {
    int best = 0;
    for (int l = 1; l < cfg.dim_; ++l)
      if (cfg.laws_[l][j].alpha() < cfg.laws_[best][j].alpha()) best = l;
    cfg.l_star_[j] = best;
    cfg.alpha_star_[j] = cfg.laws_[best][j].alpha();
  }
  return cfg;
}

std::vector<double> ModelConfig::expected_cluster(int root) const {
  if (root < 0 || root >= dim_) throw Error(ErrorKind::InvalidArgument, "root dimension out of range");
  return report_.expected_clusters.column(root);
}

double ModelConfig::alpha_of(IndexSet set) const {
  if (set.empty()) throw Error(ErrorKind::EmptySet, "alpha_of requires a nonempty index set");
  return alpha_of_or_zero(set);
}

double ModelConfig::alpha_of_or_zero(IndexSet set) const {
  if (set.empty()) return 0.0;
  if (!set.subset_of(IndexSet::full(dim_))) throw Error(ErrorKind::InvalidArgument, "index set exceeds model dimension");
  double a = 1.0;
  for (int i : set.elements()) a += alpha_star_[i] - 1.0;
  return a;
}

double ModelConfig::rate_lambda(IndexSet set, double n) const {
  if (set.empty()) throw Error(ErrorKind::EmptySet, "rate_lambda requires a nonempty index set");
  if (!(n > 0.0)) throw Error(ErrorKind::InvalidArgument, "rate_lambda requires n > 0");
  if (!set.subset_of(IndexSet::full(dim_))) throw Error(ErrorKind::InvalidArgument, "index set exceeds model dimension");
  double value = 1.0 / n;
  for (int i : set.elements()) value *= n * laws_[l_star_[i]][i].survival(n);
  return value;
}

}  // namespace clustertail
