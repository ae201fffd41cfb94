#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace clustertail {

// Small dense row-major matrix. Sized for model dimensions (d <= 16) and the
// tableaux of the cone LPs; no attempt at cache blocking.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  static DenseMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  std::vector<double> column(int c) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Gauss-Jordan inverse with partial pivoting; nullopt when singular.
std::optional<DenseMatrix> inverse(const DenseMatrix& a);

struct SpectralRadius {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Perron root of a nonnegative square matrix by power iteration on (A + I),
// which is aperiodic whenever A is nonnegative. Starts from the all-ones
// vector; stops when successive estimates differ by less than `tol`.
SpectralRadius spectral_radius(const DenseMatrix& a, double tol = 1e-12, int max_iter = 100000);

}  // namespace clustertail
