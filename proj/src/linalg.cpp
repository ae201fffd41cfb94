#include "clustertail/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace clustertail {

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> DenseMatrix::column(int c) const {
  std::vector<double> out(rows_);
  for (int r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

std::optional<DenseMatrix> inverse(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("inverse: matrix must be square");
  const int n = a.rows();
  DenseMatrix work = a;
  DenseMatrix inv = DenseMatrix::identity(n);
  double scale = 0.0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) scale = std::max(scale, std::fabs(a(r, c)));
  if (scale == 0.0) return std::nullopt;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(work(r, col)) > std::fabs(work(pivot, col))) pivot = r;
    if (std::fabs(work(pivot, col)) <= 1e-14 * scale) return std::nullopt;
    if (pivot != col) {
      for (int c = 0; c < n; ++c) {
        std::swap(work(pivot, c), work(col, c));
        std::swap(inv(pivot, c), inv(col, c));
      }
    }
    const double diag = work(col, col);
    for (int c = 0; c < n; ++c) {
      work(col, c) /= diag;
      inv(col, c) /= diag;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = work(r, col);
      if (f == 0.0) continue;
      for (int c = 0; c < n; ++c) {
        work(r, c) -= f * work(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

SpectralRadius spectral_radius(const DenseMatrix& a, double tol, int max_iter) {
  if (a.rows() != a.cols()) throw std::invalid_argument("spectral_radius: matrix must be square");
  const int n = a.rows();
  std::vector<double> x(n, 1.0), y(n);
  double previous = -1.0;
  SpectralRadius out;
  for (int it = 1; it <= max_iter; ++it) {
    double norm = 0.0;
    for (int r = 0; r < n; ++r) {
      double acc = x[r];  // the shift by the identity
      for (int c = 0; c < n; ++c) acc += a(r, c) * x[c];
      y[r] = acc;
      norm += acc;
    }
    double xnorm = 0.0;
    for (double v : x) xnorm += v;
    const double estimate = norm / xnorm - 1.0;
    for (int r = 0; r < n; ++r) x[r] = y[r] / norm;
    out.value = estimate;
    out.iterations = it;
    if (std::fabs(estimate - previous) < tol) {
      out.converged = true;
      break;
    }
    previous = estimate;
  }
  return out;
}

}  // namespace clustertail
