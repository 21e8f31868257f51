#include "fedrec/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fedrec {

bool DenseVector::is_finite() const {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool DenseMatrix::is_finite() const {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dot: dimension mismatch (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double dot(const DenseVector& a, const DenseVector& b) { return dot(a.span(), b.span()); }

DenseVector matvec(const DenseMatrix& m, const DenseVector& x) {
  if (m.cols != x.dim()) {
    throw std::invalid_argument("matvec: dimension mismatch (matrix is " +
                                std::to_string(m.rows) + "x" + std::to_string(m.cols) +
                                ", vector dim " + std::to_string(x.dim()) + ")");
  }
  DenseVector out(m.rows);
  for (std::size_t r = 0; r < m.rows; ++r) out[r] = dot(m.row(r), x.span());
  return out;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

void fill(std::span<double> x, double v) {
  for (double& e : x) e = v;
}

double squared_norm(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) sum += v * v;
  return sum;
}

}  // namespace fedrec
