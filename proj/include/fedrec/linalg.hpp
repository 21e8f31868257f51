#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fedrec {

/// Dense 64-bit float vector. All model math runs in double precision;
/// the gradient-check tolerances do not hold in float.
struct DenseVector {
  std::vector<double> values;

  DenseVector() = default;
  explicit DenseVector(std::size_t dim, double fill = 0.0) : values(dim, fill) {}
  DenseVector(std::initializer_list<double> init) : values(init) {}

  std::size_t dim() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::span<double> span() { return values; }
  std::span<const double> span() const { return values; }

  bool is_finite() const;
};

/// Row-major dense matrix.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), values(r * c, fill) {}

  std::span<double> row(std::size_t r) { return {values.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols, cols};
  }
  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

  static DenseMatrix identity(std::size_t n);

  bool is_finite() const;
};

/// Inner product with fixed left-to-right summation. The order is part of
/// the contract: golden-file tests rely on bit-stable results, so no
/// pairwise or FMA reordering is allowed here.
double dot(const DenseVector& a, const DenseVector& b);
double dot(std::span<const double> a, std::span<const double> b);

/// m * x, dim of result == m.rows.
DenseVector matvec(const DenseMatrix& m, const DenseVector& x);

// span helpers used by the hot paths; all fixed-order loops
void axpy(double alpha, std::span<const double> x, std::span<double> y);  // y += alpha*x
void scale(double alpha, std::span<double> x);
void fill(std::span<double> x, double v);
double squared_norm(std::span<const double> x);

}  // namespace fedrec
