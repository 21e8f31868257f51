#pragma once

#include <functional>

#include "fedrec/linalg.hpp"

namespace fedrec {

/// Central-difference gradient: (f(x + eps*e_i) - f(x - eps*e_i)) / (2*eps)
/// per coordinate. This is the independent oracle that certifies every
/// analytic gradient in the model; it must stay free of any code path it
/// checks. Throws NumericError if f evaluates non-finite at a probe point,
/// naming the coordinate.
DenseVector finite_diff_gradient(const std::function<double(const DenseVector&)>& f,
                                 const DenseVector& x, double eps);

}  // namespace fedrec
