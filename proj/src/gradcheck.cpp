#include "fedrec/gradcheck.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fedrec/errors.hpp"

namespace fedrec {

DenseVector finite_diff_gradient(const std::function<double(const DenseVector&)>& f,
                                 const DenseVector& x, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("finite_diff_gradient: eps must be > 0");
  DenseVector grad(x.dim());
  DenseVector probe = x;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    probe[i] = x[i] + eps;
    const double fp = f(probe);
    probe[i] = x[i] - eps;
    const double fm = f(probe);
    probe[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw NumericError("finite_diff_gradient: non-finite value at coordinate " +
                         std::to_string(i));
    }
    grad[i] = (fp - fm) / (2.0 * eps);
  }
  return grad;
}

}  // namespace fedrec
