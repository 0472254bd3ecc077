#pragma once

#include <cmath>

#include <Eigen/Core>

namespace sadic::detail {

// Parlett-Reinsch balancing by powers of two: a diagonal similarity that
// equalizes row and column norms. Eigenvalues are unchanged.
template <class Scalar>
void balance(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a) {
  const Scalar radix = 2;
  const Eigen::Index n = a.rows();
  bool converged = false;
  for (int sweep = 0; !converged && sweep < 100; ++sweep) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar c = 0, r = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0 || r == 0) continue;
      const Scalar s = c + r;
      Scalar f = 1;
      while (c < r / radix) {
        f *= radix;
        c *= radix * radix;
      }
      while (c >= r * radix) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < Scalar(0.95) * s) {
        converged = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

}  // namespace sadic::detail
