#pragma once

#include "sadic/polynomial.hpp"

namespace sadic {

struct MahlerValue {
  double value = 0.0;
  double error = 0.0;  // absolute error bound
};

/// Logarithmic Mahler measure log|a_n| + sum log max(|root|, 1) from
/// certified root discs. Throws std::domain_error for the zero polynomial.
MahlerValue mahler_measure_1d(const IntPoly& p);

/// Integral of log|p(e^{2 pi i t})| over [0, 1] by tanh-sinh
/// quadrature, with the interval split at the arguments of roots close to
/// the unit circle.
MahlerValue mahler_measure_quadrature(const IntPoly& p, double tolerance = 1e-10);

}  // namespace sadic
