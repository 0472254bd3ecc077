#include "sadic/mahler.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace sadic {

namespace {

void require_nonzero(const IntPoly& p) {
  if (degree(p) < 0) throw std::domain_error("Mahler measure of the zero polynomial is undefined");
}

}  // namespace

MahlerValue mahler_measure_1d(const IntPoly& p) {
  require_nonzero(p);
  MahlerValue m;
  m.value = std::log(abs(p.back()).convert_to<double>());
  if (degree(p) == 0) return m;
  for (const auto& r : find_roots(p)) {
    const long double rho = std::abs(r.value);
    const long double lo = std::max<long double>(rho - r.radius, 1.0L);
    const long double hi = std::max<long double>(rho + r.radius, 1.0L);
    const long double mid = std::log(std::max<long double>(rho, 1.0L));
    m.value += static_cast<double>(r.multiplicity * mid);
    m.error += static_cast<double>(r.multiplicity * std::max(std::log(hi) - mid, mid - std::log(lo)));
  }
  return m;
}

MahlerValue mahler_measure_quadrature(const IntPoly& p, double tolerance) {
  require_nonzero(p);
  std::vector<double> coeffs;
  for (const auto& c : p) coeffs.push_back(c.convert_to<double>());
  auto f = [&](double t) {
    const std::complex<double> z = std::polar(1.0, 2 * std::numbers::pi * t);
    std::complex<double> acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
    const double a = std::abs(acc);
    return a > 0 ? std::log(a) : std::log(std::numeric_limits<double>::min());
  };

  // Breakpoints at roots near the unit circle put the log singularities
  // (or sharp dips) at interval ends.
  std::vector<double> cuts{0.0, 1.0};
  if (degree(p) > 0)
    for (const auto& r : find_roots(p))
      if (std::abs(std::abs(r.value) - 1.0L) < 0.5L) {
        double t = static_cast<double>(std::arg(r.value)) / (2 * std::numbers::pi);
        if (t < 0) t += 1;
        cuts.push_back(t);
      }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return b - a < 1e-14; }), cuts.end());

  // Double-exponential nodes cluster at the interval ends, where the
  // logarithmic singularities sit.
  boost::math::quadrature::tanh_sinh<double> integrator;
  MahlerValue m;
  std::function<void(double, double, int)> piece = [&](double a, double b, int depth) {
    double err = 0;
    const double v = integrator.integrate(f, a, b, tolerance, &err);
    if (err > tolerance * std::max(1.0, std::abs(v)) && depth < 24) {
      piece(a, 0.5 * (a + b), depth + 1);
      piece(0.5 * (a + b), b, depth + 1);
      return;
    }
    m.value += v;
    m.error += err;
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) piece(cuts[i], cuts[i + 1], 0);
  return m;
}

}  // namespace sadic
