#pragma once

#include <complex>
#include <vector>

#include "sadic/int_matrix.hpp"

namespace sadic {

/// Integer polynomial, coefficients stored low degree first: c[i] is the
/// coefficient of x^i. The zero polynomial is the empty vector.
using IntPoly = std::vector<BigInt>;

IntPoly make_poly(std::initializer_list<long long> coeffs);
void trim(IntPoly& p);
int degree(const IntPoly& p);  // -1 for the zero polynomial
IntPoly derivative(const IntPoly& p);

/// det(M - xI), low degree first. For d = 3 the leading coefficient is -1.
IntPoly characteristic_polynomial(const IntMatrix& m);

/// Resultant via the Sylvester determinant (exact).
BigInt resultant(const IntPoly& p, const IntPoly& q);

/// (-1)^{n(n-1)/2} Res(p, p') / a_n.
BigInt discriminant(const IntPoly& p);

/// Squarefree decomposition p = c * prod_i f_i^i with primitive integer f_i.
/// Entry i-1 holds f_i (possibly the constant 1).
std::vector<IntPoly> squarefree_decomposition(const IntPoly& p);

/// A root together with the radius of a disc around `value` that is
/// guaranteed to contain a root of the polynomial.
struct PolyRoot {
  std::complex<long double> value;
  long double radius = 0;
  int multiplicity = 1;
};

/// All complex roots with multiplicities. Repeated factors are split off
/// exactly before the numeric eigensolve, so every disc comes from a
/// simple root of a squarefree factor.
std::vector<PolyRoot> find_roots(const IntPoly& p);

std::complex<long double> evaluate(const IntPoly& p, std::complex<long double> z);

}  // namespace sadic
