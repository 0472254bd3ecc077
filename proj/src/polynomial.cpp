#include "sadic/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "sadic/detail/balance.hpp"

namespace sadic {

namespace {

using RatPoly = std::vector<Rational>;

void trim(RatPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

RatPoly to_rational(const IntPoly& p) { return RatPoly(p.begin(), p.end()); }

// Divide a by b, returning quotient; a becomes the remainder.
RatPoly divide(RatPoly& a, const RatPoly& b) {
  RatPoly q;
  trim(a);
  if (b.empty()) throw std::domain_error("polynomial division by zero");
  if (a.size() < b.size()) return q;
  q.assign(a.size() - b.size() + 1, Rational(0));
  while (!a.empty() && a.size() >= b.size()) {
    const std::size_t shift = a.size() - b.size();
    const Rational f = a.back() / b.back();
    q[shift] = f;
    for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
    a.pop_back();
    trim(a);
  }
  return q;
}

RatPoly gcd(RatPoly a, RatPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    divide(a, b);
    std::swap(a, b);
  }
  if (!a.empty()) {
    const Rational lead = a.back();
    for (auto& c : a) c /= lead;
  }
  return a;
}

RatPoly derivative(const RatPoly& p) {
  RatPoly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * Rational(static_cast<long long>(i)));
  trim(d);
  return d;
}

RatPoly minus(RatPoly a, const RatPoly& b) {
  if (a.size() < b.size()) a.resize(b.size(), Rational(0));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  trim(a);
  return a;
}

IntPoly primitive_part(const RatPoly& p) {
  BigInt den = 1;
  for (const auto& c : p) den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(c));
  IntPoly out;
  BigInt g = 0;
  for (const auto& c : p) {
    const Rational scaled = c * Rational(den);
    out.push_back(boost::multiprecision::numerator(scaled));
    g = boost::multiprecision::gcd(g, out.back());
  }
  if (g != 0 && g != 1)
    for (auto& c : out) c /= g;
  sadic::trim(out);
  if (!out.empty() && out.back() < 0)
    for (auto& c : out) c = -c;
  return out;
}

std::complex<long double> to_cld(const BigInt& v) {
  return {v.convert_to<long double>(), 0.0L};
}

// Roots of a squarefree polynomial of degree >= 1.
std::vector<PolyRoot> simple_roots(const IntPoly& p) {
  const int n = degree(p);
  std::vector<PolyRoot> roots;
  if (n < 1) return roots;
  const long double lead = p.back().convert_to<long double>();
  if (n == 1) {
    const long double r = -p[0].convert_to<long double>() / lead;
    roots.push_back({{r, 0.0L}, std::abs(r) * std::numeric_limits<long double>::epsilon(), 1});
    return roots;
  }

  using MatLd = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  MatLd companion = MatLd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0L;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -p[i].convert_to<long double>() / lead;
  detail::balance(companion);
  Eigen::EigenSolver<MatLd> solver(companion, false);
  const auto eig = solver.eigenvalues();

  const IntPoly dp = sadic::derivative(p);
  const long double eps = std::numeric_limits<long double>::epsilon();
  for (int i = 0; i < n; ++i) {
    std::complex<long double> z = eig(i);
    for (int it = 0; it < 8; ++it) {
      const auto fz = evaluate(p, z);
      const auto dfz = evaluate(dp, z);
      if (std::abs(dfz) == 0.0L) break;
      const auto step = fz / dfz;
      z -= step;
      if (std::abs(step) <= eps * std::max(1.0L, std::abs(z))) break;
    }
    // Residual plus a Horner rounding bound.
    long double absz = std::abs(z), bound = 0.0L, pw = 1.0L;
    for (const auto& c : p) {
      bound += std::abs(c.convert_to<long double>()) * pw;
      pw *= absz;
    }
    const long double resid = std::abs(evaluate(p, z)) + 4.0L * n * eps * bound;
    const long double dres = std::abs(evaluate(dp, z));
    long double radius = std::pow(resid / std::abs(lead), 1.0L / n);
    if (dres > 0) radius = std::min(radius, n * resid / dres);
    roots.push_back({z, radius, 1});
  }
  return roots;
}

}  // namespace

IntPoly make_poly(std::initializer_list<long long> coeffs) {
  IntPoly p;
  for (long long c : coeffs) p.emplace_back(c);
  trim(p);
  return p;
}

void trim(IntPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

int degree(const IntPoly& p) {
  IntPoly q = p;
  trim(q);
  return static_cast<int>(q.size()) - 1;
}

IntPoly derivative(const IntPoly& p) {
  IntPoly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long long>(i));
  trim(d);
  return d;
}

IntPoly characteristic_polynomial(const IntMatrix& m) {
  // Faddeev-LeVerrier: every division below is exact over the integers.
  const std::size_t n = m.dim();
  std::vector<BigInt> c(n + 1);
  c[n] = 1;
  IntMatrix mk(n);  // M_0 = 0
  for (std::size_t k = 1; k <= n; ++k) {
    IntMatrix next = m * mk;
    for (std::size_t i = 0; i < n; ++i) next(i, i) += c[n - k + 1];
    mk = next;
    IntMatrix am = m * mk;
    BigInt tr = 0;
    for (std::size_t i = 0; i < n; ++i) tr += am(i, i);
    c[n - k] = -tr / static_cast<long long>(k);
  }
  // c now holds det(xI - M); det(M - xI) = (-1)^n det(xI - M).
  if (n % 2 == 1)
    for (auto& v : c) v = -v;
  return c;
}

BigInt resultant(const IntPoly& p0, const IntPoly& q0) {
  IntPoly p = p0, q = q0;
  trim(p);
  trim(q);
  if (p.empty() || q.empty()) return 0;
  const std::size_t m = p.size() - 1, n = q.size() - 1;
  const std::size_t size = m + n;
  if (size == 0) return 1;
  std::vector<std::vector<BigInt>> syl(size, std::vector<BigInt>(size));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i <= m; ++i) syl[r][r + i] = p[m - i];
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t i = 0; i <= n; ++i) syl[n + r][r + i] = q[n - i];
  return bareiss_determinant(std::move(syl));
}

BigInt discriminant(const IntPoly& p0) {
  IntPoly p = p0;
  trim(p);
  const int n = static_cast<int>(p.size()) - 1;
  if (n < 1) throw std::domain_error("discriminant of a constant polynomial");
  if (n == 1) return 1;
  BigInt r = resultant(p, derivative(p)) / p.back();
  if ((n * (n - 1) / 2) % 2 == 1) r = -r;
  return r;
}

std::vector<IntPoly> squarefree_decomposition(const IntPoly& p0) {
  // Yun's algorithm over Q.
  RatPoly f = to_rational(p0);
  trim(f);
  if (f.empty()) throw std::domain_error("squarefree decomposition of the zero polynomial");
  std::vector<IntPoly> factors;
  if (f.size() == 1) return factors;
  RatPoly fp = derivative(f);
  RatPoly a = gcd(f, fp);
  RatPoly b = f, c = fp;
  {
    RatPoly rem = f;
    b = divide(rem, a);
    rem = fp;
    c = divide(rem, a);
  }
  RatPoly d = minus(c, derivative(b));
  while (b.size() > 1) {
    RatPoly ai = gcd(b, d);
    RatPoly rem = b;
    RatPoly bn = divide(rem, ai);
    rem = d;
    RatPoly cn = divide(rem, ai);
    factors.push_back(primitive_part(ai));
    b = bn;
    d = minus(cn, derivative(b));
  }
  while (!factors.empty() && factors.back().size() <= 1) factors.pop_back();
  return factors;
}

std::vector<PolyRoot> find_roots(const IntPoly& p) {
  std::vector<PolyRoot> roots;
  const auto factors = squarefree_decomposition(p);
  for (std::size_t i = 0; i < factors.size(); ++i) {
    for (auto r : simple_roots(factors[i])) {
      r.multiplicity = static_cast<int>(i + 1);
      roots.push_back(r);
    }
  }
  return roots;
}

std::complex<long double> evaluate(const IntPoly& p, std::complex<long double> z) {
  std::complex<long double> acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + to_cld(*it);
  return acc;
}

}  // namespace sadic
