#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sadic/int_matrix.hpp"
#include "sadic/numerics.hpp"
#include "sadic/rng.hpp"
#include "sadic/substitution.hpp"

namespace sadic {

/// Point of the torus R^d / Z^d with coordinates kept in [0, 1).
class TorusPoint {
 public:
  TorusPoint() = default;
  explicit TorusPoint(std::vector<double> coords);
  static TorusPoint zero(std::size_t d) { return TorusPoint(std::vector<double>(d, 0.0)); }

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  const std::vector<double>& coords() const { return coords_; }

  /// Reduction modulo 1 into [0, 1), rounding half to even.
  static double reduce(long double x);

 private:
  std::vector<double> coords_;
};

/// Exact rational torus point num / den (mod 1), den > 0.
struct RationalTorusPoint {
  std::vector<BigInt> numerators;
  BigInt denominator = 1;

  /// Denominator of the point in lowest terms.
  BigInt reduced_denominator() const;
};

/// Sparse exponent vector: (letter, count) pairs with increasing letters.
using SparseExponent = std::vector<std::pair<Letter, std::uint64_t>>;

/// `count` consecutive monomials base, base + e_letter, base + 2 e_letter, ...
struct MonomialRun {
  SparseExponent base;
  Letter letter = 0;
  std::uint64_t count = 1;
};

/// Matrix of trigonometric polynomials with 0/1 coefficients, where each
/// monomial exp(-2 pi i <n, t>) is stored by its exponent vector n.
///
/// Entry (b, c) collects one monomial per occurrence of c in the image of b;
/// its exponent is the abelianization of the prefix before that occurrence.
/// Runs of equal letters are stored as a single MonomialRun and evaluated as
/// a geometric sum.
class TrigPolyMatrix {
 public:
  TrigPolyMatrix() = default;
  explicit TrigPolyMatrix(const Substitution& s);

  std::size_t dim() const { return dim_; }
  const std::vector<MonomialRun>& entry(std::size_t b, std::size_t c) const { return entries_[b * dim_ + c]; }
  std::size_t monomial_count(std::size_t b, std::size_t c) const;

  /// Dense exponent vectors of every monomial in entry (b, c).
  std::vector<std::vector<std::uint64_t>> expanded_entry(std::size_t b, std::size_t c) const;

  Eigen::MatrixXcd evaluate(const TorusPoint& t) const;

  /// {"dim": d, "entries": [[ [exponent vector, ...], ... ], ...]}
  nlohmann::json to_json() const;
  static TrigPolyMatrix from_json(const nlohmann::json& j);

 private:
  std::size_t dim_ = 0;
  std::vector<std::vector<MonomialRun>> entries_;
};

inline TrigPolyMatrix build_trig_matrix(const Substitution& s) { return TrigPolyMatrix(s); }

/// sum_{i < count} exp(-2 pi i * i * x), evaluated in closed form.
std::complex<double> geometric_run(double x, std::uint64_t count);

/// S^T t mod Z^d for a substitution matrix S.
TorusPoint skew_step(const IntMatrix& s, const TorusPoint& t);
TorusPoint skew_step(const Substitution& head, const TorusPoint& t);
RationalTorusPoint skew_step(const IntMatrix& s, const RationalTorusPoint& t);

/// Precomputed cocycle data for a finite set of substitutions, indexed by
/// position in the family. Immutable and shareable between threads.
class SpectralCocycle {
 public:
  explicit SpectralCocycle(std::span<const Substitution> members);

  std::size_t size() const { return trig_.size(); }
  std::size_t dim() const { return dim_; }
  const TrigPolyMatrix& trig(std::size_t i) const { return trig_[i]; }
  const IntMatrix& matrix(std::size_t i) const { return matrices_[i]; }
  /// S_i^T as doubles: the untwisted cocycle generator.
  const Eigen::MatrixXd& untwisted(std::size_t i) const { return transposes_[i]; }
  /// Every |det S_i| = 1, so that t -> S_i^T t permutes dyadic points.
  bool unimodular() const;

  Eigen::MatrixXcd evaluate(std::size_t i, const TorusPoint& t) const { return trig_[i].evaluate(t); }
  TorusPoint step(std::size_t i, const TorusPoint& t) const;

 private:
  std::size_t dim_ = 0;
  std::vector<TrigPolyMatrix> trig_;
  std::vector<IntMatrix> matrices_;
  std::vector<Eigen::MatrixXd> transposes_;
};

/// Running product M(G^{n-1}(a,t)) ... M(a,t) with per-step Frobenius
/// rescaling. The true product equals exp(log_norm) * normalized.
class CocycleAccumulator {
 public:
  CocycleAccumulator(const SpectralCocycle& cocycle, TorusPoint t);

  /// Multiplies in the generator with family index i; returns log of the
  /// rescaling factor applied at this step.
  double push(std::size_t i);

  /// Adds uniform noise below 2^-52 to the point after every step. Double
  /// orbits of a map with |det S| > 1 lose one bit per doubling and
  /// collapse onto 0; the noise keeps them generic.
  void set_jitter(std::uint64_t seed, std::uint64_t stream) { jitter_.emplace(seed, stream); }

  const Eigen::MatrixXcd& normalized() const { return product_; }
  double log_norm() const { return log_norm_.value(); }
  const TorusPoint& point() const { return point_; }
  std::size_t steps() const { return steps_; }

 private:
  const SpectralCocycle* cocycle_;
  TorusPoint point_;
  Eigen::MatrixXcd product_;
  KahanSum log_norm_;
  std::size_t steps_ = 0;
  std::optional<CounterRng> jitter_;
};

struct CocycleProduct {
  Eigen::MatrixXcd normalized;
  double log_norm = 0.0;
  TorusPoint end_point;

  Eigen::MatrixXcd full() const { return normalized * std::exp(log_norm); }
};

/// M_{seq[n-1]}(t_{n-1}) ... M_{seq[0]}(t_0), t_0 = t, t_{k+1} = S_{seq[k]}^T t_k.
CocycleProduct cocycle_product(std::span<const Substitution> seq, const TorusPoint& t);

/// Exact value of the integral of ||M_s(t)||_F^2 over the torus: the number
/// of monomials, i.e. the sum of the image lengths.
Rational frobenius_sq_integral(const Substitution& s);

}  // namespace sadic
