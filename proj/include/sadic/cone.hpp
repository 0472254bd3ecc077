#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sadic/int_matrix.hpp"

namespace sadic {

/// Cone in R^3 cut out by two ratio intervals relative to a normalizing
/// coordinate:
///
///     lower[k] <= x[ratio_index[k]] / x[normalize] <= upper[k],  k = 0, 1
///
/// together with x[normalize] > 0 (positive_only) or x[normalize] != 0.
struct ConeSpec {
  std::string name;
  std::size_t normalize = 2;
  std::array<std::size_t, 2> ratio_index{0, 1};
  std::array<Rational, 2> lower;
  std::array<Rational, 2> upper;
  bool positive_only = true;
  /// Expansion factor asserted for every generator; checked, never assumed.
  std::optional<Rational> stated_expansion;

  void validate() const;
  bool contains(std::span<const Rational> x) const;
  bool contains(std::span<const double> x) const;
};

/// 2.3m <= x1/x3 <= 2.5m+3, m^2 <= x2/x3 <= m^2+2m+2, x3 > 0; stated
/// expansion 1.9m.
ConeSpec forward_cone(long long m);

/// -3m <= x2/x1 <= -2m, -m^2-3m <= x3/x1 <= -m^2+1, x1 != 0; stated
/// expansion (m^4+2m^3-5m)/(m^2+6m+1), the smaller of the two generator
/// bounds.
ConeSpec inverse_cone(long long m);

/// Expansion bounds asserted for A_m^{-1} and A_{m+1}^{-1} on inverse_cone(m).
Rational inverse_expansion_claim_a(long long m);
Rational inverse_expansion_claim_b(long long m);

/// S for the substitution 0 -> 0^{2m} 1^{m^2} 2, 1 -> 0, 2 -> 1.
IntMatrix example_matrix(long long m);

enum class ConeMode { exact, sample };

struct RatioRange {
  Rational lo, hi;
};

struct ConeMatrixResult {
  bool maps_into = false;
  bool normalizer_sign_ok = false;
  std::array<RatioRange, 2> image_ratios;
  Rational expansion_min;
  Rational expansion_max;
  std::string failure;
};

struct ConeCertificate {
  ConeMode mode = ConeMode::exact;
  bool invariant = false;
  std::vector<ConeMatrixResult> per_matrix;
  std::size_t samples = 0;  // sample mode only
  std::size_t sample_failures = 0;
};

/// Exact mode proves M(C) is contained in C for every matrix. Sample mode maps
/// `samples` random cone vectors (seeded) and counts membership failures.
ConeCertificate cone_invariance_check(const ConeSpec& cone, std::span<const IntMatrix> mats,
                                      ConeMode mode = ConeMode::exact, std::size_t samples = 1000,
                                      std::uint64_t seed = 0);

ConeMatrixResult analyze_cone_matrix(const ConeSpec& cone, const IntMatrix& m);

/// Exact inf and sup of ||Mx||_1 / ||x||_1 over the nonzero cone vectors.
Rational expansion_lower_bound(const ConeSpec& cone, const IntMatrix& m);
Rational expansion_upper_bound(const ConeSpec& cone, const IntMatrix& m);

struct ConeLambdaBound {
  bool valid = false;     // cone invariant under every matrix
  double value = 0.0;     // log of the factor used
  Rational factor;        // stated factor if present, else the exact minimum
  Rational exact_factor;  // min over matrices of the exact expansion bound
  bool stated_factor_holds = true;
  std::string detail;
};

/// Lower bound for the top exponent of every product of the matrices.
ConeLambdaBound lambda_lower_from_cone(const ConeSpec& cone, std::span<const IntMatrix> mats);

/// log of the largest exact expansion over the cone; an upper bound for the
/// growth of any product of vectors that stay in the cone.
double lambda_upper_from_cone(const ConeSpec& cone, std::span<const IntMatrix> mats);

}  // namespace sadic
