#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sadic/cone.hpp"
#include "sadic/family.hpp"
#include "sadic/hypotheses.hpp"
#include "sadic/lyapunov.hpp"

namespace sadic {

/// m if s is 0 -> 0^{2m} 1^{m^2} 2, 1 -> 0, 2 -> 1.
std::optional<long long> recognize_example(const Substitution& s);
/// (m, k) if s is 0 -> 0^k 2 0^{2m-k} 1^{m^2}, 1 -> 0, 2 -> 1.
std::optional<std::pair<long long, long long>> recognize_shifted(const Substitution& s);
/// m if the matrices are all in {A_m, A_{m+1}} and both occur.
std::optional<long long> recognize_example_matrices(std::span<const IntMatrix> mats);

enum class Provenance { closed_form, reduced_quadrature, finite_k, monte_carlo, cone_certificate };
const char* to_string(Provenance p);
inline bool is_analytic(Provenance p) {
  return p == Provenance::closed_form || p == Provenance::reduced_quadrature || p == Provenance::cone_certificate;
}

struct BoundValue {
  double value = 0.0;
  double error = 0.0;  // quadrature error bound or Monte Carlo stderr
  Provenance provenance = Provenance::monte_carlo;
};

/// (1/2)(log 16 + m(z^2 - 3z + 1)) = (1/2) log[8(3 + sqrt 5)], the bound on
/// the integral of log ||M_zeta||_F for every zeta_m.
BoundValue example_chi_bound_closed_form();

/// Bound on the integral of log ||M||_F for zeta_{m,k}:
/// (1/2)(log 4 + int_0^1 log rho(s) ds), rho the larger root of
/// y^2 - (4 + a + b) y + a b with a = |sum_{j<k} z^j|^2, b likewise for
/// 2m - k. The one-dimensional integrand is a smooth periodic function and
/// is evaluated by the periodic trapezoid rule; `error` compares N with 2N
/// nodes and is added to `value`.
BoundValue shifted_chi_bound(long long m, long long k);

enum class IntegralMethod { automatic, closed_form, monte_carlo };

/// Integral of log ||M_zeta(t)||_F over the torus (or an upper bound).
BoundValue per_substitution_integral(const Substitution& s, IntegralMethod method = IntegralMethod::automatic,
                                     std::size_t n_samples = 100'000, std::uint64_t seed = 0);

struct HypothesisStatus {
  bool pass = false;
  bool heuristic = false;
  std::string detail;
};

struct HypothesisReport {
  HypothesisStatus b1;  // unimodular and aperiodic
  HypothesisStatus b2;  // strong irreducibility (necessary checks only)
  HypothesisStatus b3;  // a product with positive entries
  HypothesisStatus proper;
  HypothesisStatus strong_coincidence;
  HypothesisStatus proximal;
};

HypothesisReport hypothesis_report(const FamilySpec& family);
nlohmann::json to_json(const HypothesisReport& r);

struct CriterionConfig {
  /// Monte Carlo per-substitution integrals and finite-k sweep are run
  /// only when no analytic chi bound is available, unless forced.
  bool force_empirical = false;
  std::size_t integral_samples = 20'000;
  std::vector<std::size_t> k_list{1, 2, 4, 8, 16};
  std::size_t finite_k_samples = 256;
  EstimatorOptions lambda_options{};  // Monte Carlo fallback for lambda
  std::uint64_t seed = 0;
};

enum class Verdict { certified, inconclusive };

struct CriterionVerdict {
  std::string family;
  HypothesisReport hypotheses;
  BoundValue chi_bound;
  BoundValue lambda_lower;
  double margin = 0.0;  // lambda_lower / 2 - chi_bound
  Verdict verdict = Verdict::inconclusive;
  std::string reason;
  std::optional<ConeLambdaBound> cone;
  std::vector<BoundValue> chi_candidates;

  nlohmann::json to_json() const;
};

/// Throws std::invalid_argument for families with fewer than two members.
CriterionVerdict criterion_verdict(const FamilySpec& family, const CriterionConfig& config = {});

enum class ExampleVariant { standard, shifted };

struct ExampleFamilyReport {
  long long m = 0;
  ExampleVariant variant = ExampleVariant::standard;
  std::vector<long long> ks;  // shifted variant only
  std::vector<CriterionVerdict> verdicts;  // one per k (one for standard)
  ConeCertificate forward;
  ConeCertificate inverse;
  std::vector<Rational> forward_expansion;  // per matrix
  std::vector<Rational> inverse_expansion;
  double lambda_upper = 0.0;
  std::vector<EigenData> eigen;
  bool compositions_left_proper = false;
  bool certified = false;           // every verdict certified
  bool expected_certified = false;  // m >= 23 (standard) or m >= 26 (shifted)

  nlohmann::json to_json() const;
};

/// Runs the full pipeline on {zeta_m, zeta_{m+1}} or, for the shifted
/// variant, on {zeta_{m,k}, zeta_{m+1,k}} for every k in `ks` (all
/// 1 <= k <= 2m when empty).
ExampleFamilyReport example_family_report(long long m, ExampleVariant variant, std::vector<long long> ks = {},
                                          const CriterionConfig& config = {});

}  // namespace sadic
