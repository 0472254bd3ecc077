#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sadic/family.hpp"
#include "sadic/trig_matrix.hpp"

namespace sadic {

enum class EstimateMethod { norm_growth, qr_spectrum, finite_k_bound, pointwise };
const char* to_string(EstimateMethod m);

/// Point estimate in nats per step. The reported interval is
/// value +- 3 stderr.
struct ExponentEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t n_steps = 0;
  std::size_t n_trials = 0;
  EstimateMethod method = EstimateMethod::norm_growth;
  std::uint64_t seed = 0;
  std::vector<double> per_trial;  // one average per trial (or per sample)

  double lower3() const { return value - 3 * stderr_; }
  double upper3() const { return value + 3 * stderr_; }
};

nlohmann::json to_json(const ExponentEstimate& e);

struct EstimatorOptions {
  std::size_t n_steps = 10'000;
  std::size_t n_trials = 64;
  double burn_in = 0.1;  // fraction of leading steps left out of the average
  std::uint64_t seed = 0;
};

/// Top exponent of random products g[i_n] ... g[i_1] with i.i.d. indices.
ExponentEstimate estimate_top_exponent(std::span<const Eigen::MatrixXd> gens, const FamilySpec& weights,
                                       const EstimatorOptions& opt);

/// lambda: top exponent of the products of transposed substitution matrices.
ExponentEstimate estimate_lambda(const FamilySpec& family, const EstimatorOptions& opt = {});

struct SpectrumEstimate {
  std::vector<ExponentEstimate> exponents;  // decreasing
  ExponentEstimate sum;                     // per-trial sum of all exponents
};

/// All d exponents from a QR-reorthonormalized frame.
SpectrumEstimate estimate_exponent_spectrum(std::span<const Eigen::MatrixXd> gens, const FamilySpec& weights,
                                            const EstimatorOptions& opt);
SpectrumEstimate estimate_exponent_spectrum(const FamilySpec& family, const EstimatorOptions& opt = {});

/// Generators (S^{-1})^T of the inverse cocycle; requires unimodular matrices.
std::vector<Eigen::MatrixXd> inverse_transposes(const FamilySpec& family);

/// Global exponent of the spectral cocycle: random directive stream and
/// uniform starting point per trial.
ExponentEstimate estimate_chi(const FamilySpec& family, const EstimatorOptions& opt = {});

/// (1/k) E log ||M^[k]||_F over n_samples independent (word, t) pairs.
ExponentEstimate finite_k_upper_bound(const FamilySpec& family, std::size_t k, std::size_t n_samples,
                                      std::uint64_t seed = 0);

struct FiniteKSweep {
  std::vector<std::size_t> ks;
  std::vector<ExponentEstimate> bounds;
  std::size_t best = 0;  // index of the smallest bound
};

FiniteKSweep finite_k_sweep(const FamilySpec& family, std::span<const std::size_t> ks, std::size_t n_samples,
                            std::uint64_t seed = 0);

struct PointwiseResult {
  ExponentEstimate estimate;  // max of the trace over the tail window
  std::vector<double> trace;  // (1/n) log ||M^[n](a, t)||, n = 1..n_max
};

/// limsup proxy for the pointwise upper exponent along an explicit directive
/// word starting at t.
PointwiseResult pointwise_upper_exponent(const FamilySpec& family, std::span<const std::size_t> word,
                                         const TorusPoint& t, double tail_fraction = 0.1);
/// Same with the word drawn from the family's directive stream.
PointwiseResult pointwise_upper_exponent(const FamilySpec& family, std::uint64_t seed, const TorusPoint& t,
                                         std::size_t n_max, double tail_fraction = 0.1);

}  // namespace sadic
