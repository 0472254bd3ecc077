#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sadic/family.hpp"
#include "sadic/trig_matrix.hpp"

namespace sadic {

inline DirectiveStream sample_directive(const FamilySpec& family, std::uint64_t seed) {
  return DirectiveStream(family, seed);
}

struct OrbitWord {
  Word letters;
  std::vector<std::size_t> directive;  // family indices of zeta_1 .. zeta_depth
  std::size_t depth = 0;
  std::optional<std::size_t> mark_level;
  /// With mark_level l: type of the level-l supertile starting at each
  /// position, or -1.
  std::vector<int> tile_marks;
};

/// First N letters of zeta_1 o ... o zeta_depth (b), with zeta_n read from
/// the stream's index n-1. Without a depth, the depth is raised until the
/// word has at least N letters (or `max_depth` is hit).
OrbitWord generate_orbit_word(const FamilySpec& family, const DirectiveStream& stream, std::optional<std::size_t> depth,
                              Letter b, std::size_t N, std::optional<std::size_t> mark_level = {},
                              std::size_t max_depth = 256);

/// Indicator of the cylinder [letter] (level 0) or of the starts of
/// level-l supertiles of type `letter`.
struct TestFunction {
  Letter letter = 0;
  std::size_t level = 0;
  bool centered = true;
};

struct SpectralEstimate {
  TestFunction f;
  std::size_t N = 0;
  double mean = 0.0;  // empirical mean of the indicator
  std::vector<std::complex<double>> correlations;  // lags 0..K
  std::vector<double> omega;    // uniform grid j / M on [0, 1)
  std::vector<double> density;  // Fejer-tapered estimate on `omega`
};

/// Biased autocorrelation (1/N) sum_j f_j f_{j+k} of the (centered)
/// indicator sequence and its Fejer density of order K on a grid of
/// `grid` points (raised to exceed 2K). Throws std::invalid_argument for
/// K >= N/10 or a level without matching tile marks.
SpectralEstimate estimate_spectral_measure(const OrbitWord& word, const TestFunction& f, std::size_t K,
                                           std::size_t grid = 1 << 14);

/// (sin(pi w) / (pi w))^2.
double spectral_kernel(double omega);

struct WeylRow {
  std::vector<long long> n;
  std::size_t subsample = 1;  // k: the orbit x_0, x_k, x_2k, ...
  std::size_t N = 0;
  double weyl_mod = 0.0;  // (1/N) |sum_j exp(2 pi i <n, x_{kj}>)|
};

struct WeylReport {
  std::vector<WeylRow> rows;
  double max_mod(std::size_t subsample = 1) const;
};

/// Weyl sums along x_{j+1} = S_{zeta_{j+1}}^T x_j mod 1 for each nonzero
/// frequency, for every subsampling step in `subsamples`.
WeylReport weyl_test(const FamilySpec& family, const TorusPoint& x0, std::uint64_t seed, std::size_t N,
                     std::span<const std::vector<long long>> freqs, std::span<const std::size_t> subsamples);

std::vector<std::vector<long long>> default_weyl_frequencies(std::size_t d);

struct RationalOrbitCheck {
  BigInt denominator;          // reduced denominator of x0
  bool invariant = true;       // every orbit point has denominator dividing it
  std::size_t steps = 0;
  std::size_t distinct_points = 0;
};

/// Exact orbit of a rational point.
RationalOrbitCheck rational_orbit_check(const FamilySpec& family, const RationalTorusPoint& x0, std::uint64_t seed,
                                        std::size_t steps);

struct DimensionRow {
  double omega = 0.0;
  std::vector<double> mass;         // sigma(B(omega, r)) per radius
  std::vector<double> kernel_mass;  // same for the suspension measure
  double slope = 0.0;               // least-squares slope of log mass vs log r
  double kernel_slope = 0.0;
  std::optional<double> floor;
};

struct DimensionScan {
  std::vector<double> radii;
  std::vector<DimensionRow> rows;
  std::optional<double> floor;  // 2 min{1, 1 - chi_plus / lambda}
};

/// Radii 2^-4 .. 2^-12.
std::vector<double> default_radii();

/// Throws std::invalid_argument for fewer than 3 radii.
DimensionScan local_dimension_scan(const SpectralEstimate& spectral, std::span<const double> omega_grid,
                                   std::span<const double> radii, std::optional<double> chi_plus = {},
                                   std::optional<double> lambda = {});

}  // namespace sadic
