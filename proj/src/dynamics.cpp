#include "sadic/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <set>
#include <stdexcept>

#include <fftw3.h>

#include "sadic/detail/parallel.hpp"
#include "sadic/numerics.hpp"

namespace sadic {

namespace {

struct FftwDeleter {
  void operator()(double* p) const { fftw_free(p); }
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

template <class T>
std::unique_ptr<T[], FftwDeleter> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (!p) throw std::bad_alloc();
  return std::unique_ptr<T[], FftwDeleter>(p);
}

// Real forward DFT of x (length n); returns the n/2 + 1 complex outputs.
std::vector<std::complex<double>> real_dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  auto in = fftw_buffer<double>(n);
  auto out = fftw_buffer<fftw_complex>(n / 2 + 1);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
  std::copy(x.begin(), x.end(), in.get());
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  std::vector<std::complex<double>> y(n / 2 + 1);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = {out[i][0], out[i][1]};
  return y;
}

// Inverse of real_dft, unnormalized.
std::vector<double> inverse_real_dft(const std::vector<std::complex<double>>& y, std::size_t n) {
  auto in = fftw_buffer<fftw_complex>(n / 2 + 1);
  auto out = fftw_buffer<double>(n);
  for (std::size_t i = 0; i < y.size(); ++i) {
    in[i][0] = y[i].real();
    in[i][1] = y[i].imag();
  }
  fftw_plan plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return std::vector<double>(out.get(), out.get() + n);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double slope_of(std::span<const double> radii, std::span<const double> mass) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (mass[i] > 0) {
      xs.push_back(std::log(radii[i]));
      ys.push_back(std::log(mass[i]));
    }
  if (xs.size() < 2) return std::nan("");
  const double mx = pairwise_sum(xs) / static_cast<double>(xs.size());
  const double my = pairwise_sum(ys) / static_cast<double>(ys.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : std::nan("");
}

}  // namespace

OrbitWord generate_orbit_word(const FamilySpec& family, const DirectiveStream& stream, std::optional<std::size_t> depth,
                              Letter b, std::size_t N, std::optional<std::size_t> mark_level, std::size_t max_depth) {
  family.validate();
  if (b >= family.alphabet_size()) throw std::invalid_argument("generate_orbit_word: letter out of range");
  OrbitWord out;
  std::vector<Substitution> list;
  const auto extend = [&] {
    out.directive.push_back(stream.index_at(out.directive.size()));
    list.push_back(family.substitutions[out.directive.back()]);
  };
  if (depth) {
    while (list.size() < *depth) extend();
  } else {
    std::size_t need = std::max<std::size_t>(N, 1);
    if (mark_level) while (list.size() < *mark_level) extend();
    while (composed_length(list, b) < need) {
      if (list.size() >= max_depth) throw std::runtime_error("generate_orbit_word: depth limit reached before N letters");
      extend();
    }
  }
  out.depth = list.size();
  out.mark_level = mark_level;

  std::vector<const Substitution*> ptrs;
  for (const auto& s : list) ptrs.push_back(&s);
  WordStream ws(std::move(ptrs), b, mark_level);
  out.letters.reserve(std::min<std::uint64_t>(N, composed_length(list, b)));
  while (out.letters.size() < N) {
    const auto c = ws.next();
    if (!c) break;
    out.letters.push_back(*c);
    if (mark_level) out.tile_marks.push_back(ws.last_tile_start());
  }
  return out;
}

SpectralEstimate estimate_spectral_measure(const OrbitWord& word, const TestFunction& f, std::size_t K,
                                           std::size_t grid) {
  const std::size_t N = word.letters.size();
  if (N == 0) throw std::invalid_argument("estimate_spectral_measure: empty word");
  if (10 * K >= N) throw std::invalid_argument("estimate_spectral_measure: K must be below N/10");
  if (f.level > 0 && (!word.mark_level || *word.mark_level != f.level))
    throw std::invalid_argument("estimate_spectral_measure: word lacks supertile marks for level " +
                                std::to_string(f.level));

  SpectralEstimate est;
  est.f = f;
  est.N = N;
  std::vector<double> x(N);
  for (std::size_t j = 0; j < N; ++j) {
    const bool hit = f.level == 0 ? word.letters[j] == f.letter : word.tile_marks[j] == static_cast<int>(f.letter);
    x[j] = hit ? 1.0 : 0.0;
  }
  est.mean = pairwise_sum(x) / static_cast<double>(N);
  if (f.centered)
    for (auto& v : x) v -= est.mean;

  // Autocorrelation by zero-padded FFT.
  const std::size_t n = next_pow2(2 * N);
  x.resize(n, 0.0);
  auto spec = real_dft(x);
  for (auto& c : spec) c = std::norm(c);
  const auto ac = inverse_real_dft(spec, n);
  est.correlations.resize(K + 1);
  for (std::size_t k = 0; k <= K; ++k)
    est.correlations[k] = ac[k] / (static_cast<double>(n) * static_cast<double>(N));

  // Fejer density on j / M: sum_{|k| <= K} (1 - |k|/(K+1)) c_k e^{-2 pi i k w}.
  const std::size_t M = std::max(grid, next_pow2(2 * K + 2));
  std::vector<double> taps(M, 0.0);
  for (std::size_t k = 0; k <= K; ++k) {
    const double w = 1.0 - static_cast<double>(k) / static_cast<double>(K + 1);
    taps[k] = w * est.correlations[k].real();
    if (k > 0) taps[M - k] = taps[k];
  }
  const auto dft = real_dft(taps);
  est.omega.resize(M);
  est.density.resize(M);
  for (std::size_t j = 0; j < M; ++j) {
    est.omega[j] = static_cast<double>(j) / static_cast<double>(M);
    // The taps are even, so the transform is real; use conjugate symmetry
    // for the upper half.
    est.density[j] = j <= M / 2 ? dft[j].real() : dft[M - j].real();
  }
  return est;
}

double spectral_kernel(double omega) {
  const double x = std::numbers::pi * omega;
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 3.0;
  const double s = std::sin(x) / x;
  return s * s;
}

double WeylReport::max_mod(std::size_t subsample) const {
  double m = 0;
  for (const auto& r : rows)
    if (r.subsample == subsample) m = std::max(m, r.weyl_mod);
  return m;
}

std::vector<std::vector<long long>> default_weyl_frequencies(std::size_t d) {
  std::vector<std::vector<long long>> out;
  for (std::size_t i = 0; i < d; ++i)
    for (long long s : {1LL, -1LL}) {
      std::vector<long long> e(d, 0);
      e[i] = s;
      out.push_back(e);
    }
  out.emplace_back(d, 1);
  return out;
}

WeylReport weyl_test(const FamilySpec& family, const TorusPoint& x0, std::uint64_t seed, std::size_t N,
                     std::span<const std::vector<long long>> freqs, std::span<const std::size_t> subsamples) {
  family.validate();
  if (x0.dim() != family.alphabet_size()) throw std::invalid_argument("weyl_test: dimension mismatch");
  for (const auto& n : freqs) {
    if (n.size() != x0.dim()) throw std::invalid_argument("weyl_test: frequency has the wrong dimension");
    if (std::all_of(n.begin(), n.end(), [](long long v) { return v == 0; }))
      throw std::invalid_argument("weyl_test: zero frequency");
  }
  const auto mats = family.matrices();
  const DirectiveStream stream(family, seed);
  std::size_t kmax = 1;
  for (auto k : subsamples) {
    if (k == 0) throw std::invalid_argument("weyl_test: subsampling step must be positive");
    kmax = std::max(kmax, k);
  }

  // One orbit of length kmax * N serves every subsampling step.
  std::vector<TorusPoint> orbit;
  orbit.reserve(kmax * N);
  bool unimodular = true;
  for (const auto& m : mats) unimodular = unimodular && abs(m.determinant()) == 1;
  CounterRng jitter(seed, streams::kAux);
  TorusPoint x = x0;
  for (std::size_t j = 0; j < kmax * N; ++j) {
    orbit.push_back(x);
    x = skew_step(mats[stream.index_at(j)], x);
    if (!unimodular) {
      // Same noise as the cocycle estimators: keeps dyadic orbits of
      // non-invertible toral maps from collapsing onto 0.
      std::vector<double> c = x.coords();
      for (auto& v : c) v = TorusPoint::reduce(static_cast<long double>(v) + std::ldexp(jitter.uniform(), -52));
      x = TorusPoint(std::move(c));
    }
  }

  WeylReport rep;
  for (auto k : subsamples)
    for (const auto& n : freqs) rep.rows.push_back({n, k, N, 0.0});
  parallel_for(rep.rows.size(), [&](std::size_t r) {
    auto& row = rep.rows[r];
    KahanSum re, im;
    for (std::size_t j = 0; j < N; ++j) {
      const auto& p = orbit[j * row.subsample];
      long double phase = 0;
      for (std::size_t i = 0; i < p.dim(); ++i) phase += static_cast<long double>(row.n[i]) * p[i];
      phase -= std::floor(phase);
      const double a = static_cast<double>(2 * std::numbers::pi_v<long double> * phase);
      re.add(std::cos(a));
      im.add(std::sin(a));
    }
    row.weyl_mod = std::hypot(re.value(), im.value()) / static_cast<double>(N);
  });
  return rep;
}

RationalOrbitCheck rational_orbit_check(const FamilySpec& family, const RationalTorusPoint& x0, std::uint64_t seed,
                                        std::size_t steps) {
  family.validate();
  if (x0.numerators.size() != family.alphabet_size())
    throw std::invalid_argument("rational_orbit_check: dimension mismatch");
  const auto mats = family.matrices();
  const DirectiveStream stream(family, seed);
  RationalOrbitCheck out;
  out.denominator = x0.reduced_denominator();
  std::set<std::vector<BigInt>> seen;
  RationalTorusPoint x = x0;
  for (auto& v : x.numerators) {
    v %= x.denominator;
    if (v < 0) v += x.denominator;
  }
  for (std::size_t j = 0; j <= steps; ++j) {
    if (out.denominator % x.reduced_denominator() != 0) out.invariant = false;
    seen.insert(x.numerators);
    if (j < steps) x = skew_step(mats[stream.index_at(j)], x);
  }
  out.steps = steps;
  out.distinct_points = seen.size();
  return out;
}

std::vector<double> default_radii() {
  std::vector<double> r;
  for (int e = 4; e <= 12; ++e) r.push_back(std::ldexp(1.0, -e));
  return r;
}

DimensionScan local_dimension_scan(const SpectralEstimate& spectral, std::span<const double> omega_grid,
                                   std::span<const double> radii, std::optional<double> chi_plus,
                                   std::optional<double> lambda) {
  if (radii.size() < 3) throw std::invalid_argument("local_dimension_scan needs at least 3 radii");
  for (double r : radii)
    if (!(r > 0 && r <= 0.5)) throw std::invalid_argument("local_dimension_scan: radii must lie in (0, 1/2]");
  const std::size_t M = spectral.density.size();
  if (M < 2) throw std::invalid_argument("local_dimension_scan: empty density");
  const double h = 1.0 / static_cast<double>(M);

  // Cumulative integrals of the piecewise linear density and of the
  // kernel-weighted density over [-1, 2].
  const std::size_t E = 3 * M;
  std::vector<double> dens(E + 1), kdens(E + 1), cum(E + 1, 0.0), kcum(E + 1, 0.0);
  for (std::size_t j = 0; j <= E; ++j) {
    const double w = -1.0 + static_cast<double>(j) * h;
    dens[j] = spectral.density[j % M];
    kdens[j] = spectral_kernel(w) * dens[j];
  }
  for (std::size_t j = 1; j <= E; ++j) {
    cum[j] = cum[j - 1] + 0.5 * h * (dens[j - 1] + dens[j]);
    kcum[j] = kcum[j - 1] + 0.5 * h * (kdens[j - 1] + kdens[j]);
  }
  const auto at = [&](const std::vector<double>& d, const std::vector<double>& c, double w) {
    const double u = std::clamp((w + 1.0) / h, 0.0, static_cast<double>(E));
    const auto i = std::min(static_cast<std::size_t>(u), E - 1);
    const double s = u - static_cast<double>(i);
    return c[i] + h * (d[i] * s + 0.5 * (d[i + 1] - d[i]) * s * s);
  };

  DimensionScan scan;
  scan.radii.assign(radii.begin(), radii.end());
  if (chi_plus && lambda && *lambda > 0) scan.floor = 2 * std::min(1.0, 1.0 - *chi_plus / *lambda);
  for (double w0 : omega_grid) {
    const double w = w0 - std::floor(w0);
    DimensionRow row;
    row.omega = w0;
    for (double r : radii) {
      row.mass.push_back(at(dens, cum, w + r) - at(dens, cum, w - r));
      row.kernel_mass.push_back(at(kdens, kcum, w + r) - at(kdens, kcum, w - r));
    }
    row.slope = slope_of(radii, row.mass);
    row.kernel_slope = slope_of(radii, row.kernel_mass);
    row.floor = scan.floor;
    scan.rows.push_back(std::move(row));
  }
  return scan;
}

}  // namespace sadic
