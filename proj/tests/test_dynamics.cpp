#include <doctest.h>

#include <numbers>

#include "oracle.hpp"
#include "sadic/dynamics.hpp"

using namespace sadic;

namespace {

FamilySpec fibonacci_family() {
  FamilySpec f;
  f.name = "fib";
  f.substitutions = {Substitution(2, {{0, 1}, {0}})};
  f.probs = {1.0};
  return f;
}

SpectralEstimate toy_spectrum(std::size_t grid, double value) {
  SpectralEstimate s;
  s.correlations = {1.0};
  for (std::size_t j = 0; j < grid; ++j) {
    s.omega.push_back(static_cast<double>(j) / grid);
    s.density.push_back(value);
  }
  return s;
}

}  // namespace

TEST_CASE("directive frequencies") {
  const auto f = example_family(23);
  auto s = sample_directive(f, 12);
  const auto draws = s.take(100'000);
  std::size_t zeros = 0;
  for (auto i : draws) zeros += i == 0;
  const double freq = zeros / 1e5;
  CHECK(freq >= 0.49);
  CHECK(freq <= 0.51);
  // chi-square with one degree of freedom; p > 1e-4 means statistic < 15.1
  const double e = 5e4;
  const double chi2 = (zeros - e) * (zeros - e) / e + ((1e5 - zeros) - e) * ((1e5 - zeros) - e) / e;
  CHECK(chi2 < 15.1);
}

TEST_CASE("orbit words") {
  const auto fib = fibonacci_family();
  const DirectiveStream s(fib, 0);
  const auto w = generate_orbit_word(fib, s, std::nullopt, 0, 8);
  CHECK(w.letters == Word{0, 1, 0, 0, 1, 0, 1, 0});
  CHECK(generate_orbit_word(fib, s, 0, 1, 8).letters == Word{1});

  // Against the naive expansion of the same directive.
  const auto f = example_family(2);
  const DirectiveStream ds(f, 3);
  const auto word = generate_orbit_word(f, ds, 4, 0, 5000);
  std::vector<Substitution> list;
  for (auto i : word.directive) list.push_back(f.substitutions[i]);
  CHECK(word.directive.size() == 4);
  const auto full = oracle::naive_iterate(list, 0);
  CHECK(word.letters == Word(full.begin(), full.begin() + std::min<std::size_t>(5000, full.size())));
}

TEST_CASE("orbit words are prefix stable") {
  // zeta_m o zeta_m' is left proper, so deeper words extend shallower ones.
  const auto f = example_family(3);
  const DirectiveStream ds(f, 9);
  for (std::size_t depth = 2; depth < 6; ++depth) {
    const auto a = generate_orbit_word(f, ds, depth, 0, 3000);
    const auto b = generate_orbit_word(f, ds, depth + 2, 0, 6000);
    REQUIRE(b.letters.size() >= a.letters.size());
    CHECK(Word(b.letters.begin(), b.letters.begin() + a.letters.size()) == a.letters);
  }
}

TEST_CASE("letter frequencies follow the supertile counts") {
  // The prefix is a run of level-(depth-1) supertiles, one per letter of
  // the top image; their letter counts are columns of the matrix product.
  const auto f = example_family(23);
  for (std::uint64_t seed : {1, 2, 3}) {
    const DirectiveStream ds(f, seed);
    const auto w = generate_orbit_word(f, ds, std::nullopt, 0, 1'000'000);
    REQUIRE(w.depth >= 2);
    std::vector<double> freq(3, 0.0);
    for (auto a : w.letters) freq[a] += 1.0 / w.letters.size();

    IntMatrix p = IntMatrix::identity(3);
    for (std::size_t j = 0; j + 1 < w.depth; ++j) p = p * substitution_matrix(f.substitutions[w.directive[j]]);
    Eigen::Vector3d counts = Eigen::Vector3d::Zero();
    for (auto c : f.substitutions[w.directive[w.depth - 1]].image(0)) {
      const Eigen::Vector3d tile = p.to_double().col(c);
      if (counts.sum() + tile.sum() > static_cast<double>(w.letters.size())) break;
      counts += tile;
    }
    counts /= counts.sum();
    for (int i = 0; i < 3; ++i) CHECK(std::abs(freq[i] - counts[i]) <= 0.01 * counts[i]);
  }
}

TEST_CASE("supertile marks") {
  const auto f = example_family(2);
  const DirectiveStream ds(f, 4);
  const auto w = generate_orbit_word(f, ds, 5, 0, 10'000, 2);
  REQUIRE(w.tile_marks.size() == w.letters.size());
  std::vector<Substitution> top{f.substitutions[w.directive[0]], f.substitutions[w.directive[1]]};
  const auto tile = compose_all(top);
  for (std::size_t j = 0; j < w.letters.size(); ++j) {
    if (w.tile_marks[j] < 0) continue;
    const auto& img = tile.image(static_cast<Letter>(w.tile_marks[j]));
    const std::size_t len = std::min(img.size(), w.letters.size() - j);
    CHECK(Word(w.letters.begin() + j, w.letters.begin() + j + len) == Word(img.begin(), img.begin() + len));
  }
  CHECK(w.tile_marks[0] >= 0);
}

TEST_CASE("spectral kernel") {
  CHECK(spectral_kernel(0.0) == 1.0);
  CHECK(std::abs(spectral_kernel(1.0)) < 1e-30);
  CHECK(spectral_kernel(0.5) == doctest::Approx(4 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-14));
  CHECK(spectral_kernel(1e-12) == doctest::Approx(1.0));
}

TEST_CASE("periodic word has its mass at one half") {
  OrbitWord w;
  for (int j = 0; j < 20'000; ++j) w.letters.push_back(static_cast<Letter>(j % 2));
  const auto s = estimate_spectral_measure(w, TestFunction{0, 0, true}, 200, 1 << 12);
  const auto peak = std::max_element(s.density.begin(), s.density.end()) - s.density.begin();
  CHECK(s.omega[peak] == doctest::Approx(0.5));
  CHECK(s.correlations[0].real() == doctest::Approx(0.25));
  CHECK(s.correlations[1].real() == doctest::Approx(-0.25).epsilon(1e-3));

  const auto u = estimate_spectral_measure(w, TestFunction{0, 0, false}, 200, 1 << 12);
  CHECK(u.correlations[0].real() == doctest::Approx(0.5));
  CHECK(u.mean == doctest::Approx(0.5));
}

TEST_CASE("spectral estimate invariants") {
  const auto f = example_family(3);
  const DirectiveStream ds(f, 2);
  const auto w = generate_orbit_word(f, ds, std::nullopt, 0, 50'000);
  const std::size_t K = 200;
  const auto s = estimate_spectral_measure(w, TestFunction{1, 0, true}, K);
  const double c0 = s.correlations[0].real();
  for (const auto& c : s.correlations) CHECK(std::abs(c) <= c0 + 1e-15);
  for (double d : s.density) CHECK(d >= -1e-8);

  // Toeplitz matrix of the correlations is positive semidefinite.
  const std::size_t n = 64;
  Eigen::MatrixXcd t(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t(i, j) = i >= j ? s.correlations[i - j] : std::conj(s.correlations[j - i]);
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(t).eigenvalues().minCoeff() >= -1e-8);

  // Trapezoid integral over the periodic grid equals sigma(0).
  double integral = 0;
  for (double d : s.density) integral += d / s.density.size();
  CHECK(std::abs(integral - c0) <= 0.02 * c0);

  CHECK_THROWS_AS(estimate_spectral_measure(w, TestFunction{1, 0, true}, 5000), std::invalid_argument);
  CHECK_THROWS_AS(estimate_spectral_measure(w, TestFunction{1, 2, true}, 100), std::invalid_argument);
}

TEST_CASE("Weyl sums") {
  FamilySpec id;
  id.substitutions = {Substitution::identity(3)};
  id.probs = {1.0};
  const auto freqs = default_weyl_frequencies(3);
  CHECK(freqs.size() == 7);
  const std::vector<std::size_t> ks{1, 2};
  const auto r = weyl_test(id, TorusPoint({0.1, 0.2, 0.3}), 0, 1000, freqs, ks);
  for (const auto& row : r.rows) CHECK(std::abs(row.weyl_mod - 1.0) < 1e-12);

  const auto z = weyl_test(example_family(23), TorusPoint({std::sqrt(2.0) - 1, std::sqrt(3.0) - 1, std::sqrt(5.0) - 2}),
                           0, 20'000, freqs, ks);
  CHECK(z.max_mod(1) < 0.1);
  CHECK(z.max_mod(2) < 0.1);
}

TEST_CASE("rational orbits keep their denominator") {
  const RationalTorusPoint x0{{1, 2, 3}, 7};
  const auto r = rational_orbit_check(example_family(23), x0, 5, 2000);
  CHECK(r.invariant);
  CHECK(r.denominator == 7);
  CHECK(r.distinct_points <= 343);
  CHECK(r.steps == 2000);
}

TEST_CASE("dimension scan toys") {
  const auto radii = default_radii();
  CHECK(radii.size() == 9);
  // Lebesgue density: mass 2r, slope 1.
  const auto flat = local_dimension_scan(toy_spectrum(1 << 14, 1.0), std::vector<double>{0.2, 0.5, 0.8}, radii);
  for (const auto& row : flat.rows) CHECK(row.slope == doctest::Approx(1.0).epsilon(1e-3));

  // A single atom: mass is constant in r, slope 0.
  const std::size_t grid = 1 << 16;
  auto atom = toy_spectrum(grid, 0.0);
  atom.density[grid / 4] = grid;
  const auto scan = local_dimension_scan(atom, std::vector<double>{0.25}, radii);
  CHECK(std::abs(scan.rows[0].slope) < 1e-6);

  const auto with_floor = local_dimension_scan(atom, std::vector<double>{0.25}, radii, 1.0, 4.0);
  REQUIRE(with_floor.floor);
  CHECK(*with_floor.floor == doctest::Approx(1.5));

  const std::vector<double> two{0.1, 0.2};
  CHECK_THROWS_AS(local_dimension_scan(atom, std::vector<double>{0.25}, two), std::invalid_argument);
}
