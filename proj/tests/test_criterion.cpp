#include <doctest.h>

#include <numbers>
#include <random>

#include "oracle.hpp"
#include "sadic/criterion.hpp"
#include "sadic/mahler.hpp"

using namespace sadic;

namespace {

// log|a_n| + sum log max(1, |r|) with roots from the companion matrix.
double companion_mahler(const std::vector<long long>& c) {
  std::size_t n = c.size() - 1;
  while (c[n] == 0) --n;
  std::size_t low = 0;
  while (c[low] == 0) ++low;
  double m = std::log(std::abs(static_cast<double>(c[n])));
  const std::size_t deg = n - low;
  if (deg == 0) return m;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (std::size_t i = 1; i < deg; ++i) comp(i, i - 1) = 1;
  for (std::size_t i = 0; i < deg; ++i) comp(i, deg - 1) = -static_cast<double>(c[low + i]) / c[n];
  const Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
  for (const auto& r : es.eigenvalues()) m += std::log(std::max(1.0, std::abs(r)));
  return m;
}

IntPoly to_poly(const std::vector<long long>& c) {
  IntPoly p;
  for (auto x : c) p.push_back(x);
  trim(p);
  return p;
}

double shifted_integrand(long long m, long long k, double x) {
  const double s = std::sin(std::numbers::pi * x);
  const double a = std::pow(std::sin(std::numbers::pi * k * x) / s, 2);
  const double b = std::pow(std::sin(std::numbers::pi * (2 * m - k) * x) / s, 2);
  const double tr = 4 + a + b;
  return std::log((tr + std::sqrt(tr * tr - 4 * a * b)) / 2);
}

double mc_log_frobenius(const Substitution& s, std::size_t n, std::uint64_t seed, double& stderr_out) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> xs;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> t(s.alphabet_size());
    for (auto& x : t) x = u(gen);
    xs.push_back(std::log(oracle::trig_matrix(s, t).norm()));
  }
  const auto ms = mean_std(xs);
  stderr_out = ms.stderr_of_mean;
  return ms.mean;
}

const double kClosedForm = 0.5 * std::log(8 * (3 + std::sqrt(5.0)));

}  // namespace

TEST_CASE("Mahler measure special values") {
  CHECK(std::abs(mahler_measure_1d(make_poly({-1, 1})).value) < 1e-12);
  CHECK(std::abs(mahler_measure_1d(make_poly({1, -3, 1})).value - std::log((3 + std::sqrt(5.0)) / 2)) < 1e-9);
  CHECK(std::abs(mahler_measure_quadrature(make_poly({1, -3, 1})).value - std::log((3 + std::sqrt(5.0)) / 2)) < 1e-9);
  CHECK(std::abs(mahler_measure_1d(make_poly({1, 2})).value - std::log(2.0)) < 1e-12);
  CHECK(std::abs(mahler_measure_1d(make_poly({5})).value - std::log(5.0)) < 1e-12);
  CHECK_THROWS_AS(mahler_measure_1d(IntPoly{}), std::domain_error);
  // Cyclotomic: all roots on the unit circle.
  CHECK(std::abs(mahler_measure_quadrature(make_poly({1, 1, 1})).value) < 1e-8);
}

TEST_CASE("Mahler measure on random polynomials") {
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<long long> coef(-10, 10);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<long long> c(1 + 1 + gen() % 8);
    for (auto& x : c) x = coef(gen);
    if (c.back() == 0) c.back() = 1;
    if (c.front() == 0 && c.size() > 1) c.front() = -1;
    CAPTURE(c);
    const auto p = to_poly(c);
    const auto roots = mahler_measure_1d(p);
    CHECK(std::abs(roots.value - mahler_measure_quadrature(p).value) < 1e-6);
    CHECK(std::abs(roots.value - companion_mahler(c)) < 1e-6);
    CHECK(std::abs(roots.value - oracle::midpoint_mahler(c, 1 << 16)) < 2e-3);
  }
}

TEST_CASE("closed-form chi bound") {
  const auto b = example_chi_bound_closed_form();
  CHECK(b.provenance == Provenance::closed_form);
  CHECK(b.value == doctest::Approx(kClosedForm).epsilon(1e-12));
  CHECK(b.value == doctest::Approx(1.8675061862).epsilon(1e-10));
  const double via_mahler = 0.5 * (std::log(16.0) + std::log((3 + std::sqrt(5.0)) / 2));
  CHECK(b.value == doctest::Approx(via_mahler).epsilon(1e-12));
}

TEST_CASE("the closed form bounds the per-substitution integral") {
  for (long long m : {3, 23}) {
    const auto z = example_substitution(m);
    double se = 0;
    const double mc = mc_log_frobenius(z, 2000, static_cast<std::uint64_t>(m), se);
    CHECK(mc <= kClosedForm + 3 * se);
    const auto lib = per_substitution_integral(z, IntegralMethod::monte_carlo, 20'000, 1);
    CHECK(lib.provenance == Provenance::monte_carlo);
    CHECK(lib.value <= kClosedForm + 3 * lib.error);
    CHECK(std::abs(lib.value - mc) <= 4 * std::hypot(se, lib.error));
    CHECK(per_substitution_integral(z).provenance == Provenance::closed_form);
  }
  const Substitution fib(2, {{0, 1}, {0}});
  CHECK_THROWS(per_substitution_integral(fib, IntegralMethod::closed_form));
  CHECK(per_substitution_integral(fib, IntegralMethod::automatic, 2000).provenance == Provenance::monte_carlo);
}

TEST_CASE("shifted bound") {
  for (long long k : {1, 5, 26, 51, 52}) {
    CAPTURE(k);
    const auto b = shifted_chi_bound(26, k);
    CHECK(b.provenance == Provenance::reduced_quadrature);
    CHECK(b.error < 1e-8);
    // Independent midpoint rule on the same reduced integrand.
    const std::size_t n = 1 << 15;
    double sum = 0;
    for (std::size_t j = 0; j < n; ++j) sum += shifted_integrand(26, k, (j + 0.5) / n);
    const double oracle_value = 0.5 * (std::log(4.0) + sum / n);
    CHECK(oracle_value <= b.value + 1e-10);
    CHECK(oracle_value >= b.value - 2 * b.error - 1e-10);
    // A bound for the true integral.
    double se = 0;
    const double mc = mc_log_frobenius(shifted_substitution(26, k), 1500, static_cast<std::uint64_t>(k), se);
    CHECK(mc <= b.value + 3 * se);
    CHECK(per_substitution_integral(shifted_substitution(26, k)).provenance == Provenance::reduced_quadrature);
  }
}

TEST_CASE("recognizers") {
  CHECK(recognize_example(example_substitution(23)) == 23);
  CHECK_FALSE(recognize_example(shifted_substitution(23, 3)));
  CHECK(recognize_shifted(shifted_substitution(26, 5)) == std::pair<long long, long long>{26, 5});
  CHECK_FALSE(recognize_example(Substitution(2, {{0, 1}, {0}})));
  const std::vector<IntMatrix> mats{example_matrix(23), example_matrix(24), example_matrix(23)};
  CHECK(recognize_example_matrices(mats) == 23);
  const std::vector<IntMatrix> one{example_matrix(23)};
  CHECK_FALSE(recognize_example_matrices(one));
}

TEST_CASE("verdict at the threshold") {
  const auto v23 = criterion_verdict(example_family(23));
  CHECK(v23.verdict == Verdict::certified);
  const double margin = 0.5 * std::log(43.7) - kClosedForm;
  CHECK(std::abs(v23.margin - margin) < 1e-6);
  CHECK(v23.chi_bound.provenance == Provenance::closed_form);
  CHECK(v23.lambda_lower.provenance == Provenance::cone_certificate);
  CHECK(v23.hypotheses.b1.pass);
  CHECK(v23.hypotheses.b2.heuristic);
  CHECK(v23.hypotheses.b3.pass);

  const auto v22 = criterion_verdict(example_family(22));
  CHECK(v22.verdict == Verdict::inconclusive);
  CHECK(v22.margin < 0);

  const auto j = v23.to_json();
  for (const char* key : {"family", "hypotheses", "chi_bound", "lambda_lower", "margin", "verdict"}) CHECK(j.contains(key));
  CHECK(j["verdict"] == "certified");
  for (const char* key : {"B1", "B2", "B3", "proper", "strong_coincidence"}) CHECK(j["hypotheses"].contains(key));
}

TEST_CASE("verdict requires two substitutions") {
  FamilySpec f;
  f.substitutions = {example_substitution(23)};
  f.probs = {1.0};
  CHECK_THROWS_WITH_AS(criterion_verdict(f), doctest::Contains("l >= 2"), std::invalid_argument);
}

TEST_CASE("empirical margins never certify") {
  auto f = example_family(23);
  CriterionConfig cfg;
  cfg.force_empirical = true;
  cfg.integral_samples = 4000;
  cfg.k_list = {1, 2};
  cfg.finite_k_samples = 64;
  const auto v = criterion_verdict(f, cfg);
  CHECK(v.chi_candidates.size() >= 2);
  // The analytic candidate still decides.
  CHECK(v.verdict == Verdict::certified);

  // Without a cone and without recognizable members only Monte Carlo
  // values remain.
  FamilySpec g;
  g.substitutions = {shifted_substitution(3, 1), example_substitution(7)};
  g.probs = {0.5, 0.5};
  cfg.lambda_options.n_steps = 1000;
  cfg.lambda_options.n_trials = 16;
  const auto w = criterion_verdict(g, cfg);
  CHECK(w.verdict == Verdict::inconclusive);
  CHECK(w.lambda_lower.provenance == Provenance::monte_carlo);
}

TEST_CASE("example family reports") {
  const auto r23 = example_family_report(23, ExampleVariant::standard);
  CHECK(r23.certified);
  CHECK(r23.expected_certified);
  CHECK(r23.forward.invariant);
  CHECK(r23.inverse.invariant);
  CHECK(r23.compositions_left_proper);
  CHECK(r23.lambda_upper <= std::log(69.0));

  const auto r3 = example_family_report(3, ExampleVariant::standard);
  CHECK_FALSE(r3.certified);
  CHECK_FALSE(r3.expected_certified);

  const auto r26 = example_family_report(26, ExampleVariant::shifted);
  CHECK(r26.verdicts.size() == 52);
  CHECK(r26.certified);
  CHECK(r26.expected_certified);
}
