#include <doctest.h>

#include <cstdlib>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "sadic/family.hpp"
#include "sadic/lyapunov.hpp"

using namespace sadic;

namespace {

FamilySpec weights(std::vector<double> p) {
  FamilySpec f;
  f.name = "weights";
  for (std::size_t i = 0; i < p.size(); ++i) f.substitutions.push_back(Substitution::identity(2));
  f.probs = std::move(p);
  return f;
}

FamilySpec single(Substitution s) {
  FamilySpec f;
  f.substitutions = {std::move(s)};
  f.probs = {1.0};
  return f;
}

Substitution parse(const char* text) { return parse_family(std::string("[substitution s]\n") + text).substitutions[0]; }

// Two random members with nonzero determinants.
FamilySpec random_family(std::mt19937_64& gen) {
  const std::size_t d = 2 + gen() % 3;
  FamilySpec f;
  while (f.substitutions.size() < 2) {
    auto s = oracle::random_substitution(gen, d, 6);
    if (substitution_matrix(s).determinant() != 0) f.substitutions.push_back(std::move(s));
  }
  const double p = 0.2 + 0.6 * std::uniform_real_distribution<double>(0, 1)(gen);
  f.probs = {p, 1 - p};
  return f;
}

}  // namespace

TEST_CASE("diagonal products") {
  // Each coordinate grows independently; the top exponent is the larger mean.
  Eigen::MatrixXd a = Eigen::Vector2d(3.0, 0.5).asDiagonal(), b = Eigen::Vector2d(0.5, 2.0).asDiagonal();
  const std::vector<Eigen::MatrixXd> gens{a, b};
  const auto w = weights({0.5, 0.5});
  EstimatorOptions opt;
  opt.n_steps = 20'000;
  opt.n_trials = 32;
  const auto e = estimate_top_exponent(gens, w, opt);
  const double expected = 0.5 * (std::log(3.0) + std::log(0.5));
  CHECK(std::abs(e.value - expected) <= 4 * e.stderr_ + 1e-3);

  const auto sp = estimate_exponent_spectrum(gens, w, opt);
  REQUIRE(sp.exponents.size() == 2);
  CHECK(std::abs(sp.exponents[1].value - 0.0) <= 4 * sp.exponents[1].stderr_ + 1e-3);
  CHECK(sp.exponents[0].value >= sp.exponents[1].value);
}

TEST_CASE("Fibonacci lambda is log of the golden ratio") {
  const auto f = single(parse("0 -> 0 1\n1 -> 0\n"));
  EstimatorOptions opt;
  opt.n_steps = 2000;
  opt.n_trials = 4;
  const auto e = estimate_lambda(f, opt);
  CHECK(e.value == doctest::Approx(std::log(std::numbers::phi)).epsilon(1e-3));
  CHECK(e.method == EstimateMethod::norm_growth);
}

TEST_CASE("exponents sum to the mean log determinant") {
  FamilySpec f;
  f.substitutions = {parse("0 -> 0 0 1\n1 -> 0 1 1\n"), parse("0 -> 0 1\n1 -> 0\n")};
  f.probs = {0.5, 0.5};
  EstimatorOptions opt;
  opt.n_steps = 4000;
  opt.n_trials = 32;
  const auto sp = estimate_exponent_spectrum(f, opt);
  // |det| = 3 and 1
  CHECK(std::abs(sp.sum.value - 0.5 * std::log(3.0)) <= 3 * sp.sum.stderr_ + 1e-9);
  double total = 0;
  for (const auto& e : sp.exponents) total += e.value;
  CHECK(total == doctest::Approx(sp.sum.value).epsilon(1e-9));
}

TEST_CASE("inverse transposes") {
  const auto f = example_family(5);
  const auto inv = inverse_transposes(f);
  REQUIRE(inv.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const Eigen::MatrixXd st = substitution_matrix(f.substitutions[i]).to_double().transpose();
    CHECK((inv[i] * st - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-9);
  }
}

TEST_CASE("chi for Fibonacci vanishes") {
  const auto f = single(parse("0 -> 0 1\n1 -> 0\n"));
  EstimatorOptions opt;
  opt.n_steps = 3000;
  opt.n_trials = 16;
  const auto chi = estimate_chi(f, opt);
  CHECK(chi.value > -1e-9);
  CHECK(chi.value < 0.02);
}

TEST_CASE("exponent inequalities on fuzzed families") {
  std::mt19937_64 gen(2024);
  EstimatorOptions opt;
  opt.n_steps = 2000;
  opt.n_trials = 32;
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = random_family(gen);
    CAPTURE(f.to_text());
    opt.seed = static_cast<std::uint64_t>(trial);
    const auto chi = estimate_chi(f, opt);
    const auto lambda = estimate_lambda(f, opt);
    const double sigma = std::hypot(chi.stderr_, 0.5 * lambda.stderr_);
    CHECK(chi.value >= -3 * chi.stderr_);
    CHECK(chi.value <= 0.5 * lambda.value + 3 * sigma);
  }
}

TEST_CASE("finite-k bounds sit above chi") {
  const auto f = example_family(3);
  EstimatorOptions opt;
  opt.n_steps = 2000;
  opt.n_trials = 32;
  const auto chi = estimate_chi(f, opt);
  const std::vector<std::size_t> ks{1, 2, 4};
  const auto sweep = finite_k_sweep(f, ks, 128, 5);
  REQUIRE(sweep.bounds.size() == 3);
  for (const auto& b : sweep.bounds) {
    CHECK(b.method == EstimateMethod::finite_k_bound);
    CHECK(b.upper3() >= chi.lower3());
  }
  for (const auto& b : sweep.bounds) CHECK(sweep.bounds[sweep.best].value <= b.value);
  CHECK_THROWS(finite_k_upper_bound(f, 0, 10));
}

TEST_CASE("pointwise trace") {
  const auto f = example_family(3);
  const auto r = pointwise_upper_exponent(f, 1, TorusPoint({0.3, 0.1, 0.7}), 400, 0.1);
  REQUIRE(r.trace.size() == 400);
  double tail_max = -1e300;
  for (std::size_t n = 360; n < 400; ++n) tail_max = std::max(tail_max, r.trace[n]);
  CHECK(r.estimate.value == doctest::Approx(tail_max));
  CHECK(r.estimate.method == EstimateMethod::pointwise);
}

TEST_CASE("estimates are reproducible and independent of the thread count") {
  const auto f = example_family(4);
  EstimatorOptions opt;
  opt.n_steps = 500;
  opt.n_trials = 8;
  opt.seed = 77;
  const auto a = estimate_chi(f, opt);
  setenv("SADIC_THREADS", "1", 1);
  const auto b = estimate_chi(f, opt);
  unsetenv("SADIC_THREADS");
  CHECK(a.per_trial == b.per_trial);
  CHECK(a.value == b.value);
}

TEST_CASE("bad options") {
  const auto f = example_family(4);
  EstimatorOptions opt;
  opt.burn_in = 1.0;
  CHECK_THROWS_AS(estimate_lambda(f, opt), std::invalid_argument);
  opt.burn_in = 0.1;
  opt.n_steps = 0;
  CHECK_THROWS_AS(estimate_lambda(f, opt), std::invalid_argument);
}
