#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "sadic/family.hpp"
#include "sadic/trig_matrix.hpp"

using namespace sadic;

namespace {

std::vector<double> random_point(std::mt19937_64& gen, std::size_t d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> t(d);
  for (auto& x : t) x = u(gen);
  return t;
}

double max_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("trig matrix agrees with the per-occurrence definition") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + trial % 3;
    const auto s = oracle::random_substitution(gen, d, 8);
    const auto t = random_point(gen, d);
    CHECK(max_diff(TrigPolyMatrix(s).evaluate(TorusPoint(t)), oracle::trig_matrix(s, t)) < 1e-12);
  }
  const auto z = example_substitution(23);
  std::vector<double> t{0.3141, 0.2718, 0.5772};
  CHECK(max_diff(TrigPolyMatrix(z).evaluate(TorusPoint(t)), oracle::trig_matrix(z, t)) < 1e-10);
  const auto k = shifted_substitution(26, 7);
  CHECK(max_diff(TrigPolyMatrix(k).evaluate(TorusPoint(t)), oracle::trig_matrix(k, t)) < 1e-10);
}

TEST_CASE("value at zero is the transposed substitution matrix") {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 2 + trial % 3;
    const auto s = oracle::random_substitution(gen, d, 6);
    const Eigen::MatrixXcd expected = substitution_matrix(s).transpose().to_double().cast<std::complex<double>>();
    CHECK(max_diff(TrigPolyMatrix(s).evaluate(TorusPoint::zero(d)), expected) < 1e-10);
  }
}

TEST_CASE("cocycle property of composition") {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 2 + trial % 3;
    const auto a = oracle::random_substitution(gen, d, 5);
    const auto b = oracle::random_substitution(gen, d, 5);
    const TorusPoint t(random_point(gen, d));
    const TorusPoint t1 = skew_step(substitution_matrix(a), t);
    const Eigen::MatrixXcd lhs = TrigPolyMatrix(compose(a, b)).evaluate(t);
    const Eigen::MatrixXcd rhs = TrigPolyMatrix(b).evaluate(t1) * TrigPolyMatrix(a).evaluate(t);
    CHECK(max_diff(lhs, rhs) < 1e-10);

    const std::vector<Substitution> seq{a, b};
    CHECK(max_diff(cocycle_product(seq, t).full(), lhs) < 1e-10);
  }
}

TEST_CASE("long products stay consistent with the composed substitution") {
  const auto f = example_family(3);
  std::vector<Substitution> seq;
  for (auto i : DirectiveStream(f, 1).take(3)) seq.push_back(f.substitutions[i]);
  const TorusPoint t({0.1234, 0.5678, 0.9012});
  const auto prod = cocycle_product(seq, t);
  const auto composed = compose_all(seq);
  const auto direct = oracle::trig_matrix(composed, t.coords());
  CHECK((prod.full() - direct).norm() / direct.norm() < 1e-9);
}

TEST_CASE("skew step") {
  const IntMatrix s{{2, 1}, {1, 1}};
  const auto t = skew_step(s, TorusPoint({0.25, 0.5}));
  // S^T (1/4, 1/2) = (1, 3/4)
  CHECK(t[0] == 0.0);
  CHECK(t[1] == 0.75);
  CHECK(TorusPoint::reduce(-0.25L) == 0.75);
  CHECK(TorusPoint::reduce(3.0L) == 0.0);

  RationalTorusPoint r{{1, 2}, 5};
  const auto r1 = skew_step(s, r);
  CHECK(r1.denominator == 5);
  CHECK(r1.numerators == std::vector<BigInt>{4, 3});
  CHECK(RationalTorusPoint{{2, 4}, 6}.reduced_denominator() == 3);
}

TEST_CASE("geometric runs") {
  for (double x : {0.0, 0.5, 1e-9, 0.123, 1.0 - 1e-12}) {
    for (std::uint64_t n : {1ull, 2ull, 7ull, 529ull}) {
      std::complex<double> direct = 0;
      for (std::uint64_t j = 0; j < n; ++j) direct += std::polar(1.0, -2 * std::numbers::pi * j * x);
      CHECK(std::abs(geometric_run(x, n) - direct) < 1e-9 * static_cast<double>(n));
    }
  }
}

TEST_CASE("Parseval count identity") {
  std::mt19937_64 gen(21);
  for (const auto& s : {example_substitution(3), shifted_substitution(26, 5), oracle::random_substitution(gen, 4, 6)}) {
    const std::size_t d = s.alphabet_size();
    const TrigPolyMatrix m(s);
    std::vector<double> xs;
    for (int i = 0; i < 20'000; ++i) xs.push_back(m.evaluate(TorusPoint(random_point(gen, d))).squaredNorm());
    const auto ms = mean_std(xs);
    const double exact = frobenius_sq_integral(s).convert_to<double>();
    CHECK(exact == static_cast<double>(s.total_length()));
    CHECK(std::abs(ms.mean - exact) <= 3 * ms.stderr_of_mean + 1e-12);
  }
}

TEST_CASE("trig matrix JSON round trip") {
  const auto s = shifted_substitution(4, 3);
  const TrigPolyMatrix m(s);
  const auto back = TrigPolyMatrix::from_json(m.to_json());
  const TorusPoint t({0.3, 0.7, 0.11});
  CHECK(max_diff(back.evaluate(t), m.evaluate(t)) < 1e-14);
  CHECK(m.monomial_count(0, 1) == 16);
  CHECK(m.expanded_entry(0, 2) == std::vector<std::vector<std::uint64_t>>{{3, 0, 0}});
}

TEST_CASE("accumulator matches the direct product") {
  const auto f = example_family(23);
  const SpectralCocycle c(f.substitutions);
  CHECK(c.unimodular());
  const TorusPoint t({0.41, 0.29, 0.83});
  CocycleAccumulator acc(c, t);
  Eigen::MatrixXcd direct = Eigen::MatrixXcd::Identity(3, 3);
  TorusPoint p = t;
  for (std::size_t i : {0, 1, 1, 0}) {
    acc.push(i);
    direct = c.evaluate(i, p) * direct;
    p = c.step(i, p);
  }
  const Eigen::MatrixXcd got = acc.normalized() * std::exp(acc.log_norm());
  CHECK((got - direct).norm() / direct.norm() < 1e-12);
  CHECK(acc.point().coords() == p.coords());
}
