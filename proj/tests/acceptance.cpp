// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "oracle.hpp"
#include "sadic/cone.hpp"
#include "sadic/config.hpp"
#include "sadic/criterion.hpp"
#include "sadic/dynamics.hpp"
#include "sadic/lyapunov.hpp"
#include "sadic/mahler.hpp"
#include "sadic/run.hpp"

using namespace sadic;
namespace fs = std::filesystem;

namespace {

const std::string kFamilies = std::string(SADIC_SOURCE_DIR) + "/families/";

const char* kBundled[] = {"fibonacci", "thue_morse", "fib_tribo",   "zeta_m3",     "zeta_m22",    "zeta_m23",
                          "zeta_m26",  "zeta_m35",   "zeta_m26_k1", "zeta_m26_k5", "zeta_m26_k52"};

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("sadic_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

Outcome threshold() {
  Outcome o;
  const double closed = 0.5 * std::log(8 * (3 + std::sqrt(5.0)));
  const double expected = 0.5 * std::log(43.7) - closed;
  std::ostringstream err;
  RunConfig c;
  c.task = Task::criterion;

  auto t0 = std::chrono::steady_clock::now();
  c.family = kFamilies + "zeta_m23.fam";
  c.out = scratch("c1_m23").string();
  const auto r23 = run(c, err);
  const double t23 = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  c.family = kFamilies + "zeta_m22.fam";
  c.out = scratch("c1_m22").string();
  const auto r22 = run(c, err);
  const double t22 = seconds_since(t0);

  const double margin = r23.summary["result"]["margin"].get<double>();
  const double chi = r23.summary["result"]["chi_bound"]["value"].get<double>();
  o.pass = r23.exit_code == kExitOk && r23.summary["result"]["verdict"] == "certified" &&
           std::abs(margin - expected) <= 1e-6 && std::abs(chi - closed) <= 1e-6 &&
           r22.exit_code == kExitInconclusive && r22.summary["result"]["verdict"] == "inconclusive" && t23 < 1.0 &&
           t22 < 1.0;
  o.detail = fmt("m=23 margin %.9f (expected %.9f), m=22 margin %.6f %s, %.3fs + %.3fs", margin, expected,
                 r22.summary["result"]["margin"].get<double>(),
                 r22.summary["result"]["verdict"].get<std::string>().c_str(), t23, t22);
  return o;
}

Outcome shifted() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = example_family_report(26, ExampleVariant::shifted);
  const double t = seconds_since(t0);
  double worst = 1e300;
  for (const auto& v : r.verdicts) worst = std::min(worst, v.margin);
  o.pass = r.certified && r.verdicts.size() == 52 && t < 1.0;
  o.detail = fmt("m=26, k=1..52: %zu verdicts, smallest margin %.6f, %.3fs", r.verdicts.size(), worst, t);
  return o;
}

Outcome cones() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::string failed;
  std::size_t failures = 0;
  for (long long m = 4; m <= 200; ++m) {
    const auto cone = forward_cone(m);
    const std::vector<IntMatrix> mats{example_matrix(m), example_matrix(m + 1)};
    bool ok = cone_invariance_check(cone, mats).invariant;
    if (m >= 8)
      for (const auto& a : mats) ok = ok && expansion_lower_bound(cone, a) >= Rational(19 * m, 10);
    if (!ok) {
      ++failures;
      failed += " forward:" + std::to_string(m);
    }
  }
  for (long long m = 3; m <= 200; ++m) {
    const auto cone = inverse_cone(m);
    const std::vector<IntMatrix> mats{example_matrix(m).inverse_unimodular(), example_matrix(m + 1).inverse_unimodular()};
    const Rational stated = Rational(BigInt(m) * m * m * m + 2 * BigInt(m) * m * m - 5 * m, BigInt(m) * m + 6 * m + 1);
    bool ok = cone_invariance_check(cone, mats).invariant;
    for (const auto& a : mats) ok = ok && expansion_lower_bound(cone, a) >= stated;
    if (!ok) {
      ++failures;
      failed += " inverse:" + std::to_string(m);
    }
  }
  const double t = seconds_since(t0);
  o.pass = failures == 0 && t < 10.0;
  o.detail = fmt("%zu failures%s, %.2fs", failures, failed.empty() ? "" : (" (" + failed.substr(1) + ")").c_str(), t);
  return o;
}

Outcome lyapunov_bracket() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  EstimatorOptions opt;
  opt.n_steps = 10'000;
  opt.n_trials = 64;
  const auto e = estimate_lambda(example_family(23), opt);
  const double t = seconds_since(t0);
  o.pass = e.upper3() >= std::log(43.7) && e.lower3() <= std::log(69.0) && t < 30.0;
  o.detail = fmt("lambda %.6f +- %.2g in [%.4f, %.4f], %.2fs", e.value, 3 * e.stderr_, std::log(43.7), std::log(69.0), t);
  return o;
}

Outcome second_exponent() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  EstimatorOptions opt;
  opt.n_steps = 10'000;
  opt.n_trials = 64;
  const auto sp = estimate_exponent_spectrum(example_family(35), opt);
  const double t = seconds_since(t0);
  const auto& l2 = sp.exponents[1];
  const double floor = std::log(0.9 * 35 * 35) - std::log(105.0);
  double sum = 0, var = 0;
  for (const auto& e : sp.exponents) {
    sum += e.value;
    var += e.stderr_ * e.stderr_;
  }
  const double sigma = std::sqrt(var);
  o.pass = l2.value > 0 && l2.value >= floor - 3 * l2.stderr_ && std::abs(sum) <= 3 * sigma && t < 60.0;
  o.detail = fmt("lambda2 %.6f +- %.2g (floor %.4f), |sum| %.2g <= %.2g, %.2fs", l2.value, 3 * l2.stderr_, floor,
                 std::abs(sum), 3 * sigma, t);
  return o;
}

Outcome inequalities() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  EstimatorOptions opt;
  opt.n_steps = 5000;
  opt.n_trials = 32;
  std::string worst;
  double worst_gap = 1e300;
  auto check = [&](const FamilySpec& f, const std::string& name) {
    const auto chi = estimate_chi(f, opt);
    const auto lambda = estimate_lambda(f, opt);
    const double sigma = std::hypot(chi.stderr_, 0.5 * lambda.stderr_);
    const bool lower = chi.value >= -3 * chi.stderr_;
    const double gap = 0.5 * lambda.value + 3 * sigma - chi.value;
    if (!lower || gap < 0) {
      o.pass = false;
      o.detail += " " + name;
    }
    if (gap < worst_gap) {
      worst_gap = gap;
      worst = name;
    }
  };
  for (const char* name : kBundled) check(load_family(kFamilies + name + ".fam"), name);
  std::mt19937_64 gen(6);
  for (int i = 0; i < 10; ++i) {
    const std::size_t d = 2 + gen() % 3;
    FamilySpec f;
    while (f.substitutions.size() < 2) {
      auto s = oracle::random_substitution(gen, d, 6);
      if (substitution_matrix(s).determinant() != 0) f.substitutions.push_back(std::move(s));
    }
    f.probs = {0.5, 0.5};
    check(f, "fuzz" + std::to_string(i));
  }
  o.detail = (o.pass ? std::string() : "failed:" + o.detail + "; ") +
             fmt("11 bundled + 10 fuzzed families, tightest %s (slack %.4f), %.2fs", worst.c_str(), worst_gap,
                 seconds_since(t0));
  return o;
}

Outcome identities() {
  Outcome o;
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 2 + trial % 3;
    const auto a = oracle::random_substitution(gen, d, 5), b = oracle::random_substitution(gen, d, 5);
    std::vector<double> x(d);
    for (auto& v : x) v = u(gen);
    const TorusPoint t(x);
    const Eigen::MatrixXcd lhs = TrigPolyMatrix(compose(a, b)).evaluate(t);
    const Eigen::MatrixXcd rhs = TrigPolyMatrix(b).evaluate(skew_step(substitution_matrix(a), t)) *
                                 TrigPolyMatrix(a).evaluate(t);
    const Eigen::MatrixXcd at0 = TrigPolyMatrix(a).evaluate(TorusPoint::zero(d));
    const Eigen::MatrixXcd st = substitution_matrix(a).transpose().to_double().cast<std::complex<double>>();
    worst = std::max({worst, (lhs - rhs).cwiseAbs().maxCoeff(), (at0 - st).cwiseAbs().maxCoeff()});
  }
  double worst_z = 0;
  std::size_t subs = 0;
  for (const char* name : kBundled) {
    for (const auto& s : load_family(kFamilies + name + ".fam").substitutions) {
      ++subs;
      const TrigPolyMatrix m(s);
      std::vector<double> xs;
      xs.reserve(100'000);
      for (int i = 0; i < 100'000; ++i) {
        std::vector<double> x(s.alphabet_size());
        for (auto& v : x) v = u(gen);
        xs.push_back(m.evaluate(TorusPoint(x)).squaredNorm());
      }
      const auto ms = mean_std(xs);
      const double z = std::abs(ms.mean - frobenius_sq_integral(s).convert_to<double>()) / ms.stderr_of_mean;
      worst_z = std::max(worst_z, z);
    }
  }
  o.pass = worst <= 1e-10 && worst_z <= 3.0;
  o.detail = fmt("1000 fuzz cases max deviation %.2g; Parseval on %zu substitutions, worst |z| %.2f", worst, subs, worst_z);
  return o;
}

Outcome mahler() {
  Outcome o;
  std::mt19937_64 gen(8);
  std::uniform_int_distribution<long long> coef(-10, 10);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    IntPoly p;
    const std::size_t deg = 1 + gen() % 8;
    for (std::size_t i = 0; i <= deg; ++i) p.push_back(coef(gen));
    if (p.back() == 0) p.back() = 1;
    worst = std::max(worst, std::abs(mahler_measure_1d(p).value - mahler_measure_quadrature(p).value));
  }
  const double m1 = mahler_measure_1d(make_poly({-1, 1})).value;
  const double m2 = mahler_measure_1d(make_poly({1, -3, 1})).value - std::log((3 + std::sqrt(5.0)) / 2);
  o.pass = worst <= 1e-6 && std::abs(m1) <= 1e-9 && std::abs(m2) <= 1e-9;
  o.detail = fmt("100 random polynomials max disagreement %.2g; m(z-1) = %.1g; m(z^2-3z+1) error %.1g", worst, m1, m2);
  return o;
}

Outcome equidistribution() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto f = example_family(23);
  const TorusPoint x0({std::sqrt(2.0) - 1, std::sqrt(3.0) - 1, std::sqrt(5.0) - 2});
  const auto freqs = default_weyl_frequencies(3);
  const std::vector<std::size_t> ks{1, 2, 3};
  const auto rep = weyl_test(f, x0, 0, 100'000, freqs, ks);
  const auto rat = rational_orbit_check(f, RationalTorusPoint{{1, 5, 8}, 13}, 0, 100'000);
  const double t = seconds_since(t0);
  o.pass = rep.max_mod(1) < 0.05 && rat.invariant && rat.denominator == 13 && t < 30.0;
  o.detail = fmt("max W_N %.4f (k=2: %.4f, k=3: %.4f); rational denominator 13 invariant=%s over %zu steps, %.2fs",
                 rep.max_mod(1), rep.max_mod(2), rep.max_mod(3), rat.invariant ? "yes" : "no", rat.steps, t);
  return o;
}

Outcome determinism() {
  Outcome o;
  std::size_t compared = 0;
  for (Task task : {Task::lyapunov, Task::spectrum, Task::chi, Task::cone_verify, Task::weyl, Task::spectral_measure,
                    Task::dimension_scan}) {
    RunConfig c;
    c.task = task;
    c.family = kFamilies + "zeta_m23.fam";
    c.seed = 2024;
    c.n_steps = 1000;
    c.n_trials = 16;
    c.N = 50'000;
    c.K = 500;
    c.n_samples = 32;
    c.integral_samples = 2000;
    c.m_max = 40;
    std::ostringstream err;
    c.out = scratch("c10_a").string();
    const auto a = run(c, err);
    c.out = scratch("c10_b").string();
    const auto b = run(c, err);
    if (a.files.size() != b.files.size()) o.pass = false;
    for (std::size_t i = 0; i < a.files.size() && i < b.files.size(); ++i) {
      if (fs::path(a.files[i]).extension() != ".csv") continue;
      ++compared;
      if (oracle::read_file(a.files[i]) != oracle::read_file(b.files[i])) {
        o.pass = false;
        o.detail += fs::path(a.files[i]).filename().string() + " differs; ";
      }
    }
  }
  o.pass = o.pass && compared > 0;
  o.detail += fmt("%zu CSV files compared byte for byte", compared);
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"threshold reproduction (m=23 certified, m=22 inconclusive)", threshold},
      {"shifted-k variant certifies at m=26", shifted},
      {"exact cone certificates", cones},
      {"Lyapunov bracket for m=23", lyapunov_bracket},
      {"second exponent for m=35", second_exponent},
      {"exponent inequalities", inequalities},
      {"algebraic identities", identities},
      {"Mahler oracle", mahler},
      {"equidistribution", equidistribution},
      {"determinism", determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, body] : criteria) {
    ++index;
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("criterion %2d %s  %s: %s\n", index, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed ? 1 : 0;
}
