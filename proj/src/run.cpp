#include "sadic/run.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sadic/cone.hpp"
#include "sadic/criterion.hpp"
#include "sadic/dynamics.hpp"
#include "sadic/family.hpp"
#include "sadic/hypotheses.hpp"
#include "sadic/lyapunov.hpp"
#include "sadic/mahler.hpp"
#include "sadic/trig_matrix.hpp"

namespace sadic {

namespace {

namespace fs = std::filesystem;

// Shortest round-trip representation; identical inputs give identical bytes.
std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Csv {
 public:
  Csv(const fs::path& path, const std::string& header) : path_(path), out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << header << '\n';
  }
  template <class... Ts>
  void row(const Ts&... cells) {
    std::size_t i = 0;
    ((out_ << (i++ ? "," : "") << cell(cells)), ...);
    out_ << '\n';
  }
  const fs::path& path() const { return path_; }

 private:
  static std::string cell(double x) { return num(x); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <class T>
    requires std::is_integral_v<T>
  static std::string cell(T x) { return std::to_string(x); }

  fs::path path_;
  std::ofstream out_;
};

struct Context {
  const RunConfig& cfg;
  fs::path out;
  std::vector<std::string> files;
  nlohmann::json result;
  int exit_code = kExitOk;

  Csv csv(const std::string& name, const std::string& header) {
    const auto p = out / name;
    files.push_back(p.string());
    return Csv(p, header);
  }
};

FamilySpec family_of(const RunConfig& cfg) {
  auto f = load_family(cfg.family);
  if (cfg.probs) {
    if (cfg.probs->size() != f.size())
      throw std::invalid_argument("probs has " + std::to_string(cfg.probs->size()) + " entries for a family of " +
                                  std::to_string(f.size()));
    f.probs = *cfg.probs;
  }
  f.validate();
  return f;
}

EstimatorOptions estimator_options(const RunConfig& cfg) {
  EstimatorOptions o;
  o.n_steps = cfg.n_steps;
  o.n_trials = cfg.n_trials;
  o.burn_in = cfg.burn_in;
  o.seed = cfg.seed;
  return o;
}

CriterionConfig criterion_config(const RunConfig& cfg) {
  CriterionConfig c;
  c.integral_samples = cfg.integral_samples;
  c.k_list = cfg.k_list;
  c.finite_k_samples = cfg.n_samples;
  c.lambda_options = estimator_options(cfg);
  c.seed = cfg.seed;
  return c;
}

// Fractional parts of square roots of the first d primes.
TorusPoint default_irrational_point(std::size_t d) {
  static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  if (d > std::size(primes)) throw std::invalid_argument("no default point for this dimension; set 'point'");
  std::vector<double> x;
  for (std::size_t i = 0; i < d; ++i) {
    const double r = std::sqrt(static_cast<double>(primes[i]));
    x.push_back(r - std::floor(r));
  }
  return TorusPoint(std::move(x));
}

TorusPoint point_of(const RunConfig& cfg, std::size_t d, bool irrational_default) {
  if (cfg.point.empty()) return irrational_default ? default_irrational_point(d) : TorusPoint::zero(d);
  if (cfg.point.size() != d)
    throw std::invalid_argument("point has " + std::to_string(cfg.point.size()) + " coordinates, expected " +
                                std::to_string(d));
  return TorusPoint(cfg.point);
}

const Substitution& member_of(const RunConfig& cfg, const FamilySpec& f) {
  if (cfg.member >= f.size())
    throw std::invalid_argument("member " + std::to_string(cfg.member) + " is out of range for a family of " +
                                std::to_string(f.size()));
  return f.substitutions[cfg.member];
}

nlohmann::json matrix_json(const IntMatrix& m) {
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    auto r = nlohmann::json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) r.push_back(m(i, j).str());
    rows.push_back(r);
  }
  return rows;
}

nlohmann::json eigen_json(const EigenData& e) {
  auto roots = nlohmann::json::array();
  for (const auto& r : e.roots)
    roots.push_back({{"re", static_cast<double>(r.value.real())},
                     {"im", static_cast<double>(r.value.imag())},
                     {"radius", static_cast<double>(r.radius)},
                     {"multiplicity", r.multiplicity}});
  return {{"roots", roots},
          {"discriminant", e.discriminant.str()},
          {"moduli_distinct", to_string(e.moduli_distinct)},
          {"all_real", to_string(e.all_real)}};
}

nlohmann::json estimate_json(const ExponentEstimate& e) {
  auto j = to_json(e);
  j["ci3"] = {e.lower3(), e.upper3()};
  return j;
}

void write_trials(Context& ctx, const std::string& name, const ExponentEstimate& e) {
  auto csv = ctx.csv(name, "trial,n,log_norm_avg");
  for (std::size_t i = 0; i < e.per_trial.size(); ++i) csv.row(i, e.n_steps, e.per_trial[i]);
}

void task_props(Context& ctx) {
  const auto f = family_of(ctx.cfg);
  auto& r = ctx.result;
  r["name"] = f.name;
  r["alphabet_size"] = f.alphabet_size();
  r["probs"] = f.probs;
  auto members = nlohmann::json::array();
  for (const auto& s : f.substitutions) {
    const auto m = substitution_matrix(s);
    members.push_back({{"name", s.name()},
                       {"rules", s.to_dsl()},
                       {"matrix", matrix_json(m)},
                       {"determinant", m.determinant().str()},
                       {"total_length", s.total_length()},
                       {"primitive_class", s.in_primitive_class()},
                       {"left_proper", is_left_proper(s)},
                       {"right_proper", is_right_proper(s)},
                       {"eigen", eigen_json(eigen_report(m))}});
  }
  r["members"] = members;
  r["hypotheses"] = to_json(hypothesis_report(f));
}

void task_matrix(Context& ctx) {
  const auto f = family_of(ctx.cfg);
  const auto& s = member_of(ctx.cfg, f);
  const auto m = substitution_matrix(s);
  ctx.result["member"] = s.name();
  ctx.result["substitution_matrix"] = matrix_json(m);
  ctx.result["transpose"] = matrix_json(m.transpose());
  ctx.result["trig_matrix"] = TrigPolyMatrix(s).to_json();
}

void task_cocycle_eval(Context& ctx) {
  const auto f = family_of(ctx.cfg);
  const auto& s = member_of(ctx.cfg, f);
  const auto t = point_of(ctx.cfg, f.alphabet_size(), false);
  const auto value = TrigPolyMatrix(s).evaluate(t);
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < value.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < value.cols(); ++j) row.push_back({value(i, j).real(), value(i, j).imag()});
    rows.push_back(row);
  }
  ctx.result["member"] = s.name();
  ctx.result["point"] = t.coords();
  ctx.result["value"] = rows;
  ctx.result["frobenius_norm"] = value.norm();
  ctx.result["next_point"] = skew_step(s, t).coords();
}

void task_lyapunov(Context& ctx) {
  const auto f = family_of(ctx.cfg);
  const auto est = estimate_lambda(f, estimator_options(ctx.cfg));
  ctx.result["lambda"] = estimate_json(est);
  write_trials(ctx, "lyapunov.csv", est);
}

void task_spectrum(Context& ctx) {
  const auto f = family_of(ctx.cfg);
  const auto sp = estimate_exponent_spectrum(f, estimator_options(ctx.cfg));
  auto ex = nlohmann::json::array();
  for (const auto& e : sp.exponents) ex.push_back(estimate_json(e));
  ctx.result["exponents"] = ex;
  ctx.result["sum"] = estimate_json(sp.sum);
  auto csv = ctx.csv("spectrum.csv", "exponent,trial,n,log_norm_avg");
  for (std::size_t i = 0; i < sp.exponents.size(); ++i)
    for (std::size_t t = 0; t < sp.exponents[i].per_trial.size(); ++t)
      csv.row(i + 1, t, sp.exponents[i].n_steps, sp.exponents[i].per_trial[t]);
}

void task_chi(Context& ctx) {
  const auto f = family_of(ctx.cfg);
  const auto opt = estimator_options(ctx.cfg);
  const auto chi = estimate_chi(f, opt);
  const auto lambda = estimate_lambda(f, opt);
  ctx.result["chi"] = estimate_json(chi);
  ctx.result["lambda"] = estimate_json(lambda);
  if (!ctx.cfg.k_list.empty()) {
    const auto sweep = finite_k_sweep(f, ctx.cfg.k_list, ctx.cfg.n_samples, ctx.cfg.seed);
    auto rows = nlohmann::json::array();
    for (std::size_t i = 0; i < sweep.ks.size(); ++i)
      rows.push_back({{"k", sweep.ks[i]}, {"bound", estimate_json(sweep.bounds[i])}});
    ctx.result["finite_k"] = {{"rows", rows}, {"best_k", sweep.ks[sweep.best]}};
  }
  auto ints = nlohmann::json::array();
  double weighted = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto b =
        per_substitution_integral(f.substitutions[i], IntegralMethod::automatic, ctx.cfg.integral_samples,
                                  ctx.cfg.seed + i);
    weighted += f.probs[i] * b.value;
    ints.push_back({{"member", f.substitutions[i].name()},
                    {"value", b.value},
                    {"error", b.error},
                    {"provenance", to_string(b.provenance)}});
  }
  ctx.result["per_substitution_integrals"] = ints;
  ctx.result["weighted_integral"] = weighted;
  ctx.result["checks"] = {{"chi_nonnegative_3sigma", chi.upper3() >= 0},
                          {"chi_below_half_lambda_3sigma",
                           chi.value <= 0.5 * lambda.value + 3 * std::hypot(chi.stderr_, 0.5 * lambda.stderr_)}};
  write_trials(ctx, "chi.csv", chi);
}

void task_mahler(Context& ctx) {
  IntPoly p;
  for (long long c : ctx.cfg.poly) p.push_back(c);
  const auto roots = mahler_measure_1d(p);
  const auto quad = mahler_measure_quadrature(p);
  const auto closed = example_chi_bound_closed_form();
  ctx.result["poly"] = ctx.cfg.poly;
  ctx.result["root_product"] = {{"value", roots.value}, {"error", roots.error}};
  ctx.result["quadrature"] = {{"value", quad.value}, {"error", quad.error}};
  ctx.result["agreement"] = std::abs(roots.value - quad.value);
  ctx.result["example_chi_bound"] = {{"value", closed.value}, {"provenance", to_string(closed.provenance)}};
}

void task_criterion(Context& ctx) {
  const auto f = family_of(ctx.cfg);
  const auto v = criterion_verdict(f, criterion_config(ctx.cfg));
  ctx.result = v.to_json();
  if (v.verdict != Verdict::certified) ctx.exit_code = kExitInconclusive;
}

constexpr long long kForwardExpansionFrom = 8;

void task_cone_verify(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto mode = cfg.cone_mode == "exact" ? ConeMode::exact : ConeMode::sample;
  bool all_ok = true;
  if (cfg.cone == "family") {
    const auto f = family_of(cfg);
    if (!f.cone) throw std::invalid_argument("family file has no [cone] section");
    const auto mats = f.matrices();
    const auto cert = cone_invariance_check(*f.cone, mats, mode, cfg.cone_samples, cfg.seed);
    const auto lb = lambda_lower_from_cone(*f.cone, mats);
    auto csv = ctx.csv("cone.csv", "member,maps_into,expansion_min,expansion_max");
    for (std::size_t i = 0; i < cert.per_matrix.size(); ++i)
      csv.row(f.substitutions[i].name(), cert.per_matrix[i].maps_into ? 1 : 0,
              cert.per_matrix[i].expansion_min.convert_to<double>(),
              cert.per_matrix[i].expansion_max.convert_to<double>());
    ctx.result["invariant"] = cert.invariant;
    ctx.result["sample_failures"] = cert.sample_failures;
    ctx.result["lambda_lower"] = {{"valid", lb.valid}, {"value", lb.value}, {"detail", lb.detail}};
    all_ok = cert.invariant && lb.valid;
  } else {
    const bool inverse = cfg.cone == "inverse";
    auto csv = ctx.csv("cone.csv", "m,invariant,expansion_min,stated_expansion,holds");
    std::size_t failures = 0;
    auto failed = nlohmann::json::array();
    for (long long m = cfg.m_min; m <= cfg.m_max; ++m) {
      const auto cone = inverse ? inverse_cone(m) : forward_cone(m);
      std::vector<IntMatrix> mats{example_matrix(m), example_matrix(m + 1)};
      if (inverse)
        for (auto& a : mats) a = a.inverse_unimodular();
      const auto cert = cone_invariance_check(cone, mats, mode, cfg.cone_samples, cfg.seed);
      Rational lo = expansion_lower_bound(cone, mats[0]);
      if (inverse) {
        // Each inverse has its own asserted bound.
        const Rational la = expansion_lower_bound(cone, mats[0]), lb = expansion_lower_bound(cone, mats[1]);
        lo = std::min(la, lb);
        const bool holds = la >= inverse_expansion_claim_a(m) && lb >= inverse_expansion_claim_b(m);
        csv.row(m, cert.invariant ? 1 : 0, lo.convert_to<double>(), cone.stated_expansion->convert_to<double>(),
                holds ? 1 : 0);
        if (!cert.invariant || !holds) {
          ++failures;
          failed.push_back(m);
        }
      } else {
        lo = std::min(lo, expansion_lower_bound(cone, mats[1]));
        const bool holds = lo >= *cone.stated_expansion;
        csv.row(m, cert.invariant ? 1 : 0, lo.convert_to<double>(), cone.stated_expansion->convert_to<double>(),
                holds ? 1 : 0);
        // 1.9m is only asserted from m = 8 on; below that only invariance counts.
        if (!cert.invariant || (!holds && m >= kForwardExpansionFrom)) {
          ++failures;
          failed.push_back(m);
        }
      }
    }
    ctx.result["cone"] = cfg.cone;
    ctx.result["m_range"] = {cfg.m_min, cfg.m_max};
    ctx.result["failures"] = failures;
    ctx.result["failed_m"] = failed;
    all_ok = failures == 0;
  }
  ctx.result["mode"] = cfg.cone_mode;
  ctx.result["all_pass"] = all_ok;
  if (!all_ok) ctx.exit_code = kExitInconclusive;
}

void task_example_family(Context& ctx) {
  const auto variant = ctx.cfg.variant == "standard" ? ExampleVariant::standard : ExampleVariant::shifted;
  const auto rep = example_family_report(ctx.cfg.m, variant, ctx.cfg.ks, criterion_config(ctx.cfg));
  ctx.result = rep.to_json();
  if (!rep.certified) ctx.exit_code = kExitInconclusive;
}

std::string vec_label(const std::vector<long long>& n) {
  std::string s;
  for (std::size_t i = 0; i < n.size(); ++i) s += (i ? ";" : "") + std::to_string(n[i]);
  return s;
}

void task_weyl(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto f = family_of(cfg);
  const auto x0 = point_of(cfg, f.alphabet_size(), true);
  const auto freqs = default_weyl_frequencies(f.alphabet_size());
  const auto rep = weyl_test(f, x0, cfg.seed, cfg.N, freqs, cfg.subsamples);
  auto rows = nlohmann::json::array();
  for (std::size_t k : cfg.subsamples) {
    auto csv = ctx.csv(k == 1 ? "weyl.csv" : "weyl_k" + std::to_string(k) + ".csv", "n_vec,N,weyl_mod");
    for (const auto& r : rep.rows)
      if (r.subsample == k) csv.row(vec_label(r.n), r.N, r.weyl_mod);
    rows.push_back({{"subsample", k}, {"max_weyl_mod", rep.max_mod(k)}});
  }
  ctx.result["x0"] = x0.coords();
  ctx.result["N"] = cfg.N;
  ctx.result["max_by_subsample"] = rows;
  if (!cfg.rational_point.empty()) {
    RationalTorusPoint q;
    for (long long v : cfg.rational_point) q.numerators.emplace_back(v);
    q.denominator = cfg.denominator;
    const auto chk = rational_orbit_check(f, q, cfg.seed, cfg.N);
    ctx.result["rational_orbit"] = {{"denominator", chk.denominator.str()},
                                    {"invariant", chk.invariant},
                                    {"steps", chk.steps},
                                    {"distinct_points", chk.distinct_points}};
  }
}

SpectralEstimate spectral_of(Context& ctx, const FamilySpec& f, OrbitWord& word) {
  const auto& cfg = ctx.cfg;
  const DirectiveStream stream(f, cfg.seed);
  std::optional<std::size_t> mark;
  if (cfg.level > 0) mark = cfg.level;
  word = generate_orbit_word(f, stream, std::nullopt, 0, cfg.N, mark);
  const auto est = estimate_spectral_measure(word, {cfg.letter, cfg.level, cfg.centered}, cfg.K, cfg.grid);
  double lo = est.density.front(), integral = 0;
  for (double d : est.density) {
    lo = std::min(lo, d);
    integral += d;
  }
  integral /= static_cast<double>(est.density.size());
  ctx.result["word"] = {{"N", word.letters.size()}, {"depth", word.depth}};
  ctx.result["test_function"] = {{"letter", cfg.letter}, {"level", cfg.level}, {"centered", cfg.centered}};
  ctx.result["mean"] = est.mean;
  ctx.result["corr0"] = est.correlations.front().real();
  ctx.result["density_min"] = lo;
  ctx.result["density_integral"] = integral;
  return est;
}

void task_spectral(Context& ctx) {
  const auto f = family_of(ctx.cfg);
  OrbitWord word;
  const auto est = spectral_of(ctx, f, word);
  auto c = ctx.csv("correlations.csv", "k,corr_re,corr_im");
  for (std::size_t k = 0; k < est.correlations.size(); ++k)
    c.row(k, est.correlations[k].real(), est.correlations[k].imag());
  auto d = ctx.csv("density.csv", "omega,density");
  for (std::size_t j = 0; j < est.omega.size(); ++j) d.row(est.omega[j], est.density[j]);
}

void task_dimension(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto f = family_of(cfg);
  OrbitWord word;
  const auto est = spectral_of(ctx, f, word);
  const auto radii = cfg.radii.empty() ? default_radii() : cfg.radii;
  auto scan = local_dimension_scan(est, cfg.omega_grid, radii);

  auto opt = estimator_options(cfg);
  const auto lambda = estimate_lambda(f, opt);
  const std::size_t n_max = std::min<std::size_t>(cfg.n_steps, 2000);
  auto rows = nlohmann::json::array();
  auto csv = ctx.csv("dimension.csv", "omega,slope,kernel_slope,chi_plus,floor");
  for (auto& row : scan.rows) {
    std::vector<double> t(f.alphabet_size(), row.omega);
    const auto pw = pointwise_upper_exponent(f, cfg.seed, TorusPoint(std::move(t)), n_max);
    const double chi_plus = pw.estimate.value;
    row.floor = 2 * std::min(1.0, 1.0 - chi_plus / lambda.value);
    csv.row(row.omega, row.slope, row.kernel_slope, chi_plus, *row.floor);
    rows.push_back({{"omega", row.omega},
                    {"slope", row.slope},
                    {"kernel_slope", row.kernel_slope},
                    {"chi_plus", chi_plus},
                    {"floor", *row.floor}});
  }
  ctx.result["lambda"] = estimate_json(lambda);
  ctx.result["radii"] = radii;
  ctx.result["rows"] = rows;
  ctx.result["note"] = "exploratory: finite-data slopes, not local dimensions";
}

}  // namespace

RunResult run(const RunConfig& cfg, std::ostream& err) {
  RunResult res;
  nlohmann::json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["task"] = to_string(cfg.task);
  summary["seed"] = cfg.seed;
  summary["config"] = cfg.to_json();
  try {
    validate_config(cfg);
    Context ctx{cfg, fs::path(cfg.out), {}, nlohmann::json::object(), kExitOk};
    fs::create_directories(ctx.out);
    switch (cfg.task) {
      case Task::props: task_props(ctx); break;
      case Task::matrix: task_matrix(ctx); break;
      case Task::cocycle_eval: task_cocycle_eval(ctx); break;
      case Task::lyapunov: task_lyapunov(ctx); break;
      case Task::spectrum: task_spectrum(ctx); break;
      case Task::chi: task_chi(ctx); break;
      case Task::mahler_bound: task_mahler(ctx); break;
      case Task::criterion: task_criterion(ctx); break;
      case Task::cone_verify: task_cone_verify(ctx); break;
      case Task::example_family: task_example_family(ctx); break;
      case Task::weyl: task_weyl(ctx); break;
      case Task::spectral_measure: task_spectral(ctx); break;
      case Task::dimension_scan: task_dimension(ctx); break;
    }
    summary["result"] = std::move(ctx.result);
    summary["exit_code"] = ctx.exit_code;
    res.exit_code = ctx.exit_code;
    const auto path = ctx.out / "summary.json";
    res.files.push_back(path.string());
    for (auto& f : ctx.files) res.files.push_back(std::move(f));
    summary["files"] = res.files;
    std::ofstream(path) << summary.dump(2) << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    summary["exit_code"] = kExitError;
    summary["error"] = e.what();
    res.exit_code = kExitError;
  }
  res.summary = std::move(summary);
  return res;
}

}  // namespace sadic
