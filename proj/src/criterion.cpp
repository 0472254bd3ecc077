#include "sadic/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "sadic/mahler.hpp"
#include "sadic/numerics.hpp"
#include "sadic/rng.hpp"
#include "sadic/trig_matrix.hpp"

namespace sadic {

namespace {

// Length of the run of `letter` starting at w[pos].
std::size_t run_length(const Word& w, std::size_t pos, Letter letter) {
  std::size_t n = 0;
  while (pos + n < w.size() && w[pos + n] == letter) ++n;
  return n;
}

bool tail_rules_match(const Substitution& s) {
  return s.alphabet_size() == 3 && s.image(1) == Word{0} && s.image(2) == Word{1};
}

std::vector<IntMatrix> transposes(const std::vector<IntMatrix>& mats) {
  std::vector<IntMatrix> out;
  for (const auto& m : mats) out.push_back(m.transpose());
  return out;
}

std::string word_string(const std::vector<std::size_t>& w) {
  std::ostringstream os;
  for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
  return os.str();
}

// Log of the larger root of y^2 - (4 + a + b) y + a b.
double log_larger_root(double a, double b) {
  const double s = 4 + a + b;
  return std::log(0.5 * (s + std::sqrt(s * s - 4 * a * b)));
}

// |sum_{j<n} e^{2 pi i j x}|^2 = sin^2(pi n x) / sin^2(pi x).
double dirichlet_sq(long long n, double x) {
  const double d = std::sin(std::numbers::pi * x);
  if (std::abs(d) < 1e-300) return static_cast<double>(n) * static_cast<double>(n);
  const double r = std::sin(std::numbers::pi * static_cast<double>(n) * x) / d;
  return r * r;
}

double shifted_integral(long long m, long long k, std::size_t nodes) {
  KahanSum acc;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(nodes);
    acc.add(log_larger_root(dirichlet_sq(k, x), dirichlet_sq(2 * m - k, x)));
  }
  return acc.value() / static_cast<double>(nodes);
}

}  // namespace

std::optional<long long> recognize_example(const Substitution& s) {
  if (!tail_rules_match(s)) return std::nullopt;
  const Word& w = s.image(0);
  const std::size_t zeros = run_length(w, 0, 0);
  if (zeros == 0 || zeros % 2 != 0) return std::nullopt;
  const auto m = static_cast<long long>(zeros / 2);
  if (s == example_substitution(m)) return m;
  return std::nullopt;
}

std::optional<std::pair<long long, long long>> recognize_shifted(const Substitution& s) {
  if (!tail_rules_match(s)) return std::nullopt;
  const Word& w = s.image(0);
  const std::size_t k = run_length(w, 0, 0);
  if (k == 0 || k >= w.size() || w[k] != 2) return std::nullopt;
  const std::size_t rest = run_length(w, k + 1, 0);
  if ((k + rest) % 2 != 0) return std::nullopt;
  const auto m = static_cast<long long>((k + rest) / 2);
  const auto kk = static_cast<long long>(k);
  if (kk > 2 * m) return std::nullopt;
  if (s == shifted_substitution(m, kk)) return std::make_pair(m, kk);
  return std::nullopt;
}

std::optional<long long> recognize_example_matrices(std::span<const IntMatrix> mats) {
  if (mats.empty() || mats.front().dim() != 3) return std::nullopt;
  // A_m has (0, 0) entry 2m.
  const BigInt& a00 = mats.front()(0, 0);
  if (a00 < 2) return std::nullopt;
  long long lo = 0;
  for (const auto& m : mats) {
    if (m.dim() != 3) return std::nullopt;
    const BigInt& e = m(0, 0);
    if (e % 2 != 0) return std::nullopt;
    const auto c = (e / 2).convert_to<long long>();
    if (lo == 0 || c < lo) lo = c;
  }
  if (lo < 1) return std::nullopt;
  bool saw_lo = false, saw_hi = false;
  const IntMatrix a = example_matrix(lo), b = example_matrix(lo + 1);
  for (const auto& m : mats) {
    if (m == a)
      saw_lo = true;
    else if (m == b)
      saw_hi = true;
    else
      return std::nullopt;
  }
  if (saw_lo && saw_hi) return lo;
  return std::nullopt;
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::closed_form: return "closed-form";
    case Provenance::reduced_quadrature: return "reduced-quadrature";
    case Provenance::finite_k: return "finite-k";
    case Provenance::monte_carlo: return "monte-carlo";
    case Provenance::cone_certificate: return "cone-certificate";
  }
  return "?";
}

BoundValue example_chi_bound_closed_form() {
  // log ||M||_F^2 <= log 16 + log|z^2 - 3z + 1| - 2 log|z0 - 1| - 2 log|z1 - 1|
  // and m(z - 1) = 0.
  const auto mm = mahler_measure_1d(make_poly({1, -3, 1}));
  BoundValue b;
  b.value = 0.5 * (std::log(16.0) + mm.value);
  b.error = 0.5 * mm.error;
  b.provenance = Provenance::closed_form;
  return b;
}

BoundValue shifted_chi_bound(long long m, long long k) {
  if (m < 1 || k < 1 || k > 2 * m) throw std::invalid_argument("shifted_chi_bound needs m >= 1 and 1 <= k <= 2m");
  const auto n = static_cast<std::size_t>(64 * (2 * m + 2));
  const double coarse = shifted_integral(m, k, n);
  const double fine = shifted_integral(m, k, 2 * n);
  BoundValue b;
  b.error = 0.5 * std::abs(fine - coarse) + 1e-14;
  b.value = 0.5 * (std::log(4.0) + fine) + b.error;
  b.provenance = Provenance::reduced_quadrature;
  return b;
}

BoundValue per_substitution_integral(const Substitution& s, IntegralMethod method, std::size_t n_samples,
                                     std::uint64_t seed) {
  if (method != IntegralMethod::monte_carlo) {
    if (recognize_example(s)) return example_chi_bound_closed_form();
    if (auto mk = recognize_shifted(s)) return shifted_chi_bound(mk->first, mk->second);
    if (method == IntegralMethod::closed_form)
      throw std::invalid_argument("no closed-form bound is known for substitution '" + s.name() + "'");
  }
  if (n_samples < 2) throw std::invalid_argument("per_substitution_integral needs at least 2 samples");
  const TrigPolyMatrix trig(s);
  const std::size_t d = s.alphabet_size();
  std::vector<double> logs(n_samples);
  parallel_for(n_samples, [&](std::size_t i) {
    const CounterRng rng(seed, streams::kTorus + i);
    std::vector<double> t(d);
    for (std::size_t j = 0; j < d; ++j) t[j] = rng.uniform_at(j);
    const double nrm = trig.evaluate(TorusPoint(std::move(t))).norm();
    logs[i] = nrm > 0 ? std::log(nrm) : -std::numeric_limits<double>::infinity();
  });
  const auto ms = mean_std(logs);
  return {ms.mean, ms.stderr_of_mean, Provenance::monte_carlo};
}

HypothesisReport hypothesis_report(const FamilySpec& family) {
  HypothesisReport r;
  const auto mats = family.matrices();
  const auto gens = transposes(mats);

  const bool unimodular = check_unimodular(mats);
  const auto aper = aperiodicity_report(family.substitutions);
  r.b1.pass = unimodular && aper.established;
  r.b1.detail = std::string(unimodular ? "det = 1 for every matrix" : "some determinant differs from 1") +
                "; aperiodicity: " + (aper.established ? aper.condition : "not established");

  const auto irr = irreducibility_heuristic(gens);
  r.b2.pass = irr.all_pass();
  r.b2.heuristic = true;
  r.b2.detail = "common line: " + irr.no_common_eigenvector.detail +
                "; common plane: " + irr.no_common_hyperplane.detail;

  if (auto w = find_positive_word(gens, 8)) {
    r.b3.pass = true;
    r.b3.detail = "positive product for word [" + word_string(*w) + "]";
  } else {
    r.b3.detail = "no positive product of length <= 8";
  }

  const auto& subs = family.substitutions;
  for (std::size_t i = 0; i < subs.size() && !r.proper.pass; ++i) {
    if (is_left_proper(subs[i]) || is_right_proper(subs[i])) {
      r.proper = {true, false, subs[i].name() + " is proper"};
      break;
    }
    for (std::size_t j = 0; j < subs.size(); ++j) {
      const auto c = compose(subs[i], subs[j]);
      if (is_left_proper(c) || is_right_proper(c)) {
        r.proper = {true, false, "composition of members " + std::to_string(i) + " and " + std::to_string(j) +
                                     (is_left_proper(c) ? " is left proper" : " is right proper")};
        break;
      }
    }
  }
  if (!r.proper.pass) r.proper.detail = "no member or pairwise composition is proper";

  r.strong_coincidence.detail = "no witness up to power 3";
  for (const auto& s : subs) {
    const auto sc = strong_coincidence(s, 3);
    if (sc.status == SearchStatus::found) {
      r.strong_coincidence = {true, false,
                              s.name() + " at power " + std::to_string(sc.witness->power) + ", letter " +
                                  std::to_string(sc.witness->letter) +
                                  (sc.witness->side == CoincidenceSide::prefix ? " (prefix)" : " (suffix)")};
      break;
    }
    if (sc.status == SearchStatus::inconclusive) r.strong_coincidence.detail = "search hit the word-length cap";
  }

  if (auto p = proximality_check(gens, 4)) {
    r.proximal.pass = true;
    r.proximal.detail = "word [" + word_string(p->word) + "], relative gap " + std::to_string(p->relative_gap);
  } else {
    r.proximal.detail = "no proximal product of length <= 4";
  }
  return r;
}

namespace {

nlohmann::json status_json(const HypothesisStatus& s) {
  return {{"status", s.pass ? "pass" : "fail"}, {"heuristic", s.heuristic}, {"detail", s.detail}};
}

nlohmann::json bound_json(const BoundValue& b) {
  return {{"value", b.value}, {"error", b.error}, {"provenance", to_string(b.provenance)}};
}

}  // namespace

nlohmann::json to_json(const HypothesisReport& r) {
  return {{"B1", status_json(r.b1)},
          {"B2", status_json(r.b2)},
          {"B3", status_json(r.b3)},
          {"proper", status_json(r.proper)},
          {"strong_coincidence", status_json(r.strong_coincidence)},
          {"proximal", status_json(r.proximal)}};
}

nlohmann::json CriterionVerdict::to_json() const {
  nlohmann::json j;
  j["family"] = family;
  j["hypotheses"] = sadic::to_json(hypotheses);
  j["chi_bound"] = bound_json(chi_bound);
  j["lambda_lower"] = bound_json(lambda_lower);
  j["margin"] = margin;
  j["verdict"] = verdict == Verdict::certified ? "certified" : "inconclusive";
  j["reason"] = reason;
  if (cone) {
    j["cone"] = {{"valid", cone->valid},
                 {"factor", cone->factor.convert_to<double>()},
                 {"exact_factor", cone->exact_factor.convert_to<double>()},
                 {"stated_factor_holds", cone->stated_factor_holds},
                 {"detail", cone->detail}};
  }
  auto cands = nlohmann::json::array();
  for (const auto& c : chi_candidates) cands.push_back(bound_json(c));
  j["chi_candidates"] = cands;
  return j;
}

CriterionVerdict criterion_verdict(const FamilySpec& family, const CriterionConfig& config) {
  if (family.size() < 2) throw std::invalid_argument("criterion requires a family of at least 2 substitutions (l >= 2)");
  family.validate();

  CriterionVerdict v;
  v.family = family.name;
  v.hypotheses = hypothesis_report(family);

  // chi bound: weighted per-substitution analytic bounds when every member
  // has one; empirical candidates otherwise (or when forced).
  bool analytic = true;
  BoundValue weighted{0.0, 0.0, Provenance::closed_form};
  for (std::size_t i = 0; i < family.size() && analytic; ++i) {
    const auto& s = family.substitutions[i];
    BoundValue b;
    if (recognize_example(s)) {
      b = example_chi_bound_closed_form();
    } else if (auto mk = recognize_shifted(s)) {
      b = shifted_chi_bound(mk->first, mk->second);
      weighted.provenance = Provenance::reduced_quadrature;
    } else {
      analytic = false;
      break;
    }
    weighted.value += family.probs[i] * b.value;
    weighted.error += family.probs[i] * b.error;
  }
  if (analytic) v.chi_candidates.push_back(weighted);

  if (!analytic || config.force_empirical) {
    BoundValue mc{0.0, 0.0, Provenance::monte_carlo};
    double var = 0;
    for (std::size_t i = 0; i < family.size(); ++i) {
      const auto b = per_substitution_integral(family.substitutions[i], IntegralMethod::monte_carlo,
                                               config.integral_samples, config.seed + i);
      mc.value += family.probs[i] * b.value;
      var += family.probs[i] * family.probs[i] * b.error * b.error;
    }
    mc.error = std::sqrt(var);
    v.chi_candidates.push_back(mc);
    if (!config.k_list.empty()) {
      const auto sweep = finite_k_sweep(family, config.k_list, config.finite_k_samples, config.seed);
      const auto& best = sweep.bounds[sweep.best];
      v.chi_candidates.push_back({best.value, best.stderr_, Provenance::finite_k});
    }
  }
  // Analytic bounds take precedence; among empirical ones the smallest
  // value + 3 sigma is used.
  const auto conservative = [](const BoundValue& b) {
    return is_analytic(b.provenance) ? b.value : b.value + 3 * b.error;
  };
  if (analytic) {
    v.chi_bound = v.chi_candidates.front();
  } else {
    v.chi_bound = *std::min_element(v.chi_candidates.begin(), v.chi_candidates.end(),
                                    [&](const auto& a, const auto& b) { return conservative(a) < conservative(b); });
    v.chi_bound.value = conservative(v.chi_bound);
  }

  // lambda lower bound: cone certificate if a cone is available and valid.
  const auto mats = family.matrices();
  std::optional<ConeSpec> cone = family.cone;
  if (!cone)
    if (auto m = recognize_example_matrices(mats)) cone = forward_cone(*m);
  if (cone) {
    v.cone = lambda_lower_from_cone(*cone, mats);
    if (v.cone->valid) v.lambda_lower = {v.cone->value, 0.0, Provenance::cone_certificate};
  }
  if (v.lambda_lower.provenance != Provenance::cone_certificate) {
    auto opt = config.lambda_options;
    opt.seed = config.seed;
    const auto est = estimate_lambda(family, opt);
    v.lambda_lower = {est.lower3(), est.stderr_, Provenance::monte_carlo};
  }

  v.margin = 0.5 * v.lambda_lower.value - v.chi_bound.value;

  std::vector<std::string> missing;
  if (!(v.margin > 0)) missing.push_back("margin is not positive");
  if (!is_analytic(v.chi_bound.provenance)) missing.push_back("chi bound is empirical");
  if (!is_analytic(v.lambda_lower.provenance))
    missing.push_back(v.cone ? "cone certificate failed (" + v.cone->detail + "); lambda bound is empirical"
                             : "lambda bound is empirical");
  if (!v.hypotheses.b1.pass) missing.push_back("B1 not established");
  if (!v.hypotheses.b2.pass) missing.push_back("B2 heuristic failed");
  if (!v.hypotheses.b3.pass) missing.push_back("B3 not established");
  if (missing.empty()) {
    v.verdict = Verdict::certified;
    v.reason = "analytic bounds with positive margin; B2 checked heuristically";
  } else {
    std::string r;
    for (const auto& s : missing) r += (r.empty() ? "" : "; ") + s;
    v.reason = r;
  }
  return v;
}

nlohmann::json ExampleFamilyReport::to_json() const {
  nlohmann::json j;
  j["m"] = m;
  j["variant"] = variant == ExampleVariant::standard ? "standard" : "shifted-k";
  if (variant == ExampleVariant::shifted) j["ks"] = ks;
  auto vs = nlohmann::json::array();
  for (const auto& v : verdicts) vs.push_back(v.to_json());
  j["verdicts"] = vs;
  const auto cone_json = [](const ConeCertificate& c, const std::vector<Rational>& exp) {
    nlohmann::json cj;
    cj["invariant"] = c.invariant;
    auto pm = nlohmann::json::array();
    for (std::size_t i = 0; i < c.per_matrix.size(); ++i) {
      const auto& r = c.per_matrix[i];
      pm.push_back({{"maps_into", r.maps_into},
                    {"expansion_min", r.expansion_min.convert_to<double>()},
                    {"expansion_max", r.expansion_max.convert_to<double>()},
                    {"failure", r.failure}});
    }
    cj["per_matrix"] = pm;
    auto e = nlohmann::json::array();
    for (const auto& x : exp) e.push_back(x.convert_to<double>());
    cj["exact_expansion"] = e;
    return cj;
  };
  j["forward_cone"] = cone_json(forward, forward_expansion);
  j["inverse_cone"] = cone_json(inverse, inverse_expansion);
  j["lambda_upper"] = lambda_upper;
  auto eig = nlohmann::json::array();
  for (const auto& e : eigen) {
    auto roots = nlohmann::json::array();
    for (const auto& r : e.roots)
      roots.push_back({static_cast<double>(r.value.real()), static_cast<double>(r.value.imag())});
    eig.push_back({{"roots", roots},
                   {"discriminant", e.discriminant.str()},
                   {"moduli_distinct", to_string(e.moduli_distinct)},
                   {"all_real", to_string(e.all_real)}});
  }
  j["eigen"] = eig;
  j["compositions_left_proper"] = compositions_left_proper;
  j["certified"] = certified;
  j["expected_certified"] = expected_certified;
  return j;
}

ExampleFamilyReport example_family_report(long long m, ExampleVariant variant, std::vector<long long> ks,
                                          const CriterionConfig& config) {
  if (m < 1) throw std::invalid_argument("example_family_report needs m >= 1");
  ExampleFamilyReport r;
  r.m = m;
  r.variant = variant;

  std::vector<FamilySpec> families;
  if (variant == ExampleVariant::standard) {
    families.push_back(example_family(m));
  } else {
    if (ks.empty())
      for (long long k = 1; k <= 2 * m; ++k) ks.push_back(k);
    for (long long k : ks) families.push_back(shifted_family(m, k));
    r.ks = ks;
  }

  const auto mats = families.front().matrices();
  const auto fwd = forward_cone(m);
  const auto inv = inverse_cone(m);
  std::vector<IntMatrix> inverses;
  for (const auto& a : mats) inverses.push_back(a.inverse_unimodular());
  r.forward = cone_invariance_check(fwd, mats);
  r.inverse = cone_invariance_check(inv, inverses);
  for (const auto& a : mats) r.forward_expansion.push_back(expansion_lower_bound(fwd, a));
  for (const auto& a : inverses) r.inverse_expansion.push_back(expansion_lower_bound(inv, a));
  r.lambda_upper = lambda_upper_from_cone(fwd, mats);
  for (const auto& a : mats) r.eigen.push_back(eigen_report(a));

  r.compositions_left_proper = true;
  for (const auto& f : families)
    for (const auto& a : f.substitutions)
      for (const auto& b : f.substitutions)
        if (!is_left_proper(compose(a, b))) r.compositions_left_proper = false;

  r.certified = true;
  for (const auto& f : families) {
    r.verdicts.push_back(criterion_verdict(f, config));
    if (r.verdicts.back().verdict != Verdict::certified) r.certified = false;
  }
  r.expected_certified = variant == ExampleVariant::standard ? m >= 23 : m >= 26;
  return r;
}

}  // namespace sadic
