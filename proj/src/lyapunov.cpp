#include "sadic/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sadic/numerics.hpp"

namespace sadic {

namespace {

std::size_t burn_in_steps(const EstimatorOptions& opt) {
  if (!(opt.burn_in >= 0.0 && opt.burn_in < 1.0)) throw std::invalid_argument("burn-in fraction must lie in [0, 1)");
  return static_cast<std::size_t>(std::floor(opt.burn_in * static_cast<double>(opt.n_steps)));
}

void check_options(const EstimatorOptions& opt) {
  if (opt.n_steps == 0) throw std::invalid_argument("n_steps must be positive");
  if (opt.n_trials == 0) throw std::invalid_argument("n_trials must be positive");
}

// Mean over trials; the single-trial case falls back to batch means of
// the per-step increments.
void finish(ExponentEstimate& e, const std::vector<double>& single_trial_steps) {
  const auto ms = mean_std(e.per_trial);
  e.value = ms.mean;
  e.stderr_ = e.per_trial.size() > 1 ? ms.stderr_of_mean : batch_means_stderr(single_trial_steps);
}

std::vector<Eigen::MatrixXd> transposes(const FamilySpec& family) {
  std::vector<Eigen::MatrixXd> out;
  for (const auto& s : family.substitutions) out.push_back(substitution_matrix(s).transpose().to_double());
  return out;
}

// One trajectory of the top exponent: returns per-step log factors.
std::vector<double> top_exponent_steps(std::span<const Eigen::MatrixXd> gens, DirectiveStream& stream,
                                       std::size_t n) {
  const Eigen::Index d = gens.front().rows();
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(d, d);
  std::vector<double> logs(n);
  for (std::size_t k = 0; k < n; ++k) {
    p = gens[stream.next()] * p;
    const double norm = p.norm();
    if (norm == 0.0) throw std::domain_error("matrix product vanished");
    p /= norm;
    logs[k] = std::log(norm);
  }
  return logs;
}

double tail_average(std::span<const double> steps, std::size_t skip) {
  KahanSum s;
  for (std::size_t k = skip; k < steps.size(); ++k) s.add(steps[k]);
  return s.value() / static_cast<double>(steps.size() - skip);
}

}  // namespace

const char* to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::norm_growth:
      return "norm-growth";
    case EstimateMethod::qr_spectrum:
      return "qr-spectrum";
    case EstimateMethod::finite_k_bound:
      return "finite-k-bound";
    case EstimateMethod::pointwise:
      return "pointwise";
  }
  return "unknown";
}

nlohmann::json to_json(const ExponentEstimate& e) {
  return {{"value", e.value},       {"stderr", e.stderr_},          {"n_steps", e.n_steps},
          {"n_trials", e.n_trials}, {"method", to_string(e.method)}, {"seed", e.seed}};
}

ExponentEstimate estimate_top_exponent(std::span<const Eigen::MatrixXd> gens, const FamilySpec& weights,
                                       const EstimatorOptions& opt) {
  check_options(opt);
  if (gens.size() != weights.size()) throw std::invalid_argument("one generator per family member is required");
  const std::size_t skip = burn_in_steps(opt);
  ExponentEstimate e;
  e.n_steps = opt.n_steps;
  e.n_trials = opt.n_trials;
  e.seed = opt.seed;
  e.method = EstimateMethod::norm_growth;
  e.per_trial.assign(opt.n_trials, 0.0);
  std::vector<double> first_steps;
  parallel_for(opt.n_trials, [&](std::size_t trial) {
    DirectiveStream stream(weights, opt.seed, streams::kDirective + trial);
    auto steps = top_exponent_steps(gens, stream, opt.n_steps);
    e.per_trial[trial] = tail_average(steps, skip);
    if (trial == 0) first_steps.assign(steps.begin() + static_cast<std::ptrdiff_t>(skip), steps.end());
  });
  finish(e, first_steps);
  return e;
}

ExponentEstimate estimate_lambda(const FamilySpec& family, const EstimatorOptions& opt) {
  family.validate();
  const auto gens = transposes(family);
  return estimate_top_exponent(gens, family, opt);
}

SpectrumEstimate estimate_exponent_spectrum(std::span<const Eigen::MatrixXd> gens, const FamilySpec& weights,
                                            const EstimatorOptions& opt) {
  check_options(opt);
  if (gens.size() != weights.size()) throw std::invalid_argument("one generator per family member is required");
  const Eigen::Index d = gens.front().rows();
  const std::size_t skip = burn_in_steps(opt);
  std::vector<std::vector<double>> per_trial(opt.n_trials, std::vector<double>(d, 0.0));
  std::vector<std::vector<double>> first_steps(d);

  parallel_for(opt.n_trials, [&](std::size_t trial) {
    DirectiveStream stream(weights, opt.seed, streams::kDirective + trial);
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(d, d);
    std::vector<KahanSum> sums(d);
    for (std::size_t k = 0; k < opt.n_steps; ++k) {
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(gens[stream.next()] * q);
      const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
      q = qr.householderQ();
      for (Eigen::Index i = 0; i < d; ++i) {
        const double l = std::log(std::abs(r(i, i)));
        if (k >= skip) sums[i].add(l);
        if (trial == 0 && k >= skip) first_steps[i].push_back(l);
      }
    }
    for (Eigen::Index i = 0; i < d; ++i)
      per_trial[trial][i] = sums[i].value() / static_cast<double>(opt.n_steps - skip);
  });

  SpectrumEstimate out;
  for (Eigen::Index i = 0; i < d; ++i) {
    ExponentEstimate e;
    e.n_steps = opt.n_steps;
    e.n_trials = opt.n_trials;
    e.seed = opt.seed;
    e.method = EstimateMethod::qr_spectrum;
    for (const auto& t : per_trial) e.per_trial.push_back(t[i]);
    finish(e, first_steps[i]);
    out.exponents.push_back(std::move(e));
  }
  std::stable_sort(out.exponents.begin(), out.exponents.end(),
                   [](const ExponentEstimate& a, const ExponentEstimate& b) { return a.value > b.value; });

  out.sum.n_steps = opt.n_steps;
  out.sum.n_trials = opt.n_trials;
  out.sum.seed = opt.seed;
  out.sum.method = EstimateMethod::qr_spectrum;
  for (const auto& t : per_trial) out.sum.per_trial.push_back(pairwise_sum(t));
  std::vector<double> sum_steps;
  if (!first_steps.empty())
    for (std::size_t k = 0; k < first_steps[0].size(); ++k) {
      double s = 0;
      for (Eigen::Index i = 0; i < d; ++i) s += first_steps[i][k];
      sum_steps.push_back(s);
    }
  finish(out.sum, sum_steps);
  return out;
}

SpectrumEstimate estimate_exponent_spectrum(const FamilySpec& family, const EstimatorOptions& opt) {
  family.validate();
  const auto gens = transposes(family);
  return estimate_exponent_spectrum(gens, family, opt);
}

std::vector<Eigen::MatrixXd> inverse_transposes(const FamilySpec& family) {
  std::vector<Eigen::MatrixXd> out;
  for (const auto& s : family.substitutions)
    out.push_back(substitution_matrix(s).inverse_unimodular().transpose().to_double());
  return out;
}

ExponentEstimate estimate_chi(const FamilySpec& family, const EstimatorOptions& opt) {
  family.validate();
  check_options(opt);
  const std::size_t skip = burn_in_steps(opt);
  const SpectralCocycle cocycle(family.substitutions);
  const std::size_t d = family.alphabet_size();

  ExponentEstimate e;
  e.n_steps = opt.n_steps;
  e.n_trials = opt.n_trials;
  e.seed = opt.seed;
  e.method = EstimateMethod::norm_growth;
  e.per_trial.assign(opt.n_trials, 0.0);
  std::vector<double> first_steps;
  parallel_for(opt.n_trials, [&](std::size_t trial) {
    DirectiveStream stream(family, opt.seed, streams::kDirective + trial);
    CounterRng rng(opt.seed, streams::kTorus + trial);
    std::vector<double> t(d);
    for (auto& x : t) x = rng.uniform();
    CocycleAccumulator acc(cocycle, TorusPoint(std::move(t)));
    if (!cocycle.unimodular()) acc.set_jitter(opt.seed, streams::kAux + trial);
    std::vector<double> steps(opt.n_steps);
    for (auto& s : steps) s = acc.push(stream.next());
    e.per_trial[trial] = tail_average(steps, skip);
    if (trial == 0) first_steps.assign(steps.begin() + static_cast<std::ptrdiff_t>(skip), steps.end());
  });
  finish(e, first_steps);
  return e;
}

ExponentEstimate finite_k_upper_bound(const FamilySpec& family, std::size_t k, std::size_t n_samples,
                                      std::uint64_t seed) {
  family.validate();
  if (k == 0) throw std::invalid_argument("k must be positive");
  if (n_samples < 2) throw std::invalid_argument("need at least 2 samples");
  const SpectralCocycle cocycle(family.substitutions);
  const std::size_t d = family.alphabet_size();
  ExponentEstimate e;
  e.n_steps = k;
  e.n_trials = n_samples;
  e.seed = seed;
  e.method = EstimateMethod::finite_k_bound;
  e.per_trial.assign(n_samples, 0.0);
  parallel_for(n_samples, [&](std::size_t s) {
    DirectiveStream stream(family, seed, streams::kDirective + s);
    CounterRng rng(seed, streams::kTorus + s);
    std::vector<double> t(d);
    for (auto& x : t) x = rng.uniform();
    CocycleAccumulator acc(cocycle, TorusPoint(std::move(t)));
    if (!cocycle.unimodular()) acc.set_jitter(seed, streams::kAux + s);
    for (std::size_t j = 0; j < k; ++j) acc.push(stream.next());
    e.per_trial[s] = acc.log_norm() / static_cast<double>(k);
  });
  finish(e, {});
  return e;
}

FiniteKSweep finite_k_sweep(const FamilySpec& family, std::span<const std::size_t> ks, std::size_t n_samples,
                            std::uint64_t seed) {
  if (ks.empty()) throw std::invalid_argument("empty k list");
  FiniteKSweep sweep;
  sweep.ks.assign(ks.begin(), ks.end());
  for (std::size_t k : ks) sweep.bounds.push_back(finite_k_upper_bound(family, k, n_samples, seed));
  for (std::size_t i = 1; i < sweep.bounds.size(); ++i)
    if (sweep.bounds[i].value < sweep.bounds[sweep.best].value) sweep.best = i;
  return sweep;
}

PointwiseResult pointwise_upper_exponent(const FamilySpec& family, std::span<const std::size_t> word,
                                         const TorusPoint& t, double tail_fraction) {
  family.validate();
  if (word.empty()) throw std::invalid_argument("empty directive word");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw std::invalid_argument("tail fraction must lie in (0, 1]");
  for (std::size_t i : word)
    if (i >= family.size()) throw std::invalid_argument("directive index out of range");
  const SpectralCocycle cocycle(family.substitutions);
  CocycleAccumulator acc(cocycle, t);
  PointwiseResult r;
  std::vector<double> steps;
  r.trace.reserve(word.size());
  for (std::size_t n = 0; n < word.size(); ++n) {
    steps.push_back(acc.push(word[n]));
    r.trace.push_back(acc.log_norm() / static_cast<double>(n + 1));
  }
  const std::size_t window = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(tail_fraction * word.size())));
  r.estimate.value = *std::max_element(r.trace.end() - static_cast<std::ptrdiff_t>(window), r.trace.end());
  r.estimate.stderr_ = batch_means_stderr(steps);
  r.estimate.n_steps = word.size();
  r.estimate.n_trials = 1;
  r.estimate.method = EstimateMethod::pointwise;
  r.estimate.per_trial = {r.estimate.value};
  return r;
}

PointwiseResult pointwise_upper_exponent(const FamilySpec& family, std::uint64_t seed, const TorusPoint& t,
                                         std::size_t n_max, double tail_fraction) {
  DirectiveStream stream(family, seed);
  const auto word = stream.take(n_max);
  auto r = pointwise_upper_exponent(family, word, t, tail_fraction);
  r.estimate.seed = seed;
  return r;
}

}  // namespace sadic
