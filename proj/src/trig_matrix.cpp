#include "sadic/trig_matrix.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sadic {

namespace {

constexpr long double kPi = std::numbers::pi_v<long double>;

long double frac_centered(long double x) { return x - std::nearbyint(x); }

// exp(-2 pi i f) for f measured in turns.
std::complex<double> cis_turns(long double f) {
  const long double a = -2 * kPi * frac_centered(f);
  return {static_cast<double>(std::cos(a)), static_cast<double>(std::sin(a))};
}

long double dot(const SparseExponent& n, const TorusPoint& t) {
  long double s = 0;
  for (const auto& [letter, count] : n) s += frac_centered(static_cast<long double>(count) * t[letter]);
  return s;
}

// sin(pi n x) / sin(pi x) for x in [-1/2, 1/2].
long double dirichlet_ratio(long double x, std::uint64_t n) {
  const long double nl = static_cast<long double>(n);
  if (x == 0) return nl;
  if (std::abs(x) * nl < 1e-5L) {
    const long double px = kPi * x;
    return nl * (1 - px * px * (nl * nl - 1) / 6);
  }
  // sin(pi (k + r)) = (-1)^k sin(pi r) keeps the argument small.
  const long double nx = nl * x;
  const long double r = frac_centered(nx);
  const bool odd = std::llround(nx - r) % 2 != 0;
  return (odd ? -1 : 1) * std::sin(kPi * r) / std::sin(kPi * x);
}

SparseExponent to_sparse(const std::vector<std::uint64_t>& counts) {
  SparseExponent out;
  for (std::size_t a = 0; a < counts.size(); ++a)
    if (counts[a] != 0) out.emplace_back(static_cast<Letter>(a), counts[a]);
  return out;
}

}  // namespace

TorusPoint::TorusPoint(std::vector<double> coords) : coords_(std::move(coords)) {
  for (double& x : coords_) x = reduce(x);
}

double TorusPoint::reduce(long double x) {
  if (!std::isfinite(x)) throw std::domain_error("torus coordinate is not finite");
  long double r = frac_centered(x);
  if (r < 0) r += 1;
  const double out = static_cast<double>(r);
  return out >= 1.0 ? 0.0 : out;
}

BigInt RationalTorusPoint::reduced_denominator() const {
  BigInt g = denominator;
  for (const auto& n : numerators) g = boost::multiprecision::gcd(g, n);
  return denominator / g;
}

std::complex<double> geometric_run(double x, std::uint64_t count) {
  if (count == 0) return {0.0, 0.0};
  const long double xr = frac_centered(x);
  const long double ratio = dirichlet_ratio(xr, count);
  const long double half_turns = static_cast<long double>(count - 1) * xr / 2;
  return cis_turns(half_turns) * static_cast<double>(ratio);
}

TrigPolyMatrix::TrigPolyMatrix(const Substitution& s) : dim_(s.alphabet_size()), entries_(dim_ * dim_) {
  for (std::size_t b = 0; b < dim_; ++b) {
    const Word& w = s.image(static_cast<Letter>(b));
    std::vector<std::uint64_t> prefix(dim_, 0);
    for (std::size_t i = 0; i < w.size();) {
      std::size_t j = i;
      while (j < w.size() && w[j] == w[i]) ++j;
      const Letter c = w[i];
      entries_[b * dim_ + c].push_back({to_sparse(prefix), c, j - i});
      prefix[c] += j - i;
      i = j;
    }
  }
}

std::size_t TrigPolyMatrix::monomial_count(std::size_t b, std::size_t c) const {
  std::size_t n = 0;
  for (const auto& run : entry(b, c)) n += run.count;
  return n;
}

std::vector<std::vector<std::uint64_t>> TrigPolyMatrix::expanded_entry(std::size_t b, std::size_t c) const {
  std::vector<std::vector<std::uint64_t>> out;
  for (const auto& run : entry(b, c)) {
    std::vector<std::uint64_t> v(dim_, 0);
    for (const auto& [letter, count] : run.base) v[letter] = count;
    for (std::uint64_t k = 0; k < run.count; ++k) {
      out.push_back(v);
      ++v[run.letter];
    }
  }
  return out;
}

Eigen::MatrixXcd TrigPolyMatrix::evaluate(const TorusPoint& t) const {
  if (t.dim() != dim_) throw std::invalid_argument("evaluate: torus point has wrong dimension");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (std::size_t b = 0; b < dim_; ++b) {
    for (std::size_t c = 0; c < dim_; ++c) {
      std::complex<double> z = 0;
      for (const auto& run : entry(b, c)) {
        const long double xr = frac_centered(t[run.letter]);
        const long double turns = dot(run.base, t) + static_cast<long double>(run.count - 1) * xr / 2;
        z += cis_turns(turns) * static_cast<double>(dirichlet_ratio(xr, run.count));
      }
      m(b, c) = z;
    }
  }
  return m;
}

nlohmann::json TrigPolyMatrix::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t b = 0; b < dim_; ++b) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < dim_; ++c) row.push_back(expanded_entry(b, c));
    rows.push_back(std::move(row));
  }
  return {{"dim", dim_}, {"entries", std::move(rows)}};
}

TrigPolyMatrix TrigPolyMatrix::from_json(const nlohmann::json& j) {
  TrigPolyMatrix m;
  m.dim_ = j.at("dim").get<std::size_t>();
  m.entries_.assign(m.dim_ * m.dim_, {});
  const auto& rows = j.at("entries");
  if (rows.size() != m.dim_) throw std::invalid_argument("trig matrix JSON: wrong number of rows");
  for (std::size_t b = 0; b < m.dim_; ++b) {
    if (rows[b].size() != m.dim_) throw std::invalid_argument("trig matrix JSON: wrong number of columns");
    for (std::size_t c = 0; c < m.dim_; ++c) {
      auto& runs = m.entries_[b * m.dim_ + c];
      std::vector<std::uint64_t> prev;
      for (const auto& e : rows[b][c]) {
        auto v = e.get<std::vector<std::uint64_t>>();
        if (v.size() != m.dim_) throw std::invalid_argument("trig matrix JSON: exponent has wrong length");
        // Extend the previous run when v = prev + e_letter.
        if (!runs.empty() && prev.size() == v.size()) {
          auto expected = prev;
          ++expected[runs.back().letter];
          if (expected == v) {
            ++runs.back().count;
            prev = std::move(v);
            continue;
          }
        }
        runs.push_back({to_sparse(v), static_cast<Letter>(c), 1});
        prev = std::move(v);
      }
    }
  }
  return m;
}

TorusPoint skew_step(const IntMatrix& s, const TorusPoint& t) {
  if (s.dim() != t.dim()) throw std::invalid_argument("skew_step: dimension mismatch");
  std::vector<double> out(t.dim());
  for (std::size_t b = 0; b < t.dim(); ++b) {
    long double acc = 0;
    for (std::size_t c = 0; c < t.dim(); ++c) {
      if (s(c, b) == 0) continue;
      acc += frac_centered(s(c, b).convert_to<long double>() * t[c]);
    }
    out[b] = TorusPoint::reduce(acc);
  }
  return TorusPoint(std::move(out));
}

TorusPoint skew_step(const Substitution& head, const TorusPoint& t) {
  return skew_step(substitution_matrix(head), t);
}

RationalTorusPoint skew_step(const IntMatrix& s, const RationalTorusPoint& t) {
  if (s.dim() != t.numerators.size()) throw std::invalid_argument("skew_step: dimension mismatch");
  if (t.denominator <= 0) throw std::invalid_argument("skew_step: denominator must be positive");
  RationalTorusPoint out;
  out.denominator = t.denominator;
  out.numerators.assign(s.dim(), 0);
  for (std::size_t b = 0; b < s.dim(); ++b) {
    BigInt acc = 0;
    for (std::size_t c = 0; c < s.dim(); ++c) acc += s(c, b) * t.numerators[c];
    acc %= t.denominator;
    if (acc < 0) acc += t.denominator;
    out.numerators[b] = acc;
  }
  return out;
}

SpectralCocycle::SpectralCocycle(std::span<const Substitution> members) {
  if (members.empty()) throw std::invalid_argument("SpectralCocycle: no substitutions");
  dim_ = members.front().alphabet_size();
  for (const auto& s : members) {
    if (s.alphabet_size() != dim_) throw std::invalid_argument("SpectralCocycle: alphabet sizes differ");
    trig_.emplace_back(s);
    matrices_.push_back(substitution_matrix(s));
    transposes_.push_back(matrices_.back().transpose().to_double());
  }
}

TorusPoint SpectralCocycle::step(std::size_t i, const TorusPoint& t) const {
  const Eigen::MatrixXd& st = transposes_[i];
  std::vector<double> out(dim_);
  for (std::size_t b = 0; b < dim_; ++b) {
    long double acc = 0;
    for (std::size_t c = 0; c < dim_; ++c)
      if (st(b, c) != 0) acc += frac_centered(static_cast<long double>(st(b, c)) * t[c]);
    out[b] = TorusPoint::reduce(acc);
  }
  return TorusPoint(std::move(out));
}

CocycleAccumulator::CocycleAccumulator(const SpectralCocycle& cocycle, TorusPoint t)
    : cocycle_(&cocycle), point_(std::move(t)), product_(Eigen::MatrixXcd::Identity(cocycle.dim(), cocycle.dim())) {
  if (point_.dim() != cocycle.dim()) throw std::invalid_argument("CocycleAccumulator: dimension mismatch");
}

double CocycleAccumulator::push(std::size_t i) {
  product_ = cocycle_->evaluate(i, point_) * product_;
  point_ = cocycle_->step(i, point_);
  if (jitter_) {
    std::vector<double> x = point_.coords();
    for (auto& v : x) v = TorusPoint::reduce(static_cast<long double>(v) + std::ldexp(jitter_->uniform(), -52));
    point_ = TorusPoint(std::move(x));
  }
  ++steps_;
  const double norm = product_.norm();
  if (norm == 0.0) {
    log_norm_.add(-std::numeric_limits<double>::infinity());
    return -std::numeric_limits<double>::infinity();
  }
  product_ /= norm;
  const double l = std::log(norm);
  log_norm_.add(l);
  return l;
}

bool SpectralCocycle::unimodular() const {
  for (const auto& m : matrices_) {
    const BigInt det = m.determinant();
    if (det != 1 && det != -1) return false;
  }
  return true;
}

CocycleProduct cocycle_product(std::span<const Substitution> seq, const TorusPoint& t) {
  if (seq.empty()) throw std::invalid_argument("cocycle_product: empty sequence");
  SpectralCocycle cocycle(seq);
  CocycleAccumulator acc(cocycle, t);
  for (std::size_t i = 0; i < seq.size(); ++i) acc.push(i);
  return {acc.normalized(), acc.log_norm(), acc.point()};
}

Rational frobenius_sq_integral(const Substitution& s) { return Rational(s.total_length()); }

}  // namespace sadic
