#include "sadic/cone.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sadic/rng.hpp"

namespace sadic {

namespace {

using Vec3 = std::array<Rational, 3>;

// a*u + b*v + c
struct Affine {
  Rational a, b, c;
  Rational at(const Rational& u, const Rational& v) const { return a * u + b * v + c; }
};

Vec3 cone_point(const ConeSpec& cone, const Rational& u, const Rational& v) {
  Vec3 x;
  x[cone.normalize] = 1;
  x[cone.ratio_index[0]] = u;
  x[cone.ratio_index[1]] = v;
  return x;
}

Vec3 times(const IntMatrix& m, const Vec3& x) {
  Vec3 y;
  for (std::size_t i = 0; i < 3; ++i) {
    Rational s = 0;
    for (std::size_t j = 0; j < 3; ++j)
      if (m(i, j) != 0) s += Rational(m(i, j)) * x[j];
    y[i] = s;
  }
  return y;
}

Rational l1(const Vec3& x) {
  Rational s = 0;
  for (const auto& c : x) s += abs(c);
  return s;
}

// Coordinate functions of x and Mx as affine maps of the ratios (u, v).
std::vector<Affine> coordinate_forms(const ConeSpec& cone, const IntMatrix& m) {
  const Vec3 x0 = cone_point(cone, 0, 0), xu = cone_point(cone, 1, 0), xv = cone_point(cone, 0, 1);
  const Vec3 y0 = times(m, x0), yu = times(m, xu), yv = times(m, xv);
  std::vector<Affine> forms;
  for (std::size_t i = 0; i < 3; ++i) {
    forms.push_back({xu[i] - x0[i], xv[i] - x0[i], x0[i]});
    forms.push_back({yu[i] - y0[i], yv[i] - y0[i], y0[i]});
  }
  return forms;
}

// Vertices of the arrangement of the coordinate zero lines inside the box.
// On each cell both norms are linear, so the ratio of norms is extremal at
// one of these points.
std::vector<std::pair<Rational, Rational>> expansion_candidates(const ConeSpec& cone, const IntMatrix& m) {
  const auto& lo = cone.lower;
  const auto& hi = cone.upper;
  auto inside = [&](const Rational& u, const Rational& v) {
    return lo[0] <= u && u <= hi[0] && lo[1] <= v && v <= hi[1];
  };
  std::vector<std::pair<Rational, Rational>> pts;
  for (const auto& u : {lo[0], hi[0]})
    for (const auto& v : {lo[1], hi[1]}) pts.emplace_back(u, v);

  std::vector<Affine> lines;
  for (const auto& f : coordinate_forms(cone, m))
    if (f.a != 0 || f.b != 0) lines.push_back(f);

  for (const auto& f : lines) {
    if (f.b != 0)
      for (const auto& u : {lo[0], hi[0]}) {
        const Rational v = -(f.a * u + f.c) / f.b;
        if (inside(u, v)) pts.emplace_back(u, v);
      }
    if (f.a != 0)
      for (const auto& v : {lo[1], hi[1]}) {
        const Rational u = -(f.b * v + f.c) / f.a;
        if (inside(u, v)) pts.emplace_back(u, v);
      }
  }
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const auto& f = lines[i];
      const auto& g = lines[j];
      const Rational det = f.a * g.b - f.b * g.a;
      if (det == 0) continue;
      const Rational u = (f.b * g.c - f.c * g.b) / det;
      const Rational v = (f.c * g.a - f.a * g.c) / det;
      if (inside(u, v)) pts.emplace_back(u, v);
    }
  return pts;
}

std::string to_str(const Rational& r) {
  return r.str();
}

}  // namespace

void ConeSpec::validate() const {
  if (normalize > 2 || ratio_index[0] > 2 || ratio_index[1] > 2 || ratio_index[0] == ratio_index[1] ||
      ratio_index[0] == normalize || ratio_index[1] == normalize)
    throw std::invalid_argument("cone: coordinate indices must be a permutation of 0, 1, 2");
  for (std::size_t k = 0; k < 2; ++k)
    if (!(lower[k] < upper[k]))
      throw std::invalid_argument("cone: lower ratio bound must be below the upper bound");
  if (stated_expansion && *stated_expansion <= 0)
    throw std::invalid_argument("cone: stated expansion must be positive");
}

bool ConeSpec::contains(std::span<const Rational> x) const {
  if (x.size() != 3) throw std::invalid_argument("cone: vector must have 3 coordinates");
  const Rational& n = x[normalize];
  if (n == 0 || (positive_only && n < 0)) return false;
  for (std::size_t k = 0; k < 2; ++k) {
    const Rational r = x[ratio_index[k]] / n;
    if (r < lower[k] || r > upper[k]) return false;
  }
  return true;
}

bool ConeSpec::contains(std::span<const double> x) const {
  if (x.size() != 3) throw std::invalid_argument("cone: vector must have 3 coordinates");
  const double n = x[normalize];
  if (n == 0 || (positive_only && n < 0)) return false;
  for (std::size_t k = 0; k < 2; ++k) {
    const double r = x[ratio_index[k]] / n;
    if (r < lower[k].convert_to<double>() || r > upper[k].convert_to<double>()) return false;
  }
  return true;
}

ConeSpec forward_cone(long long m) {
  ConeSpec c;
  c.name = "forward(m=" + std::to_string(m) + ")";
  c.normalize = 2;
  c.ratio_index = {0, 1};
  c.lower = {Rational(23 * m, 10), Rational(m * m)};
  c.upper = {Rational(5 * m, 2) + 3, Rational(m * m + 2 * m + 2)};
  c.positive_only = true;
  c.stated_expansion = Rational(19 * m, 10);
  return c;
}

Rational inverse_expansion_claim_a(long long m) {
  const BigInt mm = m;
  return Rational(mm * mm * mm * mm + 2 * mm * mm * mm - 5 * mm, mm * mm + 6 * mm + 1);
}

Rational inverse_expansion_claim_b(long long m) {
  const BigInt mm = m;
  return Rational(mm * mm * mm * mm + 4 * mm * mm * mm + 3 * mm * mm - 7 * mm - 3, mm * mm + 6 * mm + 1);
}

ConeSpec inverse_cone(long long m) {
  ConeSpec c;
  c.name = "inverse(m=" + std::to_string(m) + ")";
  c.normalize = 0;
  c.ratio_index = {1, 2};
  c.lower = {Rational(-3 * m), Rational(-m * m - 3 * m)};
  c.upper = {Rational(-2 * m), Rational(-m * m + 1)};
  c.positive_only = false;
  c.stated_expansion = std::min(inverse_expansion_claim_a(m), inverse_expansion_claim_b(m));
  return c;
}

IntMatrix example_matrix(long long m) { return IntMatrix{{2 * m, 1, 0}, {m * m, 0, 1}, {1, 0, 0}}; }

ConeMatrixResult analyze_cone_matrix(const ConeSpec& cone, const IntMatrix& m) {
  cone.validate();
  if (m.dim() != 3) throw std::invalid_argument("cone: matrix must be 3x3");
  ConeMatrixResult r;

  // Image normalizer must keep one strict sign on the whole box; it is
  // affine in the ratios, so the corners decide.
  std::vector<Vec3> images;
  for (const auto& u : {cone.lower[0], cone.upper[0]})
    for (const auto& v : {cone.lower[1], cone.upper[1]}) images.push_back(times(m, cone_point(cone, u, v)));
  const bool all_pos = std::all_of(images.begin(), images.end(), [&](const Vec3& y) { return y[cone.normalize] > 0; });
  const bool all_neg = std::all_of(images.begin(), images.end(), [&](const Vec3& y) { return y[cone.normalize] < 0; });
  r.normalizer_sign_ok = all_pos || (all_neg && !cone.positive_only);
  if (!r.normalizer_sign_ok) {
    r.failure = "image normalizing coordinate changes sign or vanishes on the cone";
  } else {
    // Linear-fractional with a nonvanishing denominator: extremes at corners.
    r.maps_into = true;
    for (std::size_t k = 0; k < 2; ++k) {
      auto& range = r.image_ratios[k];
      for (std::size_t i = 0; i < images.size(); ++i) {
        const Rational q = images[i][cone.ratio_index[k]] / images[i][cone.normalize];
        if (i == 0 || q < range.lo) range.lo = q;
        if (i == 0 || q > range.hi) range.hi = q;
      }
      if (range.lo < cone.lower[k] || range.hi > cone.upper[k]) {
        r.maps_into = false;
        if (r.failure.empty())
          r.failure = "image ratio " + std::to_string(k) + " spans [" + to_str(range.lo) + ", " + to_str(range.hi) +
                      "], outside [" + to_str(cone.lower[k]) + ", " + to_str(cone.upper[k]) + "]";
      }
    }
  }

  bool first = true;
  for (const auto& [u, v] : expansion_candidates(cone, m)) {
    const Vec3 x = cone_point(cone, u, v);
    const Rational e = l1(times(m, x)) / l1(x);
    if (first || e < r.expansion_min) r.expansion_min = e;
    if (first || e > r.expansion_max) r.expansion_max = e;
    first = false;
  }
  return r;
}

Rational expansion_lower_bound(const ConeSpec& cone, const IntMatrix& m) {
  return analyze_cone_matrix(cone, m).expansion_min;
}

Rational expansion_upper_bound(const ConeSpec& cone, const IntMatrix& m) {
  return analyze_cone_matrix(cone, m).expansion_max;
}

ConeCertificate cone_invariance_check(const ConeSpec& cone, std::span<const IntMatrix> mats, ConeMode mode,
                                      std::size_t samples, std::uint64_t seed) {
  cone.validate();
  for (const auto& m : mats)
    if (m.dim() != 3) throw std::invalid_argument("cone: dimension mismatch (cone is 3-dimensional)");
  ConeCertificate cert;
  cert.mode = mode;
  cert.invariant = true;
  for (const auto& m : mats) {
    cert.per_matrix.push_back(analyze_cone_matrix(cone, m));
    if (mode == ConeMode::exact) cert.invariant = cert.invariant && cert.per_matrix.back().maps_into;
  }
  if (mode == ConeMode::sample) {
    CounterRng rng(seed, streams::kAux);
    const double l0 = cone.lower[0].convert_to<double>(), h0 = cone.upper[0].convert_to<double>();
    const double l1v = cone.lower[1].convert_to<double>(), h1 = cone.upper[1].convert_to<double>();
    cert.samples = samples;
    for (std::size_t s = 0; s < samples; ++s) {
      std::array<double, 3> x{};
      const double scale = cone.positive_only || rng.uniform() < 0.5 ? 1.0 : -1.0;
      x[cone.normalize] = scale;
      x[cone.ratio_index[0]] = scale * (l0 + (h0 - l0) * rng.uniform());
      x[cone.ratio_index[1]] = scale * (l1v + (h1 - l1v) * rng.uniform());
      for (const auto& m : mats) {
        const Eigen::Vector3d y = m.to_double() * Eigen::Vector3d(x[0], x[1], x[2]);
        const std::array<double, 3> ya{y[0], y[1], y[2]};
        if (!cone.contains(std::span<const double>(ya))) ++cert.sample_failures;
      }
    }
    cert.invariant = cert.sample_failures == 0;
  }
  return cert;
}

ConeLambdaBound lambda_lower_from_cone(const ConeSpec& cone, std::span<const IntMatrix> mats) {
  ConeLambdaBound b;
  if (mats.empty()) throw std::invalid_argument("lambda_lower_from_cone: no matrices");
  const auto cert = cone_invariance_check(cone, mats, ConeMode::exact);
  b.valid = cert.invariant;
  for (std::size_t i = 0; i < cert.per_matrix.size(); ++i)
    if (i == 0 || cert.per_matrix[i].expansion_min < b.exact_factor) b.exact_factor = cert.per_matrix[i].expansion_min;
  if (!b.valid) {
    for (const auto& r : cert.per_matrix)
      if (!r.failure.empty()) {
        b.detail = "cone not invariant: " + r.failure;
        break;
      }
    return b;
  }
  if (cone.stated_expansion) {
    b.stated_factor_holds = b.exact_factor >= *cone.stated_expansion;
    if (!b.stated_factor_holds) {
      b.valid = false;
      b.detail = "stated expansion " + to_str(*cone.stated_expansion) + " exceeds the exact minimum " +
                 to_str(b.exact_factor);
      return b;
    }
    b.factor = *cone.stated_expansion;
  } else {
    b.factor = b.exact_factor;
  }
  if (b.factor <= 0) {
    b.valid = false;
    b.detail = "expansion factor is not positive";
    return b;
  }
  b.value = std::log(b.factor.convert_to<double>());
  return b;
}

double lambda_upper_from_cone(const ConeSpec& cone, std::span<const IntMatrix> mats) {
  Rational hi = 0;
  for (const auto& m : mats) hi = std::max(hi, expansion_upper_bound(cone, m));
  return std::log(hi.convert_to<double>());
}

}  // namespace sadic
