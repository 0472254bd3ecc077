#include "sadic/hypotheses.hpp"

#include <algorithm>
#include <complex>
#include <deque>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "sadic/detail/balance.hpp"

namespace sadic {

namespace {

using Pattern = std::vector<bool>;

Pattern pattern_of(const IntMatrix& m) {
  Pattern p(m.dim() * m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) p[i * m.dim() + j] = m(i, j) != 0;
  return p;
}

Pattern bool_product(const Pattern& a, const Pattern& b, std::size_t d) {
  Pattern c(d * d, false);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k)
      if (a[i * d + k])
        for (std::size_t j = 0; j < d; ++j)
          if (b[k * d + j]) c[i * d + j] = true;
  return c;
}

std::vector<std::complex<double>> eigenvalues(Eigen::MatrixXd a) {
  detail::balance(a);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  std::vector<std::complex<double>> out;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) out.push_back(solver.eigenvalues()(i));
  return out;
}

enum class LineSearch { found, none, inconclusive };

// Looks for a unit vector that is an eigenvector of every matrix. A common
// eigenvector must be a real eigenvector of each matrix, so it suffices to
// test the eigenvectors of one matrix with simple spectrum.
LineSearch common_eigenvector(std::vector<Eigen::MatrixXd> mats, std::string& detail) {
  for (auto& m : mats) {
    const double n = m.norm();
    if (n > 0) m /= n;
  }
  for (std::size_t base = 0; base < mats.size(); ++base) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(mats[base], true);
    if (solver.info() != Eigen::Success) continue;
    const auto& vals = solver.eigenvalues();
    const Eigen::Index d = vals.size();
    bool simple = true;
    for (Eigen::Index i = 0; i < d && simple; ++i)
      for (Eigen::Index j = i + 1; j < d; ++j)
        if (std::abs(vals(i) - vals(j)) <= kDecisionMargin) {
          simple = false;
          break;
        }
    if (!simple) continue;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (std::abs(vals(i).imag()) > kDecisionMargin) continue;
      Eigen::VectorXd v = solver.eigenvectors().col(i).real();
      if (v.norm() == 0) continue;
      v.normalize();
      bool common = true;
      for (const auto& m : mats) {
        const Eigen::VectorXd mv = m * v;
        const double residual = (mv - v.dot(mv) * v).norm();
        if (residual > kDecisionMargin) {
          common = false;
          break;
        }
      }
      if (common) {
        std::ostringstream os;
        os << "common eigenvector found from generator " << base << ", eigenvalue index " << i;
        detail = os.str();
        return LineSearch::found;
      }
    }
    detail = "eigenvectors of generator " + std::to_string(base) + " are not shared";
    return LineSearch::none;
  }
  // Every matrix has a repeated eigenvalue.
  const bool all_scalar = std::all_of(mats.begin(), mats.end(), [](const Eigen::MatrixXd& m) {
    const double s = m.trace() / static_cast<double>(m.rows());
    return (m - s * Eigen::MatrixXd::Identity(m.rows(), m.cols())).norm() <= kDecisionMargin;
  });
  if (all_scalar) {
    detail = "all generators are scalar: every line is invariant";
    return LineSearch::found;
  }
  detail = "inconclusive: every generator has a repeated eigenvalue";
  return LineSearch::inconclusive;
}

HeuristicCheck line_check(const std::vector<Eigen::MatrixXd>& mats, const std::string& what) {
  HeuristicCheck c;
  std::string detail;
  const auto r = common_eigenvector(mats, detail);
  c.pass = r == LineSearch::none;
  c.detail = what + ": " + detail;
  return c;
}

}  // namespace

const char* to_string(Decision d) {
  switch (d) {
    case Decision::yes:
      return "yes";
    case Decision::no:
      return "no";
    case Decision::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

std::optional<std::vector<std::size_t>> find_positive_word(std::span<const IntMatrix> gens, std::size_t max_length) {
  if (gens.empty() || max_length == 0) return std::nullopt;
  const std::size_t d = gens.front().dim();
  std::vector<Pattern> gp;
  for (const auto& g : gens) {
    if (g.dim() != d) throw std::invalid_argument("find_positive_word: generators differ in size");
    gp.push_back(pattern_of(g));
  }
  auto positive = [](const Pattern& p) { return std::all_of(p.begin(), p.end(), [](bool b) { return b; }); };

  std::set<Pattern> seen;
  std::deque<std::pair<Pattern, std::vector<std::size_t>>> queue;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (positive(gp[i])) return std::vector<std::size_t>{i};
    if (seen.insert(gp[i]).second) queue.emplace_back(gp[i], std::vector<std::size_t>{i});
  }
  while (!queue.empty()) {
    auto [p, w] = std::move(queue.front());
    queue.pop_front();
    if (w.size() >= max_length) continue;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      Pattern q = bool_product(p, gp[i], d);
      auto next = w;
      next.push_back(i);
      if (positive(q)) return next;
      if (seen.insert(q).second) queue.emplace_back(std::move(q), std::move(next));
    }
  }
  return std::nullopt;
}

bool check_unimodular(std::span<const IntMatrix> gens) {
  return std::all_of(gens.begin(), gens.end(), [](const IntMatrix& g) { return g.determinant() == 1; });
}

std::optional<ProximalWitness> proximality_check(std::span<const IntMatrix> gens, std::size_t max_length,
                                                 std::size_t max_words) {
  if (gens.empty()) return std::nullopt;
  std::vector<Eigen::MatrixXd> g;
  for (const auto& m : gens) {
    Eigen::MatrixXd x = m.to_double();
    const double n = x.norm();
    g.push_back(n > 0 ? Eigen::MatrixXd(x / n) : x);
  }
  std::deque<std::pair<Eigen::MatrixXd, std::vector<std::size_t>>> level;
  for (std::size_t i = 0; i < g.size(); ++i) level.emplace_back(g[i], std::vector<std::size_t>{i});
  std::size_t tried = 0;
  while (!level.empty() && tried < max_words) {
    auto [p, w] = std::move(level.front());
    level.pop_front();
    ++tried;
    auto ev = eigenvalues(p);
    std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return std::abs(a) > std::abs(b); });
    const double top = std::abs(ev.front());
    const double second = ev.size() > 1 ? std::abs(ev[1]) : 0.0;
    if (top > 0 && (top - second) / top >= kDecisionMargin) return ProximalWitness{w, top, second, (top - second) / top};
    if (w.size() < max_length)
      for (std::size_t i = 0; i < g.size(); ++i) {
        Eigen::MatrixXd q = p * g[i];
        const double n = q.norm();
        if (n > 0) q /= n;
        auto next = w;
        next.push_back(i);
        level.emplace_back(std::move(q), std::move(next));
      }
  }
  return std::nullopt;
}

IntMatrix hyperplane_compound(const IntMatrix& m) {
  const std::size_t d = m.dim();
  IntMatrix c(d);
  if (d == 1) {
    c(0, 0) = 1;
    return c;
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<std::vector<BigInt>> minor;
      for (std::size_t r = 0; r < d; ++r) {
        if (r == i) continue;
        std::vector<BigInt> row;
        for (std::size_t s = 0; s < d; ++s)
          if (s != j) row.push_back(m(r, s));
        minor.push_back(std::move(row));
      }
      c(i, j) = bareiss_determinant(std::move(minor));
    }
  return c;
}

IrreducibilityReport irreducibility_heuristic(std::span<const IntMatrix> gens) {
  IrreducibilityReport r;
  if (gens.empty()) throw std::invalid_argument("irreducibility_heuristic: no generators");
  const std::size_t d = gens.front().dim();
  if (d < 2) {
    r.no_common_eigenvector = {true, "dimension 1 has no proper subspaces"};
    r.no_common_hyperplane = r.no_common_eigenvector;
    return r;
  }
  std::vector<Eigen::MatrixXd> direct, compound, adjugate;
  for (const auto& g : gens) {
    direct.push_back(g.to_double());
    compound.push_back(hyperplane_compound(g).to_double());
    if (d == 3) adjugate.push_back(g.adjugate().transpose().to_double());
  }
  r.no_common_eigenvector = line_check(direct, "invariant line");
  r.no_common_hyperplane = line_check(compound, "invariant hyperplane (exterior power d-1)");
  if (d == 3) r.no_common_plane_adjugate = line_check(adjugate, "invariant plane (cofactor action)");
  return r;
}

EigenData eigen_report(const IntMatrix& m) {
  EigenData e;
  e.char_poly = characteristic_polynomial(m);
  e.discriminant = discriminant(e.char_poly);
  e.roots = find_roots(e.char_poly);

  const auto& roots = e.roots;
  const std::size_t n = roots.size();
  auto discs_overlap = [](std::complex<long double> a, long double ra, std::complex<long double> b, long double rb) {
    return std::abs(a - b) <= ra + rb;
  };
  bool separated = true;
  for (std::size_t i = 0; i < n && separated; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (discs_overlap(roots[i].value, roots[i].radius, roots[j].value, roots[j].radius)) {
        separated = false;
        break;
      }

  // Realness of each distinct root: yes/no/unknown.
  std::vector<Decision> real(n, Decision::inconclusive);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& z = roots[i];
    if (std::abs(z.value.imag()) > z.radius) {
      real[i] = Decision::no;
      continue;
    }
    if (!separated) continue;
    // The conjugate disc meets no other disc, so the root is its own conjugate.
    bool alone = true;
    for (std::size_t j = 0; j < n && alone; ++j)
      if (j != i && discs_overlap(std::conj(z.value), z.radius, roots[j].value, roots[j].radius)) alone = false;
    if (alone) real[i] = Decision::yes;
  }
  if (std::any_of(real.begin(), real.end(), [](Decision d) { return d == Decision::no; }))
    e.all_real = Decision::no;
  else if (std::all_of(real.begin(), real.end(), [](Decision d) { return d == Decision::yes; }))
    e.all_real = Decision::yes;

  const bool repeated = std::any_of(roots.begin(), roots.end(), [](const PolyRoot& r) { return r.multiplicity > 1; });
  if (repeated || e.all_real == Decision::no) {
    e.moduli_distinct = Decision::no;
  } else {
    bool disjoint = true;
    for (std::size_t i = 0; i < n && disjoint; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const long double mi = std::abs(roots[i].value), mj = std::abs(roots[j].value);
        const long double ri = std::max<long double>(roots[i].radius, kDecisionMargin * mi);
        const long double rj = std::max<long double>(roots[j].radius, kDecisionMargin * mj);
        if (std::abs(mi - mj) <= ri + rj) {
          disjoint = false;
          break;
        }
      }
    e.moduli_distinct = disjoint && e.all_real == Decision::yes ? Decision::yes : Decision::inconclusive;
  }
  return e;
}

AperiodicityReport aperiodicity_report(std::span<const Substitution> subs) {
  AperiodicityReport r;
  if (subs.empty()) {
    r.condition = "no substitutions";
    return r;
  }
  for (const auto& s : subs)
    if (substitution_matrix(s).determinant() == 0) {
      r.condition = "aperiodicity not established: " + (s.name().empty() ? std::string("a generator") : s.name()) +
                    " has a singular matrix";
      return r;
    }
  if (std::all_of(subs.begin(), subs.end(), [](const Substitution& s) { return is_left_proper(s); })) {
    r.established = true;
    r.condition = "all substitutions are left proper";
    return r;
  }
  if (std::all_of(subs.begin(), subs.end(), [](const Substitution& s) { return is_right_proper(s); })) {
    r.established = true;
    r.condition = "all substitutions are right proper";
    return r;
  }
  // A fixed word of positive probability recurs almost surely.
  auto label = [&](std::size_t i) { return subs[i].name().empty() ? "#" + std::to_string(i) : subs[i].name(); };
  for (std::size_t i = 0; i < subs.size(); ++i)
    for (std::size_t j = 0; j < subs.size(); ++j) {
      const Substitution c = compose(subs[i], subs[j]);
      if (is_left_proper(c) || is_right_proper(c)) {
        r.established = true;
        r.condition = "composition " + label(i) + " o " + label(j) + " is " +
                      (is_left_proper(c) ? "left" : "right") + " proper";
        return r;
      }
    }
  for (std::size_t i = 0; i < subs.size(); ++i) {
    const auto sc = strong_coincidence(subs[i]);
    if (sc.status == SearchStatus::found) {
      r.established = true;
      r.condition = label(i) + " satisfies strong coincidence at power " + std::to_string(sc.witness->power);
      return r;
    }
  }
  r.condition = "aperiodicity not established";
  return r;
}

}  // namespace sadic
