#include "sadic/family.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sadic/dsl.hpp"

namespace sadic {

namespace {

constexpr double kProbTolerance = 1e-12;

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string prob_sum_error(double sum) {
  return "probabilities must sum to 1 (got " + format_double(sum) + ")";
}

ConeSpec parse_cone(const Section& section) {
  ConeSpec c;
  c.name = section.label.empty() ? "user" : section.label;
  bool have_lower = false, have_upper = false;
  for (const auto& kv : section.key_values()) {
    if (kv.key == "normalize") {
      c.normalize = static_cast<std::size_t>(kv.value.as_uint64());
    } else if (kv.key == "ratio_index") {
      const auto v = kv.value.as_int_list();
      if (v.size() != 2 || v[0] < 0 || v[1] < 0) kv.value.fail("ratio_index needs two coordinate indices");
      c.ratio_index = {static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1])};
    } else if (kv.key == "lower" || kv.key == "upper") {
      const auto& items = kv.value.as_list();
      if (items.size() != 2) kv.value.fail(kv.key + " needs two rational bounds");
      auto& dst = kv.key == "lower" ? c.lower : c.upper;
      dst = {items[0].as_rational(), items[1].as_rational()};
      (kv.key == "lower" ? have_lower : have_upper) = true;
    } else if (kv.key == "positive_only") {
      c.positive_only = kv.value.as_bool();
    } else if (kv.key == "stated_expansion") {
      c.stated_expansion = kv.value.as_rational();
    } else {
      throw ParseError(kv.line, kv.column, "unknown cone key '" + kv.key + "'");
    }
  }
  if (!have_lower || !have_upper) throw ParseError(section.line, 1, "cone section needs both 'lower' and 'upper'");
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(section.line, 1, e.what());
  }
  return c;
}

}  // namespace

std::vector<IntMatrix> FamilySpec::matrices() const {
  std::vector<IntMatrix> out;
  out.reserve(substitutions.size());
  for (const auto& s : substitutions) out.push_back(substitution_matrix(s));
  return out;
}

void FamilySpec::validate() const {
  if (substitutions.empty()) throw std::invalid_argument("family has no substitutions");
  if (probs.size() != substitutions.size())
    throw std::invalid_argument("family has " + std::to_string(substitutions.size()) + " substitutions but " +
                                std::to_string(probs.size()) + " probabilities");
  for (const auto& s : substitutions)
    if (s.alphabet_size() != alphabet_size()) throw std::invalid_argument("substitutions have different alphabet sizes");
  for (double p : probs)
    if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("probabilities must be nonnegative");
  const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::abs(sum - 1.0) > kProbTolerance) throw std::invalid_argument(prob_sum_error(sum));
  if (cone) cone->validate();
}

std::string FamilySpec::to_text() const {
  std::ostringstream os;
  os << "[family]\n";
  if (!name.empty()) os << "name = \"" << name << "\"\n";
  os << "probs = [";
  for (std::size_t i = 0; i < probs.size(); ++i) os << (i ? ", " : "") << format_double(probs[i]);
  os << "]\n";
  for (std::size_t i = 0; i < substitutions.size(); ++i) {
    const auto& s = substitutions[i];
    os << "\n[substitution " << (s.name().empty() ? "s" + std::to_string(i) : s.name()) << "]\n" << s.to_dsl();
  }
  if (cone) {
    os << "\n[cone " << cone->name << "]\n";
    os << "normalize = " << cone->normalize << "\n";
    os << "ratio_index = [" << cone->ratio_index[0] << ", " << cone->ratio_index[1] << "]\n";
    os << "lower = [" << cone->lower[0].str() << ", " << cone->lower[1].str() << "]\n";
    os << "upper = [" << cone->upper[0].str() << ", " << cone->upper[1].str() << "]\n";
    os << "positive_only = " << (cone->positive_only ? "true" : "false") << "\n";
    if (cone->stated_expansion) os << "stated_expansion = " << cone->stated_expansion->str() << "\n";
  }
  return os.str();
}

FamilySpec parse_family(std::string_view text) {
  FamilySpec fam;
  const auto sections = split_sections(text);
  const Section* header = nullptr;
  std::optional<TextValue> probs_value;
  std::set<std::string> names;

  for (const auto& sec : sections) {
    if (sec.kind.empty()) {
      for (const auto& l : sec.lines)
        if (!is_blank(l.text)) throw ParseError(l.line, 1, "text before the first section header");
    } else if (sec.kind == "family") {
      if (header) throw ParseError(sec.line, 1, "duplicate [family] section");
      header = &sec;
      for (const auto& kv : sec.key_values()) {
        if (kv.key == "name") {
          fam.name = kv.value.as_string();
        } else if (kv.key == "probs") {
          probs_value = kv.value;
        } else if (kv.key == "seed") {
          fam.rng_seed = kv.value.as_uint64();
        } else {
          throw ParseError(kv.line, kv.column, "unknown family key '" + kv.key + "'");
        }
      }
    } else if (sec.kind == "substitution") {
      std::string name = sec.label.empty() ? "s" + std::to_string(fam.substitutions.size()) : sec.label;
      if (!names.insert(name).second) throw ParseError(sec.line, 2, "duplicate substitution name '" + name + "'");
      fam.substitutions.push_back(parse_substitution(sec.lines, name, sec.line));
      if (fam.substitutions.back().alphabet_size() != fam.substitutions.front().alphabet_size())
        throw ParseError(sec.line, 1, "substitution '" + name + "' has a different alphabet size");
    } else if (sec.kind == "cone") {
      if (fam.cone) throw ParseError(sec.line, 1, "duplicate [cone] section");
      fam.cone = parse_cone(sec);
    } else {
      throw ParseError(sec.line, 2, "unknown section '" + sec.kind + "'");
    }
  }
  if (fam.substitutions.empty()) throw ParseError(header ? header->line : 1, 1, "family has no [substitution] sections");

  if (probs_value) {
    fam.probs = probs_value->as_double_list();
    if (fam.probs.size() != fam.substitutions.size())
      probs_value->fail("expected " + std::to_string(fam.substitutions.size()) + " probabilities, found " +
                        std::to_string(fam.probs.size()));
    for (std::size_t i = 0; i < fam.probs.size(); ++i)
      if (!(fam.probs[i] >= 0.0)) probs_value->as_list()[i].fail("probabilities must be nonnegative");
    const double sum = std::accumulate(fam.probs.begin(), fam.probs.end(), 0.0);
    if (std::abs(sum - 1.0) > kProbTolerance) probs_value->fail(prob_sum_error(sum));
  } else {
    fam.probs.assign(fam.substitutions.size(), 1.0 / static_cast<double>(fam.substitutions.size()));
  }
  if (fam.cone && fam.alphabet_size() != 3)
    throw ParseError(1, 1, "cone sections are supported for 3-letter alphabets only");
  return fam;
}

FamilySpec load_family(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open family file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_family(ss.str());
}

Substitution example_substitution(long long m) {
  if (m < 1) throw std::invalid_argument("example substitution needs m >= 1");
  Word w(static_cast<std::size_t>(2 * m), 0);
  w.insert(w.end(), static_cast<std::size_t>(m * m), 1);
  w.push_back(2);
  return Substitution(3, {std::move(w), {0}, {1}}, "zeta_" + std::to_string(m));
}

Substitution shifted_substitution(long long m, long long k) {
  if (m < 1) throw std::invalid_argument("shifted substitution needs m >= 1");
  if (k < 1 || k > 2 * m) throw std::invalid_argument("shifted substitution needs 1 <= k <= 2m");
  Word w(static_cast<std::size_t>(k), 0);
  w.push_back(2);
  w.insert(w.end(), static_cast<std::size_t>(2 * m - k), 0);
  w.insert(w.end(), static_cast<std::size_t>(m * m), 1);
  return Substitution(3, {std::move(w), {0}, {1}}, "zeta_" + std::to_string(m) + "_" + std::to_string(k));
}

FamilySpec example_family(long long m) {
  FamilySpec f;
  f.name = "zeta_m" + std::to_string(m);
  f.substitutions = {example_substitution(m), example_substitution(m + 1)};
  f.probs = {0.5, 0.5};
  return f;
}

FamilySpec shifted_family(long long m, long long k) {
  FamilySpec f;
  f.name = "zeta_m" + std::to_string(m) + "_k" + std::to_string(k);
  f.substitutions = {shifted_substitution(m, k), shifted_substitution(m + 1, k)};
  f.probs = {0.5, 0.5};
  return f;
}

DirectiveStream::DirectiveStream(const FamilySpec& family, std::uint64_t seed, std::uint64_t stream)
    : rng_(seed, stream) {
  family.validate();
  double acc = 0;
  for (double p : family.probs) cumulative_.push_back(acc += p);
}

std::size_t DirectiveStream::index_at(std::uint64_t n) const {
  if (cumulative_.size() == 1) return 0;
  const double u = rng_.uniform_at(n) * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
  if (i >= cumulative_.size()) i = cumulative_.size() - 1;
  // Zero-weight indices are never drawn.
  while (i > 0 && cumulative_[i] == cumulative_[i - 1]) --i;
  return i;
}

std::vector<std::size_t> DirectiveStream::take(std::size_t n) {
  std::vector<std::size_t> out(n);
  for (auto& i : out) i = next();
  return out;
}

}  // namespace sadic
