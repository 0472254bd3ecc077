#include "sadic/substitution.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sadic {

Substitution::Substitution(std::size_t alphabet_size, std::vector<Word> rules, std::string name)
    : rules_(std::move(rules)), name_(std::move(name)) {
  if (alphabet_size == 0) throw std::invalid_argument("substitution: alphabet must be nonempty");
  if (rules_.size() != alphabet_size)
    throw std::invalid_argument("substitution: need exactly one rule per letter");
  for (std::size_t a = 0; a < rules_.size(); ++a) {
    if (rules_[a].empty())
      throw std::invalid_argument("substitution: image of letter " + std::to_string(a) + " is empty");
    for (Letter c : rules_[a])
      if (c >= alphabet_size)
        throw std::invalid_argument("substitution: letter " + std::to_string(c) + " in image of " +
                                    std::to_string(a) + " is out of range");
  }
}

Substitution Substitution::identity(std::size_t d) {
  std::vector<Word> rules(d);
  for (std::size_t a = 0; a < d; ++a) rules[a] = {static_cast<Letter>(a)};
  return Substitution(d, std::move(rules), "identity");
}

std::size_t Substitution::total_length() const {
  std::size_t n = 0;
  for (const auto& w : rules_) n += w.size();
  return n;
}

bool Substitution::in_primitive_class() const {
  std::vector<bool> seen(alphabet_size(), false);
  bool long_image = false;
  for (const auto& w : rules_) {
    long_image = long_image || w.size() > 1;
    for (Letter c : w) seen[c] = true;
  }
  return long_image && std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

std::string Substitution::to_dsl() const {
  std::ostringstream os;
  for (std::size_t a = 0; a < rules_.size(); ++a) {
    os << a << " ->";
    const Word& w = rules_[a];
    for (std::size_t i = 0; i < w.size();) {
      std::size_t j = i;
      while (j < w.size() && w[j] == w[i]) ++j;
      os << ' ' << w[i];
      if (j - i > 1) os << '^' << (j - i);
      i = j;
    }
    os << '\n';
  }
  return os.str();
}

IntMatrix substitution_matrix(const Substitution& s) {
  const std::size_t d = s.alphabet_size();
  IntMatrix m(d);
  std::vector<std::uint64_t> counts;
  for (std::size_t j = 0; j < d; ++j) {
    counts = abelianize(s.image(static_cast<Letter>(j)), d);
    for (std::size_t i = 0; i < d; ++i) m(i, j) = counts[i];
  }
  return m;
}

Substitution compose(const Substitution& outer, const Substitution& inner) {
  if (outer.alphabet_size() != inner.alphabet_size())
    throw std::invalid_argument("compose: alphabet sizes differ");
  const std::size_t d = outer.alphabet_size();
  std::vector<Word> rules(d);
  for (std::size_t a = 0; a < d; ++a) {
    for (Letter c : inner.image(static_cast<Letter>(a))) {
      const Word& w = outer.image(c);
      rules[a].insert(rules[a].end(), w.begin(), w.end());
    }
  }
  std::string name = outer.name().empty() || inner.name().empty() ? std::string{}
                                                                   : outer.name() + "*" + inner.name();
  return Substitution(d, std::move(rules), std::move(name));
}

Substitution compose_all(std::span<const Substitution> list) {
  if (list.empty()) throw std::invalid_argument("compose_all: empty list");
  Substitution acc = list.back();
  for (std::size_t i = list.size() - 1; i-- > 0;) acc = compose(list[i], acc);
  return acc;
}

std::vector<std::uint64_t> abelianize(std::span<const Letter> w, std::size_t d) {
  std::vector<std::uint64_t> counts(d, 0);
  for (Letter c : w) ++counts.at(c);
  return counts;
}

bool is_left_proper(const Substitution& s) {
  const Letter first = s.image(0).front();
  for (const auto& w : s.rules())
    if (w.front() != first) return false;
  return true;
}

bool is_right_proper(const Substitution& s) {
  const Letter last = s.image(0).back();
  for (const auto& w : s.rules())
    if (w.back() != last) return false;
  return true;
}

// ---------------------------------------------------------------------------

WordStream::WordStream(std::vector<const Substitution*> list, Letter b, std::optional<std::size_t> mark_level)
    : list_(std::move(list)), root_{b}, mark_level_(mark_level) {
  for (const auto* s : list_) {
    if (s == nullptr) throw std::invalid_argument("WordStream: null substitution");
    if (s->alphabet_size() != list_.front()->alphabet_size())
      throw std::invalid_argument("WordStream: alphabet sizes differ");
  }
  if (!list_.empty() && b >= list_.front()->alphabet_size())
    throw std::invalid_argument("WordStream: starting letter out of range");
  if (mark_level_ && *mark_level_ > list_.size())
    throw std::invalid_argument("WordStream: mark level exceeds depth");
  stack_.push_back({&root_, 0});
}

std::optional<Letter> WordStream::next() {
  if (done_) return std::nullopt;
  const std::size_t depth = list_.size();
  while (true) {
    Frame& top = stack_.back();
    const std::size_t level = depth - (stack_.size() - 1);
    if (top.pos >= top.word->size()) {
      stack_.pop_back();
      if (stack_.empty()) {
        done_ = true;
        return std::nullopt;
      }
      ++stack_.back().pos;
      continue;
    }
    const Letter c = (*top.word)[top.pos];
    if (mark_level_ && *mark_level_ == level) pending_tile_ = static_cast<int>(c);
    if (level == 0) {
      ++top.pos;
      last_tile_ = pending_tile_;
      pending_tile_ = -1;
      return c;
    }
    stack_.push_back({&list_[level - 1]->image(c), 0});
  }
}

std::uint64_t composed_length(std::span<const Substitution> list, Letter b) {
  if (list.empty()) return 1;
  const std::size_t d = list.front().alphabet_size();
  std::vector<BigInt> v(d, 0);
  v.at(b) = 1;
  for (std::size_t i = list.size(); i-- > 0;) {
    std::vector<BigInt> next(d, 0);
    for (std::size_t a = 0; a < d; ++a) {
      if (v[a] == 0) continue;
      for (Letter c : list[i].image(static_cast<Letter>(a))) next[c] += v[a];
    }
    v = std::move(next);
  }
  BigInt total = std::accumulate(v.begin(), v.end(), BigInt(0));
  const BigInt max = std::numeric_limits<std::uint64_t>::max();
  return total > max ? std::numeric_limits<std::uint64_t>::max() : total.convert_to<std::uint64_t>();
}

Word iterate_word(std::span<const Substitution> list, Letter b, std::size_t max_len, std::size_t length_cap) {
  const std::uint64_t full = composed_length(list, b);
  const std::uint64_t wanted = std::min<std::uint64_t>(full, max_len);
  if (wanted > length_cap)
    throw std::length_error("iterate_word: " + std::to_string(wanted) + " letters exceeds the cap of " +
                            std::to_string(length_cap));
  std::vector<const Substitution*> ptrs;
  for (const auto& s : list) ptrs.push_back(&s);
  WordStream stream(std::move(ptrs), b);
  Word out;
  out.reserve(static_cast<std::size_t>(wanted));
  while (out.size() < wanted) out.push_back(*stream.next());
  return out;
}

// ---------------------------------------------------------------------------

namespace {

using Abel = std::vector<std::uint64_t>;

// For every letter b, the set of abelianizations of the prefixes that
// precede an occurrence of b in w.
std::vector<std::set<Abel>> prefix_classes(const Word& w, std::size_t d) {
  std::vector<std::set<Abel>> out(d);
  Abel counts(d, 0);
  for (Letter c : w) {
    out[c].insert(counts);
    ++counts[c];
  }
  return out;
}

std::optional<CoincidenceWitness> search_side(const std::vector<Word>& images, std::size_t d, std::size_t k,
                                              CoincidenceSide side) {
  std::vector<std::vector<std::set<Abel>>> classes;
  classes.reserve(d);
  for (const auto& w : images) {
    if (side == CoincidenceSide::prefix) {
      classes.push_back(prefix_classes(w, d));
    } else {
      Word rev(w.rbegin(), w.rend());
      classes.push_back(prefix_classes(rev, d));
    }
  }
  for (std::size_t b = 0; b < d; ++b) {
    std::set<Abel> common = classes[0][b];
    for (std::size_t a = 1; a < d && !common.empty(); ++a) {
      std::set<Abel> next;
      std::set_intersection(common.begin(), common.end(), classes[a][b].begin(), classes[a][b].end(),
                            std::inserter(next, next.begin()));
      common = std::move(next);
    }
    if (common.empty()) continue;
    auto best = std::min_element(common.begin(), common.end(), [](const Abel& x, const Abel& y) {
      const auto sx = std::accumulate(x.begin(), x.end(), std::uint64_t{0});
      const auto sy = std::accumulate(y.begin(), y.end(), std::uint64_t{0});
      return sx != sy ? sx < sy : x < y;
    });
    return CoincidenceWitness{k, static_cast<Letter>(b), side, *best};
  }
  return std::nullopt;
}

}  // namespace

CoincidenceResult strong_coincidence(const Substitution& s, std::size_t k_max, std::size_t word_cap) {
  if (k_max == 0) throw std::invalid_argument("strong_coincidence: k_max must be >= 1");
  const std::size_t d = s.alphabet_size();
  CoincidenceResult result;
  std::vector<Word> images(d);
  for (std::size_t a = 0; a < d; ++a) images[a] = {static_cast<Letter>(a)};
  for (std::size_t k = 1; k <= k_max; ++k) {
    for (auto& w : images) {
      std::size_t len = 0;
      for (Letter c : w) len += s.image(c).size();
      if (len > word_cap) {
        result.status = SearchStatus::inconclusive;
        return result;
      }
      Word next;
      next.reserve(len);
      for (Letter c : w) next.insert(next.end(), s.image(c).begin(), s.image(c).end());
      w = std::move(next);
    }
    result.powers_checked = k;
    for (auto side : {CoincidenceSide::prefix, CoincidenceSide::suffix}) {
      if (auto w = search_side(images, d, k, side)) {
        result.status = SearchStatus::found;
        result.witness = std::move(w);
        return result;
      }
    }
  }
  result.status = SearchStatus::not_found;
  return result;
}

}  // namespace sadic
