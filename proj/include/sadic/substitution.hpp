#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sadic/int_matrix.hpp"

namespace sadic {

using Letter = std::uint32_t;
using Word = std::vector<Letter>;

/// A map from letters 0..d-1 to nonempty words over the same alphabet.
class Substitution {
 public:
  Substitution(std::size_t alphabet_size, std::vector<Word> rules, std::string name = {});

  static Substitution identity(std::size_t d);

  std::size_t alphabet_size() const { return rules_.size(); }
  const Word& image(Letter a) const { return rules_.at(a); }
  const std::vector<Word>& rules() const { return rules_; }
  const std::string& name() const { return name_; }
  std::size_t total_length() const;

  /// Every letter occurs in some image and some image has length > 1.
  bool in_primitive_class() const;

  bool operator==(const Substitution& other) const { return rules_ == other.rules_; }

  /// Rules in the text DSL, one line per letter, with runs collapsed.
  std::string to_dsl() const;

 private:
  std::vector<Word> rules_;
  std::string name_;
};

/// Entry (i, j) counts the occurrences of letter i in the image of j.
IntMatrix substitution_matrix(const Substitution& s);

/// (outer o inner)(a) = outer applied letterwise to inner(a).
Substitution compose(const Substitution& outer, const Substitution& inner);

/// Left-to-right composition of a whole list: list[0] o list[1] o ...
Substitution compose_all(std::span<const Substitution> list);

/// Counts of each letter in w (the abelianization).
std::vector<std::uint64_t> abelianize(std::span<const Letter> w, std::size_t d);

bool is_left_proper(const Substitution& s);
bool is_right_proper(const Substitution& s);

/// Default cap on the number of letters that may ever be materialized.
inline constexpr std::size_t kDefaultLengthCap = 100'000'000;

/// Streams the letters of list[0] o ... o list[n-1] (b) one at a time.
///
/// Memory is O(n) regardless of the word length. Optionally reports, for a
/// chosen level l, where each supertile list[0] o ... o list[l-1] (a) begins.
class WordStream {
 public:
  WordStream(std::vector<const Substitution*> list, Letter b, std::optional<std::size_t> mark_level = {});

  /// Next letter, or nullopt when the word is exhausted.
  std::optional<Letter> next();

  /// Type of the level-`mark_level` supertile starting at the letter most
  /// recently returned, or -1 when none starts there.
  int last_tile_start() const { return last_tile_; }

 private:
  struct Frame {
    const Word* word;
    std::size_t pos;
  };

  std::vector<const Substitution*> list_;
  std::vector<Frame> stack_;
  Word root_;
  std::optional<std::size_t> mark_level_;
  int pending_tile_ = -1;
  int last_tile_ = -1;
  bool done_ = false;
};

/// Exact length of list[0] o ... o list[n-1] (b), saturating at uint64 max.
std::uint64_t composed_length(std::span<const Substitution> list, Letter b);

/// First max_len letters of list[0] o ... o list[n-1] (b). The empty list
/// yields the single letter b. Throws if more than length_cap letters would
/// have to be produced.
Word iterate_word(std::span<const Substitution> list, Letter b, std::size_t max_len,
                  std::size_t length_cap = kDefaultLengthCap);

enum class CoincidenceSide { prefix, suffix };

struct CoincidenceWitness {
  std::size_t power = 0;  // k
  Letter letter = 0;      // b
  CoincidenceSide side = CoincidenceSide::prefix;
  std::vector<std::uint64_t> abelianization;  // shared by all W_a (or all S_a)
};

enum class SearchStatus { found, not_found, inconclusive };

struct CoincidenceResult {
  SearchStatus status = SearchStatus::not_found;
  std::optional<CoincidenceWitness> witness;
  std::size_t powers_checked = 0;
};

/// Searches k = 1..k_max for the strong coincidence condition on s^k.
/// Prefix side is tried before suffix side; ties go to the smallest letter
/// and then to the shortest prefix (suffix).
CoincidenceResult strong_coincidence(const Substitution& s, std::size_t k_max = 8,
                                     std::size_t word_cap = 1'000'000);

}  // namespace sadic
