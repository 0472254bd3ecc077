#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sadic/int_matrix.hpp"
#include "sadic/substitution.hpp"

namespace sadic {

/// Error with a 1-based source position.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

struct SourceLine {
  std::string text;  // comment stripped, not trimmed
  int line = 0;
};

/// Parses substitution rules, one line per letter:
///
///     0 -> 0^46 1^529 2
///     1 -> 0
///     2 -> 1
///
/// The alphabet size is the number of rule lines; every letter 0..d-1 must
/// have exactly one rule.
Substitution parse_substitution(const std::vector<SourceLine>& lines, std::string name = {},
                                int section_line = 1);
Substitution parse_substitution(std::string_view text, std::string name = {});

/// A scalar or bracketed list on the right of `key = value`.
struct TextValue {
  bool is_list = false;
  std::string scalar;
  std::vector<TextValue> items;
  int line = 0;
  int column = 0;

  [[noreturn]] void fail(const std::string& message) const;
  std::string as_string() const;
  double as_double() const;
  long long as_int() const;
  std::uint64_t as_uint64() const;
  bool as_bool() const;
  /// Accepts integers, decimals and p/q fractions.
  Rational as_rational() const;
  const std::vector<TextValue>& as_list() const;
  std::vector<double> as_double_list() const;
  std::vector<long long> as_int_list() const;
};

struct KeyValue {
  std::string key;
  TextValue value;
  int line = 0;
  int column = 0;
};

/// One `[kind label]` block of a sectioned file. Lines before the first
/// header form a section with an empty kind.
struct Section {
  std::string kind;
  std::string label;
  int line = 0;
  std::vector<SourceLine> lines;

  /// Interprets every nonblank line as `key = value`.
  std::vector<KeyValue> key_values() const;
};

std::vector<Section> split_sections(std::string_view text);

TextValue parse_value(std::string_view text, int line, int column);

bool is_blank(std::string_view s);

}  // namespace sadic
