#include "sadic/dsl.hpp"

#include <cctype>
#include <charconv>
#include <optional>

namespace sadic {

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(message) {}

bool is_blank(std::string_view s) {
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

namespace {

class Cursor {
 public:
  Cursor(std::string_view text, int line, int column0) : text_(text), line_(line), col0_(column0) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  int column() const { return col0_ + static_cast<int>(pos_); }
  int line() const { return line_; }
  void advance(std::size_t n = 1) { pos_ += n; }
  bool consume(std::string_view token) {
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }
  std::optional<std::uint64_t> number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) return std::nullopt;
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc()) throw ParseError(line_, col0_ + static_cast<int>(start), "number out of range");
    return v;
  }
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(line_, column(), message); }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
  int col0_;
};

std::vector<SourceLine> to_lines(std::string_view text) {
  std::vector<SourceLine> lines;
  int line_no = 1;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    const std::size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    lines.push_back({std::string(raw), line_no});
    ++line_no;
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

constexpr std::uint64_t kMaxRun = 100'000'000;

}  // namespace

Substitution parse_substitution(const std::vector<SourceLine>& lines, std::string name, int section_line) {
  struct PendingLetter {
    std::uint64_t letter;
    int line, column;
  };
  struct Rule {
    Word word;
    std::vector<PendingLetter> atoms;
    int line;
  };
  std::vector<std::optional<Rule>> rules;
  std::vector<PendingLetter> heads;

  for (const auto& src : lines) {
    if (is_blank(src.text)) continue;
    Cursor cur(src.text, src.line, 1);
    cur.skip_ws();
    const int head_col = cur.column();
    auto head = cur.number();
    if (!head) cur.fail("expected a letter at the start of the rule");
    cur.skip_ws();
    if (!cur.consume("->")) cur.fail("expected '->'");
    Rule rule{{}, {}, src.line};
    while (true) {
      cur.skip_ws();
      if (cur.at_end()) break;
      const int atom_col = cur.column();
      auto letter = cur.number();
      if (!letter) cur.fail(std::string("unexpected character '") + cur.peek() + "'");
      std::uint64_t count = 1;
      if (cur.peek() == '^') {
        cur.advance();
        auto c = cur.number();
        if (!c) cur.fail("expected a repeat count after '^'");
        if (*c == 0) throw ParseError(src.line, atom_col, "repeat count must be positive");
        if (*c > kMaxRun) throw ParseError(src.line, atom_col, "repeat count too large");
        count = *c;
      }
      rule.atoms.push_back({*letter, src.line, atom_col});
      rule.word.insert(rule.word.end(), count, static_cast<Letter>(*letter));
    }
    if (rule.word.empty()) throw ParseError(src.line, cur.column(), "image of letter " + std::to_string(*head) + " is empty");
    if (*head >= lines.size())
      throw ParseError(src.line, head_col, "letter " + std::to_string(*head) + " is out of range");
    if (*head >= rules.size()) rules.resize(*head + 1);
    if (rules[*head]) throw ParseError(src.line, head_col, "duplicate rule for letter " + std::to_string(*head));
    heads.push_back({*head, src.line, head_col});
    rules[*head] = std::move(rule);
  }

  const std::size_t d = heads.size();
  if (d == 0) throw ParseError(section_line, 1, "no substitution rules");
  for (const auto& h : heads)
    if (h.letter >= d)
      throw ParseError(h.line, h.column,
                       "letter " + std::to_string(h.letter) + " is out of range for an alphabet of size " +
                           std::to_string(d));
  std::vector<Word> words(d);
  for (std::size_t a = 0; a < d; ++a) {
    if (!rules[a]) throw ParseError(section_line, 1, "missing rule for letter " + std::to_string(a));
    for (const auto& atom : rules[a]->atoms)
      if (atom.letter >= d)
        throw ParseError(atom.line, atom.column,
                         "letter " + std::to_string(atom.letter) + " is out of range for an alphabet of size " +
                             std::to_string(d));
    words[a] = std::move(rules[a]->word);
  }
  return Substitution(d, std::move(words), std::move(name));
}

Substitution parse_substitution(std::string_view text, std::string name) {
  return parse_substitution(to_lines(text), std::move(name), 1);
}

// ---------------------------------------------------------------------------

void TextValue::fail(const std::string& message) const { throw ParseError(line, column, message); }

std::string TextValue::as_string() const {
  if (is_list) fail("expected a scalar, found a list");
  return scalar;
}

double TextValue::as_double() const {
  const std::string s = as_string();
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail("expected a number, found '" + s + "'");
  return v;
}

long long TextValue::as_int() const {
  const std::string s = as_string();
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail("expected an integer, found '" + s + "'");
  return v;
}

std::uint64_t TextValue::as_uint64() const {
  const std::string s = as_string();
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail("expected a nonnegative integer, found '" + s + "'");
  return v;
}

bool TextValue::as_bool() const {
  const std::string s = as_string();
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  fail("expected true or false, found '" + s + "'");
}

Rational TextValue::as_rational() const {
  const std::string s = as_string();
  auto parse_int = [&](std::string_view t) -> BigInt {
    if (t.empty()) fail("malformed rational '" + s + "'");
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) fail("malformed rational '" + s + "'");
    for (std::size_t j = i; j < t.size(); ++j)
      if (!std::isdigit(static_cast<unsigned char>(t[j]))) fail("malformed rational '" + s + "'");
    return BigInt(std::string(t[0] == '+' ? t.substr(1) : t));
  };
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    BigInt den = parse_int(std::string_view(s).substr(slash + 1));
    if (den == 0) fail("zero denominator in '" + s + "'");
    return Rational(parse_int(std::string_view(s).substr(0, slash)), den);
  }
  const auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    BigInt den = 1;
    for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    return Rational(parse_int(digits), den);
  }
  return Rational(parse_int(s));
}

const std::vector<TextValue>& TextValue::as_list() const {
  if (!is_list) fail("expected a list in brackets");
  return items;
}

std::vector<double> TextValue::as_double_list() const {
  std::vector<double> out;
  for (const auto& v : as_list()) out.push_back(v.as_double());
  return out;
}

std::vector<long long> TextValue::as_int_list() const {
  std::vector<long long> out;
  for (const auto& v : as_list()) out.push_back(v.as_int());
  return out;
}

namespace {

TextValue parse_value_at(Cursor& cur) {
  cur.skip_ws();
  TextValue v;
  v.line = cur.line();
  v.column = cur.column();
  if (cur.peek() == '[') {
    cur.advance();
    v.is_list = true;
    cur.skip_ws();
    if (cur.peek() == ']') {
      cur.advance();
      return v;
    }
    while (true) {
      v.items.push_back(parse_value_at(cur));
      cur.skip_ws();
      if (cur.peek() == ',') {
        cur.advance();
        continue;
      }
      if (cur.peek() == ']') {
        cur.advance();
        return v;
      }
      cur.fail(cur.at_end() ? "unterminated list" : "expected ',' or ']'");
    }
  }
  if (cur.peek() == '"') {
    cur.advance();
    while (!cur.at_end() && cur.peek() != '"') {
      v.scalar.push_back(cur.peek());
      cur.advance();
    }
    if (cur.at_end()) cur.fail("unterminated string");
    cur.advance();
    return v;
  }
  while (!cur.at_end() && cur.peek() != ',' && cur.peek() != ']' && cur.peek() != '[') {
    v.scalar.push_back(cur.peek());
    cur.advance();
  }
  while (!v.scalar.empty() && std::isspace(static_cast<unsigned char>(v.scalar.back()))) v.scalar.pop_back();
  if (v.scalar.empty()) throw ParseError(v.line, v.column, "expected a value");
  return v;
}

}  // namespace

TextValue parse_value(std::string_view text, int line, int column) {
  Cursor cur(text, line, column);
  TextValue v = parse_value_at(cur);
  cur.skip_ws();
  if (!cur.at_end()) cur.fail("unexpected trailing characters");
  return v;
}

std::vector<KeyValue> Section::key_values() const {
  std::vector<KeyValue> out;
  for (const auto& src : lines) {
    if (is_blank(src.text)) continue;
    const std::string& t = src.text;
    const auto eq = t.find('=');
    std::size_t k0 = 0;
    while (k0 < t.size() && std::isspace(static_cast<unsigned char>(t[k0]))) ++k0;
    if (eq == std::string::npos) throw ParseError(src.line, static_cast<int>(k0) + 1, "expected 'key = value'");
    std::size_t k1 = eq;
    while (k1 > k0 && std::isspace(static_cast<unsigned char>(t[k1 - 1]))) --k1;
    if (k1 == k0) throw ParseError(src.line, static_cast<int>(k0) + 1, "missing key before '='");
    std::string key = t.substr(k0, k1 - k0);
    for (char c : key)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
        throw ParseError(src.line, static_cast<int>(k0) + 1, "invalid key '" + key + "'");
    const std::string_view rest = std::string_view(t).substr(eq + 1);
    out.push_back({key, parse_value(rest, src.line, static_cast<int>(eq) + 2), src.line, static_cast<int>(k0) + 1});
  }
  return out;
}

std::vector<Section> split_sections(std::string_view text) {
  std::vector<Section> sections;
  sections.push_back({"", "", 1, {}});
  for (auto& src : to_lines(text)) {
    std::size_t i = 0;
    while (i < src.text.size() && std::isspace(static_cast<unsigned char>(src.text[i]))) ++i;
    if (i < src.text.size() && src.text[i] == '[') {
      const auto close = src.text.find(']', i);
      if (close == std::string::npos) throw ParseError(src.line, static_cast<int>(i) + 1, "unterminated section header");
      if (!is_blank(std::string_view(src.text).substr(close + 1)))
        throw ParseError(src.line, static_cast<int>(close) + 2, "unexpected text after section header");
      std::string inner = src.text.substr(i + 1, close - i - 1);
      std::size_t a = inner.find_first_not_of(" \t");
      if (a == std::string::npos) throw ParseError(src.line, static_cast<int>(i) + 2, "empty section header");
      inner = inner.substr(a);
      inner.erase(inner.find_last_not_of(" \t") + 1);
      const auto sp = inner.find_first_of(" \t");
      Section s;
      s.kind = inner.substr(0, sp);
      if (sp != std::string::npos) {
        s.label = inner.substr(sp);
        s.label.erase(0, s.label.find_first_not_of(" \t"));
      }
      s.line = src.line;
      sections.push_back(std::move(s));
      continue;
    }
    sections.back().lines.push_back(std::move(src));
  }
  return sections;
}

}  // namespace sadic
