#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sadic/cone.hpp"
#include "sadic/rng.hpp"
#include "sadic/substitution.hpp"

namespace sadic {

/// Finite family of substitutions with Bernoulli weights.
struct FamilySpec {
  std::string name;
  std::vector<Substitution> substitutions;
  std::vector<double> probs;
  std::uint64_t rng_seed = 0;
  std::optional<ConeSpec> cone;

  std::size_t size() const { return substitutions.size(); }
  std::size_t alphabet_size() const { return substitutions.front().alphabet_size(); }
  std::vector<IntMatrix> matrices() const;

  /// Throws std::invalid_argument on an empty family, mismatched alphabets,
  /// negative weights or weights not summing to 1 within 1e-12.
  void validate() const;

  /// Family file text that parses back to an equal family.
  std::string to_text() const;
};

/// Parses a family file:
///
///     [family]
///     name = zeta_m23
///     probs = [0.5, 0.5]
///
///     [substitution zeta_23]
///     0 -> 0^46 1^529 2
///     1 -> 0
///     2 -> 1
///
///     [substitution zeta_24]
///     ...
///
/// An optional `[cone]` section supplies a ConeSpec (keys normalize,
/// ratio_index, lower, upper, positive_only, stated_expansion). Omitted
/// probs mean uniform weights. Errors are ParseError with line and column.
FamilySpec parse_family(std::string_view text);
FamilySpec load_family(const std::string& path);

/// 0 -> 0^{2m} 1^{m^2} 2, 1 -> 0, 2 -> 1.
Substitution example_substitution(long long m);
/// 0 -> 0^k 2 0^{2m-k} 1^{m^2}, 1 -> 0, 2 -> 1, with 1 <= k <= 2m.
Substitution shifted_substitution(long long m, long long k);

/// {zeta_m, zeta_{m+1}} with equal weights.
FamilySpec example_family(long long m);
/// {zeta_{m,k}, zeta_{m+1,k}} with equal weights.
FamilySpec shifted_family(long long m, long long k);

/// Lazy i.i.d. index stream; draw n depends only on (seed, stream, n).
class DirectiveStream {
 public:
  DirectiveStream(const FamilySpec& family, std::uint64_t seed, std::uint64_t stream = streams::kDirective);

  std::size_t index_at(std::uint64_t n) const;
  std::size_t next() { return index_at(position_++); }
  std::vector<std::size_t> take(std::size_t n);
  std::uint64_t position() const { return position_; }

 private:
  std::vector<double> cumulative_;
  CounterRng rng_;
  std::uint64_t position_ = 0;
};

}  // namespace sadic
