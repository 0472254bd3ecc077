#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sadic/int_matrix.hpp"
#include "sadic/polynomial.hpp"
#include "sadic/substitution.hpp"

namespace sadic {

enum class Decision { yes, no, inconclusive };
const char* to_string(Decision d);

/// Numeric margin below which equalities of moduli and eigen-residuals are
/// not decided.
inline constexpr double kDecisionMargin = 1e-8;

/// Shortest index word q (breadth first, length <= max_length) with
/// gens[q0] * gens[q1] * ... entrywise positive.
std::optional<std::vector<std::size_t>> find_positive_word(std::span<const IntMatrix> gens, std::size_t max_length);

/// Every generator has determinant exactly 1.
bool check_unimodular(std::span<const IntMatrix> gens);

struct ProximalWitness {
  std::vector<std::size_t> word;
  double top_modulus = 0;     // of the normalized product
  double second_modulus = 0;  // likewise
  double relative_gap = 0;
};

/// Searches products of length <= max_length (at most `max_words` of them)
/// for a matrix with a simple eigenvalue strictly dominant in modulus.
std::optional<ProximalWitness> proximality_check(std::span<const IntMatrix> gens, std::size_t max_length,
                                                 std::size_t max_words = 4096);

struct HeuristicCheck {
  bool pass = false;
  std::string detail;
};

/// Necessary conditions for strong irreducibility only; `heuristic` is
/// always true. A finite union of invariant subspaces is not detected.
struct IrreducibilityReport {
  HeuristicCheck no_common_eigenvector;      // invariant lines
  HeuristicCheck no_common_hyperplane;       // eigenvectors of the (d-1)-th compound
  std::optional<HeuristicCheck> no_common_plane_adjugate;  // d = 3 only
  bool heuristic = true;

  bool all_pass() const {
    return no_common_eigenvector.pass && no_common_hyperplane.pass &&
           (!no_common_plane_adjugate || no_common_plane_adjugate->pass);
  }
};

IrreducibilityReport irreducibility_heuristic(std::span<const IntMatrix> gens);

/// (d-1)-th compound matrix; rows and columns indexed by the omitted index.
IntMatrix hyperplane_compound(const IntMatrix& m);

struct EigenData {
  IntPoly char_poly;  // det(M - xI), low degree first
  std::vector<PolyRoot> roots;
  BigInt discriminant;
  Decision moduli_distinct = Decision::inconclusive;
  Decision all_real = Decision::inconclusive;
};

EigenData eigen_report(const IntMatrix& m);

struct AperiodicityReport {
  bool established = false;
  std::string condition;  // which sufficient condition fired
};

/// Sufficient conditions only: nonzero determinants and either a proper
/// generator, a proper pairwise composition, or a strong-coincidence
/// witness for one of those.
AperiodicityReport aperiodicity_report(std::span<const Substitution> subs);

}  // namespace sadic
