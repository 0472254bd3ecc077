#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

namespace sadic {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Square matrix of arbitrary-precision integers.
///
/// Houses substitution matrices, their products, transposes and (for
/// unimodular matrices) inverses. All arithmetic is exact.
class IntMatrix {
 public:
  IntMatrix() = default;
  explicit IntMatrix(std::size_t dim);
  IntMatrix(std::initializer_list<std::initializer_list<long long>> rows);

  static IntMatrix identity(std::size_t dim);

  std::size_t dim() const { return dim_; }

  BigInt& operator()(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
  const BigInt& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }

  IntMatrix operator*(const IntMatrix& rhs) const;
  IntMatrix operator-(const IntMatrix& rhs) const;
  bool operator==(const IntMatrix& rhs) const = default;

  IntMatrix transpose() const;
  /// Exact determinant (fraction-free Bareiss elimination).
  BigInt determinant() const;
  /// Classical adjoint; M * adj(M) = det(M) I.
  IntMatrix adjugate() const;
  /// Exact inverse of a matrix with determinant +-1.
  IntMatrix inverse_unimodular() const;

  bool is_nonnegative() const;
  bool is_positive() const;
  BigInt entry_sum() const;
  BigInt column_sum(std::size_t j) const;

  Eigen::MatrixXd to_double() const;
  std::vector<std::vector<long long>> to_rows() const;
  std::string to_string() const;

 private:
  std::size_t dim_ = 0;
  std::vector<BigInt> entries_;
};

/// Determinant of a square array of BigInt, destroying the input.
BigInt bareiss_determinant(std::vector<std::vector<BigInt>> a);

}  // namespace sadic
