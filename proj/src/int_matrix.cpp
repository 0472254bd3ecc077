#include "sadic/int_matrix.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

namespace sadic {

IntMatrix::IntMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long long>> rows)
    : dim_(rows.size()), entries_(rows.size() * rows.size()) {
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != dim_) throw std::invalid_argument("IntMatrix: rows must form a square matrix");
    std::size_t j = 0;
    for (long long v : row) (*this)(i, j++) = v;
    ++i;
  }
}

IntMatrix IntMatrix::identity(std::size_t dim) {
  IntMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& rhs) const {
  if (rhs.dim_ != dim_) throw std::invalid_argument("IntMatrix: dimension mismatch in product");
  IntMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t k = 0; k < dim_; ++k) {
      const BigInt& a = (*this)(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < dim_; ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

IntMatrix IntMatrix::operator-(const IntMatrix& rhs) const {
  if (rhs.dim_ != dim_) throw std::invalid_argument("IntMatrix: dimension mismatch in difference");
  IntMatrix out(dim_);
  for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = entries_[i] - rhs.entries_[i];
  return out;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

BigInt bareiss_determinant(std::vector<std::vector<BigInt>> a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  BigInt sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && a[swap_row][k] == 0) ++swap_row;
      if (swap_row == n) return 0;
      std::swap(a[k], a[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      }
    }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

BigInt IntMatrix::determinant() const {
  std::vector<std::vector<BigInt>> a(dim_, std::vector<BigInt>(dim_));
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) a[i][j] = (*this)(i, j);
  return bareiss_determinant(std::move(a));
}

IntMatrix IntMatrix::adjugate() const {
  IntMatrix adj(dim_);
  if (dim_ == 1) {
    adj(0, 0) = 1;
    return adj;
  }
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t c = 0; c < dim_; ++c) {
      std::vector<std::vector<BigInt>> minor;
      minor.reserve(dim_ - 1);
      for (std::size_t i = 0; i < dim_; ++i) {
        if (i == r) continue;
        std::vector<BigInt> row;
        row.reserve(dim_ - 1);
        for (std::size_t j = 0; j < dim_; ++j)
          if (j != c) row.push_back((*this)(i, j));
        minor.push_back(std::move(row));
      }
      BigInt cof = bareiss_determinant(std::move(minor));
      if ((r + c) % 2 == 1) cof = -cof;
      adj(c, r) = cof;
    }
  }
  return adj;
}

IntMatrix IntMatrix::inverse_unimodular() const {
  const BigInt det = determinant();
  if (det != 1 && det != -1) throw std::domain_error("IntMatrix: inverse requires determinant +-1");
  IntMatrix inv = adjugate();
  if (det == -1)
    for (auto& e : inv.entries_) e = -e;
  return inv;
}

bool IntMatrix::is_nonnegative() const {
  for (const auto& e : entries_)
    if (e < 0) return false;
  return true;
}

bool IntMatrix::is_positive() const {
  for (const auto& e : entries_)
    if (e <= 0) return false;
  return true;
}

BigInt IntMatrix::entry_sum() const {
  BigInt s = 0;
  for (const auto& e : entries_) s += e;
  return s;
}

BigInt IntMatrix::column_sum(std::size_t j) const {
  BigInt s = 0;
  for (std::size_t i = 0; i < dim_; ++i) s += (*this)(i, j);
  return s;
}

Eigen::MatrixXd IntMatrix::to_double() const {
  Eigen::MatrixXd m(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j).convert_to<double>();
  return m;
}

std::vector<std::vector<long long>> IntMatrix::to_rows() const {
  std::vector<std::vector<long long>> rows(dim_, std::vector<long long>(dim_));
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) rows[i][j] = (*this)(i, j).convert_to<long long>();
  return rows;
}

std::string IntMatrix::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < dim_; ++i) {
    os << (i ? ",[" : "[");
    for (std::size_t j = 0; j < dim_; ++j) os << (j ? "," : "") << (*this)(i, j);
    os << ']';
  }
  os << ']';
  return os.str();
}

}  // namespace sadic
