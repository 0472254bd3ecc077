#pragma once
// Slow reference implementations used as test oracles. Each one follows the
// textbook definition and shares no code with the library.

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sadic/substitution.hpp"

namespace oracle {

using cd = std::complex<double>;

// Entry (b, c) sums exp(-2 pi i <p, t>) over the occurrences of c in the
// image of b, with p the letter counts of the prefix before it.
inline Eigen::MatrixXcd trig_matrix(const sadic::Substitution& s, const std::vector<double>& t) {
  const std::size_t d = s.alphabet_size();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t b = 0; b < d; ++b) {
    std::vector<long long> prefix(d, 0);
    for (auto c : s.image(static_cast<sadic::Letter>(b))) {
      double phase = 0;
      for (std::size_t i = 0; i < d; ++i) phase += static_cast<double>(prefix[i]) * t[i];
      m(b, c) += std::polar(1.0, -2 * std::numbers::pi * phase);
      ++prefix[c];
    }
  }
  return m;
}

// Cofactor expansion along the first row.
inline long long laplace_det(const std::vector<std::vector<long long>>& a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  if (n == 1) return a[0][0];
  long long det = 0;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<long long>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<long long> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(a[i][k]);
      minor.push_back(row);
    }
    det += (j % 2 ? -1 : 1) * a[0][j] * laplace_det(minor);
  }
  return det;
}

// list[0] o ... o list[n-1] (b), expanded innermost first.
inline sadic::Word naive_iterate(const std::vector<sadic::Substitution>& list, sadic::Letter b) {
  sadic::Word w{b};
  for (auto it = list.rbegin(); it != list.rend(); ++it) {
    sadic::Word next;
    for (auto a : w)
      for (auto c : it->image(a)) next.push_back(c);
    w = std::move(next);
  }
  return w;
}

// Midpoint rule for the integral of log|p(e^{2 pi i t})|, coefficients low
// degree first.
inline double midpoint_mahler(const std::vector<long long>& c, std::size_t nodes) {
  double sum = 0;
  for (std::size_t j = 0; j < nodes; ++j) {
    const cd z = std::polar(1.0, 2 * std::numbers::pi * (j + 0.5) / static_cast<double>(nodes));
    cd v = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * z + static_cast<double>(*it);
    sum += std::log(std::abs(v));
  }
  return sum / static_cast<double>(nodes);
}

// Random substitution on d letters with images of length 1..max_len, every
// letter present in some image and at least one image longer than 1.
inline sadic::Substitution random_substitution(std::mt19937_64& gen, std::size_t d, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<sadic::Letter> letter(0, static_cast<sadic::Letter>(d - 1));
  for (;;) {
    std::vector<sadic::Word> rules(d);
    for (auto& w : rules) {
      w.resize(len(gen));
      for (auto& a : w) a = letter(gen);
    }
    sadic::Substitution s(d, rules);
    if (s.in_primitive_class()) return s;
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace oracle
