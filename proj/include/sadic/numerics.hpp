#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace sadic {

/// Compensated (Neumaier) running sum.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Pairwise summation; the result depends only on the order of `xs`.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
  double stderr_of_mean = 0.0;
};

inline MeanStd mean_std(std::span<const double> xs) {
  MeanStd r;
  if (xs.empty()) return r;
  r.mean = pairwise_sum(xs) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    std::vector<double> sq;
    sq.reserve(xs.size());
    for (double x : xs) sq.push_back((x - r.mean) * (x - r.mean));
    r.stddev = std::sqrt(pairwise_sum(sq) / static_cast<double>(xs.size() - 1));
    r.stderr_of_mean = r.stddev / std::sqrt(static_cast<double>(xs.size()));
  }
  return r;
}

/// Standard error of the mean of a correlated series by batch means.
inline double batch_means_stderr(std::span<const double> xs, std::size_t batches = 20) {
  if (xs.size() < 2 * batches) return mean_std(xs).stderr_of_mean;
  const std::size_t per = xs.size() / batches;
  std::vector<double> means;
  means.reserve(batches);
  for (std::size_t b = 0; b < batches; ++b) means.push_back(pairwise_sum(xs.subspan(b * per, per)) / per);
  return mean_std(means).stderr_of_mean;
}

}  // namespace sadic

// worker_threads() and parallel_for(): SADIC_THREADS caps the pool.
#include "sadic/detail/parallel.hpp"
