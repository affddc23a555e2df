#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace hmmc {

// Compensated (Neumaier) summation.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Mean and unbiased variance from compensated sums of x and x^2.
class RunningStats {
 public:
  void add(double x) {
    sum_.add(x);
    sq_.add(x * x);
    ++n_;
  }
  std::size_t count() const { return n_; }
  double mean() const { return n_ == 0 ? 0.0 : sum_.value() / static_cast<double>(n_); }
  double variance() const {
    if (n_ < 2) return 0.0;
    const double n = static_cast<double>(n_);
    const double m = mean();
    const double v = (sq_.value() - n * m * m) / (n - 1.0);
    return v > 0.0 ? v : 0.0;
  }
  double std() const { return std::sqrt(variance()); }
  double standard_error() const {
    return n_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
  }

 private:
  NeumaierSum sum_;
  NeumaierSum sq_;
  std::size_t n_ = 0;
};

inline double sample_std(std::span<const double> xs, double mean) {
  if (xs.size() < 2) return 0.0;
  NeumaierSum acc;
  for (const double x : xs) acc.add((x - mean) * (x - mean));
  return std::sqrt(acc.value() / static_cast<double>(xs.size() - 1));
}

}  // namespace hmmc
