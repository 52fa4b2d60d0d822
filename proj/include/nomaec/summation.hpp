#pragma once

#include <cmath>
#include <cstddef>

namespace nomaec {

/// Neumaier's variant of Kahan summation. Unlike plain Kahan it stays
/// accurate when an addend is larger in magnitude than the running sum,
/// which is the common case in alternating binomial sums.
class CompensatedSum {
public:
  CompensatedSum& operator+=(double value) noexcept {
    const double t = sum_ + value;
    if (std::fabs(sum_) >= std::fabs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  CompensatedSum& operator+=(const CompensatedSum& other) noexcept {
    *this += other.sum_;
    *this += other.compensation_;
    return *this;
  }

  void scale(double factor) noexcept {
    sum_ *= factor;
    compensation_ *= factor;
  }

  [[nodiscard]] double value() const noexcept { return sum_ + compensation_; }

private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// sum_{i=0}^{m} C(m, i) (-1)^i term(i), accumulated with compensation.
/// `reversed` walks i from m down to 0; both orders must agree closely.
template <class Term>
double alternating_binomial_sum(int m, Term&& term, bool reversed = false) {
  CompensatedSum acc;
  double binom = 1.0;  // C(m, i), updated incrementally
  if (!reversed) {
    for (int i = 0; i <= m; ++i) {
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      acc += sign * binom * term(i);
      binom = binom * (m - i) / (i + 1);
    }
  } else {
    for (int i = m; i >= 0; --i) {
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      acc += sign * binom * term(i);
      binom = binom * i / (m - i + 1);
    }
  }
  return acc.value();
}

}  // namespace nomaec
