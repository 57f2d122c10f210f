#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dynpath {

// Power series truncated after the z^degree term. All operands of a binary
// operation must share the same degree; coefficients up to `degree` are exact
// (no truncation error leaks into kept terms).
class TruncatedSeries {
 public:
  explicit TruncatedSeries(std::size_t degree, double constant = 0.0);
  TruncatedSeries(std::size_t degree, std::span<const double> coeffs);

  // The series z.
  static TruncatedSeries identity(std::size_t degree);

  std::size_t degree() const { return c_.size() - 1; }
  double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }
  const std::vector<double>& coeffs() const { return c_; }

  // Coefficient t multiplied by s^t, i.e. the series of f(s z).
  TruncatedSeries dilated(double s) const;

  TruncatedSeries& operator+=(const TruncatedSeries& o);
  TruncatedSeries& operator-=(const TruncatedSeries& o);
  TruncatedSeries& operator*=(double s);
  TruncatedSeries& operator+=(double s);

  friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
  friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }
  friend TruncatedSeries operator*(TruncatedSeries a, double s) { return a *= s; }
  friend TruncatedSeries operator*(double s, TruncatedSeries a) { return a *= s; }
  friend TruncatedSeries operator+(TruncatedSeries a, double s) { return a += s; }
  friend TruncatedSeries operator+(double s, TruncatedSeries a) { return a += s; }
  friend TruncatedSeries operator-(double s, const TruncatedSeries& a);

  // Naive O(K * nnz) convolution; sparse operands (z, 1 - a z) stay cheap.
  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b);
  // Division by a series with nonzero constant term, by forward recurrence
  // over the divisor's nonzero coefficients. Throws NumericalSingularity when
  // |b[0]| < 1e-300.
  friend TruncatedSeries operator/(const TruncatedSeries& a, const TruncatedSeries& b);

 private:
  std::vector<double> c_;
};

}  // namespace dynpath
