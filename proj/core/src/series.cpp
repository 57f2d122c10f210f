#include "dynpath/series.hpp"

#include <cmath>

#include "dynpath/errors.hpp"

namespace dynpath {

namespace {

void require_same_degree(const TruncatedSeries& a, const TruncatedSeries& b) {
  if (a.degree() != b.degree())
    throw InvalidArgument("series operands have different truncation degrees");
}

struct Term {
  std::size_t index;
  double value;
};

std::vector<Term> nonzeros(const TruncatedSeries& s) {
  std::vector<Term> out;
  for (std::size_t i = 0; i <= s.degree(); ++i)
    if (s[i] != 0.0) out.push_back({i, s[i]});
  return out;
}

}  // namespace

TruncatedSeries::TruncatedSeries(std::size_t degree, double constant) : c_(degree + 1, 0.0) {
  c_[0] = constant;
}

TruncatedSeries::TruncatedSeries(std::size_t degree, std::span<const double> coeffs)
    : c_(degree + 1, 0.0) {
  for (std::size_t i = 0; i < coeffs.size() && i <= degree; ++i) c_[i] = coeffs[i];
}

TruncatedSeries TruncatedSeries::identity(std::size_t degree) {
  TruncatedSeries z(degree);
  if (degree >= 1) z.c_[1] = 1.0;
  return z;
}

TruncatedSeries TruncatedSeries::dilated(double s) const {
  TruncatedSeries out(*this);
  double scale = 1.0;
  for (double& c : out.c_) {
    c *= scale;
    scale *= s;
  }
  return out;
}

TruncatedSeries& TruncatedSeries::operator+=(const TruncatedSeries& o) {
  require_same_degree(*this, o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

TruncatedSeries& TruncatedSeries::operator-=(const TruncatedSeries& o) {
  require_same_degree(*this, o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

TruncatedSeries& TruncatedSeries::operator*=(double s) {
  for (double& c : c_) c *= s;
  return *this;
}

TruncatedSeries& TruncatedSeries::operator+=(double s) {
  c_[0] += s;
  return *this;
}

TruncatedSeries operator-(double s, const TruncatedSeries& a) {
  TruncatedSeries out = a * -1.0;
  out += s;
  return out;
}

TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
  require_same_degree(a, b);
  const std::size_t k = a.degree();
  const auto na = nonzeros(a);
  const auto nb = nonzeros(b);
  const auto& sparse = na.size() <= nb.size() ? na : nb;
  const TruncatedSeries& dense = na.size() <= nb.size() ? b : a;
  TruncatedSeries out(k);
  for (const Term& t : sparse) {
    for (std::size_t j = 0; j + t.index <= k; ++j) out[t.index + j] += t.value * dense[j];
  }
  return out;
}

TruncatedSeries operator/(const TruncatedSeries& a, const TruncatedSeries& b) {
  require_same_degree(a, b);
  if (std::abs(b[0]) < 1e-300)
    throw NumericalSingularity("series divisor has vanishing constant term");
  const std::size_t k = a.degree();
  std::vector<Term> tail;
  for (const Term& t : nonzeros(b))
    if (t.index > 0) tail.push_back(t);
  TruncatedSeries out(k);
  const double inv = 1.0 / b[0];
  for (std::size_t i = 0; i <= k; ++i) {
    double acc = a[i];
    for (const Term& t : tail) {
      if (t.index > i) break;
      acc -= t.value * out[i - t.index];
    }
    out[i] = acc * inv;
  }
  return out;
}

}  // namespace dynpath
