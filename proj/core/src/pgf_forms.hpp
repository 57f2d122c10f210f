#pragma once

// Failure-model PGF forms written once over a numeric type T, evaluated both
// on doubles (the O(n^2) scalar table) and on truncated power series (the
// latency pmf). Every 1/(1-q) of the textbook forms is cancelled by hand so
// q = 1 never divides by zero.

#include <cmath>
#include <cstdint>

#include "dynpath/errors.hpp"
#include "dynpath/model.hpp"
#include "dynpath/series.hpp"

namespace dynpath::detail {

inline double constant_like(double, double c) { return c; }
inline TruncatedSeries constant_like(const TruncatedSeries& z, double c) {
  return TruncatedSeries(z.degree(), c);
}

inline double quotient(double a, double b) {
  if (std::abs(b) < 1e-300) throw NumericalSingularity("PGF denominator vanished");
  return a / b;
}
inline TruncatedSeries quotient(const TruncatedSeries& a, const TruncatedSeries& b) {
  return a / b;
}

template <class T>
T gy_form(const EdgeDynamics& dyn, const T& z) {
  const double p = dyn.p();
  return quotient(p * z, 1.0 - (1.0 - p) * z);
}

// Pr(S=0) + sum_{u>=1} Pr(S=u) z^u (1 - q + q G_Y(z))^{u-1}
template <class T>
T resume_f1(const EdgeDynamics& dyn, const LengthDist& len, const T& z, const T& g) {
  const double q = dyn.q();
  const T h = (1.0 - q) + q * g;
  T out = constant_like(z, len.prob(0));
  T zpow = z;                       // z^u
  T hpow = constant_like(z, 1.0);   // h^{u-1}
  for (std::int64_t u = 1; u <= len.max_value(); ++u) {
    const double pu = len.prob(u);
    if (pu != 0.0) out += pu * (zpow * hpow);
    if (u < len.max_value()) {
      zpow = zpow * z;
      hpow = hpow * h;
    }
  }
  return out;
}

// Shared building blocks of both retransmission cases, for one length u >= 1:
//   success(u)  = z^u (1-q)^{u-1}                  first u on-slots in a row
//   failure(u)  = sum_{w=1}^{u-1} q (1-q)^{w-1} z^w  on period shorter than u
template <class T>
T retransmit_identical_f1(const EdgeDynamics& dyn, const LengthDist& len, const T& z,
                          const T& g) {
  const double q = dyn.q();
  T out = constant_like(z, len.prob(0));
  T zpow = z;
  double stay = 1.0;  // (1-q)^{u-1}
  T failure = constant_like(z, 0.0);
  for (std::int64_t u = 1; u <= len.max_value(); ++u) {
    const double pu = len.prob(u);
    if (pu != 0.0) out += pu * quotient(stay * zpow, 1.0 - g * failure);
    if (u < len.max_value()) {
      failure += (q * stay) * zpow;
      zpow = zpow * z;
      stay *= 1.0 - q;
    }
  }
  return out;
}

template <class T>
T retransmit_resampled_f1(const EdgeDynamics& dyn, const LengthDist& len, const T& z,
                          const T& g) {
  const double q = dyn.q();
  T success = constant_like(z, len.prob(0));   // A = E[z^S; W >= S]
  T failures = constant_like(z, 0.0);          // B = E[z^W; W < S]
  T zpow = z;
  double stay = 1.0;
  T failure = constant_like(z, 0.0);
  for (std::int64_t u = 1; u <= len.max_value(); ++u) {
    const double pu = len.prob(u);
    if (pu != 0.0) {
      success += (pu * stay) * zpow;
      if (u >= 2) failures += pu * failure;
    }
    if (u < len.max_value()) {
      failure += (q * stay) * zpow;
      zpow = zpow * z;
      stay *= 1.0 - q;
    }
  }
  return quotient(success, 1.0 - g * failures);
}

template <class T>
T f1_form(FailureModel model, const EdgeDynamics& dyn, const LengthDist& len, const T& z) {
  switch (model) {
    case FailureModel::CantStart: {
      T out = constant_like(z, len.prob(0));
      T zpow = z;
      for (std::int64_t u = 1; u <= len.max_value(); ++u) {
        const double pu = len.prob(u);
        if (pu != 0.0) out += pu * zpow;
        if (u < len.max_value()) zpow = zpow * z;
      }
      return out;
    }
    case FailureModel::Resume:
      return resume_f1(dyn, len, z, gy_form(dyn, z));
    case FailureModel::RetransmitIdentical:
      return retransmit_identical_f1(dyn, len, z, gy_form(dyn, z));
    case FailureModel::RetransmitResampled:
      return retransmit_resampled_f1(dyn, len, z, gy_form(dyn, z));
  }
  throw InvalidArgument("unknown failure model");
}

}  // namespace dynpath::detail
