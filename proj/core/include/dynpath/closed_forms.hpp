#pragma once

#include <cstdint>
#include <vector>

#include "dynpath/model.hpp"

namespace dynpath {

// Binomial coefficient as a double; 0 whenever k < 0, n < 0 or k > n.
double binomial(std::int64_t n, std::int64_t k);

// A path under the deterministic alternating chain (p = q = 1) with constant
// lengths. A virtual link with state 1 and length 0 sits in front of link 1.
struct DeterministicPath {
  std::vector<LinkBit> bits;
  std::vector<std::int64_t> lengths;

  DeterministicPath(std::vector<LinkBit> b, std::vector<std::int64_t> d);

  std::size_t size() const { return bits.size(); }
  // Number of state changes along b0, b1, ..., bn.
  std::int64_t transitions() const;
  std::int64_t total_length() const;
};

// Exact traversal time under cant_start:
//   D_n + sum_{i=0}^{n-1} ((d_i + |b_{i+1} - b_i|) mod 2).
std::int64_t det_traversal_time(const DeterministicPath& path);

// Exact traversal time under resume. Every link of length d >= 1 is replaced
// by d unit links sharing its initial state; the expanded path is then
// timed with det_traversal_time.
std::int64_t det_model2_time(const DeterministicPath& path);

// Memoryless chain (q = 1 - p), cant_start: sum E[d_i] + n (1 - p) / p.
double bernoulli_ett(double p, const std::vector<LengthDist>& lengths);

// Negative-binomial latency pmf of the memoryless chain with constant
// lengths totalling D.
double bernoulli_pmf(double p, std::int64_t n, std::int64_t total_length,
                     std::int64_t t);

// Links drawn from the stationary law, cant_start:
//   sum E[d_i] + n (1 - pi_on) / p.
double steady_ett(const EdgeDynamics& dyn, const std::vector<LengthDist>& lengths);

// Literal evaluation of the closed-form steady-state latency sum
//
//   sum_{m=1}^{min(n, t+1)} C(n-1, m-1) C(t-D, m) p^n q^m (1-p)^{t-D-m} / (p+q)^n
//
// kept verbatim for characterization. It is known not to match the exact
// steady-state law (it puts zero mass on t = D); see exact_pmf_dp.
double steady_pmf_as_printed(const EdgeDynamics& dyn, std::int64_t n,
                             std::int64_t total_length, std::int64_t t);

// Expected maximum of `count` iid geometric(p) variables on {1, 2, ...}:
//   sum_{i=1}^{count} C(count, i) (-1)^{i+1} / (1 - (1-p)^i).
// Alternating series; throws InvalidArgument for count > 60.
double max_geom_ett(std::int64_t count, double p);

inline constexpr std::int64_t kMaxGeomLimit = 60;

}  // namespace dynpath
