#include "dynpath/closed_forms.hpp"

#include <cmath>
#include <cstdlib>

namespace dynpath {

namespace {

void check_p(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in (0, 1]");
}

// Neumaier's variant of Kahan summation.
class CompensatedSum {
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

double mean_total(const std::vector<LengthDist>& lengths) {
  double total = 0.0;
  for (const auto& d : lengths) total += d.mean();
  return total;
}

}  // namespace

double binomial(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double c = 1.0;
  for (std::int64_t j = 1; j <= k; ++j)
    c = c * static_cast<double>(n - k + j) / static_cast<double>(j);
  // Intermediate quotients are integers up to rounding; snap while exact.
  return c < 9.0e15 ? std::round(c) : c;
}

DeterministicPath::DeterministicPath(std::vector<LinkBit> b, std::vector<std::int64_t> d)
    : bits(std::move(b)), lengths(std::move(d)) {
  if (bits.size() != lengths.size())
    throw InvalidArgument("bits and lengths differ in size");
  for (LinkBit x : bits)
    if (x > 1) throw InvalidArgument("link state must be 0 or 1");
  for (auto x : lengths)
    if (x < 0) throw InvalidArgument("link length must be nonnegative");
}

std::int64_t DeterministicPath::transitions() const {
  std::int64_t k = 0;
  LinkBit prev = 1;
  for (LinkBit b : bits) {
    k += (b != prev);
    prev = b;
  }
  return k;
}

std::int64_t DeterministicPath::total_length() const {
  std::int64_t total = 0;
  for (auto d : lengths) total += d;
  return total;
}

std::int64_t det_traversal_time(const DeterministicPath& path) {
  std::int64_t waits = 0;
  LinkBit prev_bit = 1;
  std::int64_t prev_len = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const std::int64_t delta = path.bits[i] != prev_bit ? 1 : 0;
    waits += (prev_len + delta) % 2;
    prev_bit = path.bits[i];
    prev_len = path.lengths[i];
  }
  return path.total_length() + waits;
}

std::int64_t det_model2_time(const DeterministicPath& path) {
  std::vector<LinkBit> bits;
  std::vector<std::int64_t> lengths;
  for (std::size_t i = 0; i < path.size(); ++i) {
    // A zero-length link still has to be on to be crossed, so it stays.
    const std::int64_t copies = path.lengths[i] == 0 ? 1 : path.lengths[i];
    for (std::int64_t c = 0; c < copies; ++c) {
      bits.push_back(path.bits[i]);
      lengths.push_back(path.lengths[i] == 0 ? 0 : 1);
    }
  }
  return det_traversal_time(DeterministicPath(std::move(bits), std::move(lengths)));
}

double bernoulli_ett(double p, const std::vector<LengthDist>& lengths) {
  check_p(p);
  const auto n = static_cast<double>(lengths.size());
  return mean_total(lengths) + n * (1.0 - p) / p;
}

double bernoulli_pmf(double p, std::int64_t n, std::int64_t total_length, std::int64_t t) {
  check_p(p);
  if (n < 1) throw InvalidArgument("n must be positive");
  if (total_length < 0) throw InvalidArgument("total length must be nonnegative");
  if (t < total_length) return 0.0;
  const std::int64_t waits = t - total_length;
  return binomial(waits + n - 1, waits) * int_power(p, static_cast<std::uint64_t>(n)) *
         int_power(1.0 - p, static_cast<std::uint64_t>(waits));
}

double steady_ett(const EdgeDynamics& dyn, const std::vector<LengthDist>& lengths) {
  const auto n = static_cast<double>(lengths.size());
  return mean_total(lengths) + n * (1.0 - dyn.pi1()) / dyn.p();
}

double steady_pmf_as_printed(const EdgeDynamics& dyn, std::int64_t n,
                             std::int64_t total_length, std::int64_t t) {
  if (n < 1) throw InvalidArgument("n must be positive");
  if (t < total_length) return 0.0;
  const double p = dyn.p();
  const double q = dyn.q();
  const std::int64_t slack = t - total_length;
  const double scale = int_power(p, static_cast<std::uint64_t>(n)) /
                       int_power(p + q, static_cast<std::uint64_t>(n));
  double sum = 0.0;
  const std::int64_t upper = std::min(n, t + 1);
  for (std::int64_t m = 1; m <= upper; ++m) {
    const double c = binomial(n - 1, m - 1) * binomial(slack, m);
    if (c == 0.0) continue;  // also guards the negative (1-p) exponent
    sum += c * int_power(q, static_cast<std::uint64_t>(m)) *
           int_power(1.0 - p, static_cast<std::uint64_t>(slack - m));
  }
  return sum * scale;
}

double max_geom_ett(std::int64_t count, double p) {
  check_p(p);
  if (count < 0) throw InvalidArgument("count must be nonnegative");
  if (count > kMaxGeomLimit)
    throw InvalidArgument("alternating series is unreliable beyond 60 terms");
  CompensatedSum sum;
  for (std::int64_t i = 1; i <= count; ++i) {
    const double sign = (i % 2 == 1) ? 1.0 : -1.0;
    const double denom = 1.0 - int_power(1.0 - p, static_cast<std::uint64_t>(i));
    sum.add(sign * binomial(count, i) / denom);
  }
  return sum.value();
}

}  // namespace dynpath
