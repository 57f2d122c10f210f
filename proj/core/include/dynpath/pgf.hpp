#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dynpath/model.hpp"
#include "dynpath/series.hpp"

namespace dynpath {

// PGF of the geometric off period Y >= 1: p z / (1 - (1-p) z).
double gy(const EdgeDynamics& dyn, double z);

// Conditional PGFs of one link's delay (wait plus crossing), given the link
// is off (f0) or on (f1) when the packet reaches it. f0 = gy * f1.
struct PgfValues {
  double f0;
  double f1;
};

// Conditional mean delays; gamma0 = gamma1 + 1/p.
struct GammaPair {
  double gamma1;
  double gamma0;
};

// Per-link PGF pair for a failure model. Construction throws
// InfiniteExpectation for retransmit models with q = 1 and a length >= 2
// in the support.
class LinkPgfPair {
 public:
  LinkPgfPair(FailureModel model, const EdgeDynamics& dyn, LengthDist length);

  FailureModel model() const { return model_; }
  const EdgeDynamics& dynamics() const { return dyn_; }
  const LengthDist& length() const { return length_; }

  double eval_f1(double z) const;
  double eval_f0(double z) const;
  PgfValues eval(double z) const;
  // Closed-form derivatives at z = 1.
  GammaPair gamma() const;

  // Coefficients of f1 / f0 up to z^degree.
  TruncatedSeries series_f1(std::size_t degree) const;
  TruncatedSeries series_f0(std::size_t degree) const;

 private:
  FailureModel model_;
  EdgeDynamics dyn_;
  LengthDist length_;
};

PgfValues f_pair(FailureModel model, const EdgeDynamics& dyn, const LengthDist& length,
                 double z);
GammaPair gamma_pair(FailureModel model, const EdgeDynamics& dyn, const LengthDist& length);

// Triangular table of G_i(beta^k), the PGF of the arrival time at node i
// evaluated at powers of beta, for i = 0..n and k = 0..n-i. Row 0 is all ones.
class PgfTable {
 public:
  explicit PgfTable(std::size_t links);

  std::size_t links() const { return n_; }
  double at(std::size_t node, std::size_t k) const { return values_[offset(node) + k]; }
  double& at(std::size_t node, std::size_t k) { return values_[offset(node) + k]; }
  std::span<const double> row(std::size_t node) const {
    return {values_.data() + offset(node), n_ - node + 1};
  }

 private:
  std::size_t offset(std::size_t node) const {
    // sum_{j < node} (n - j + 1)
    return node * (n_ + 1) - node * (node - 1) / 2;
  }

  std::size_t n_;
  std::vector<double> values_;
};

PgfTable pgf_table(const PathSpec& path);

struct EttResult {
  double total;
  // per_node[i] = expected arrival time at node i; per_node[0] = 0.
  std::vector<double> per_node;
};

EttResult ett(const PathSpec& path);

// Latency pmf truncated at K with the missing mass kept explicitly.
struct TruncatedPmf {
  std::vector<double> coeffs;  // Pr(T = t), t = 0..K
  double tail_mass;            // 1 - sum(coeffs)

  double mass() const;
  // sum t Pr(T = t) over the kept coefficients.
  double partial_mean() const;
};

inline constexpr std::size_t kMaxPmfDegree = std::size_t{1} << 22;

// Expands every link PGF to degree K and runs the node recursion in
// truncated-series arithmetic. K defaults to ceil(20 (ett + 1)).
TruncatedPmf pmf(const PathSpec& path, std::optional<std::size_t> degree = std::nullopt);

std::size_t default_pmf_degree(const PathSpec& path);

}  // namespace dynpath
