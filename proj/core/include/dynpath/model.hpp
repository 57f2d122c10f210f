#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynpath/errors.hpp"

namespace dynpath {

// Link state bit. 1 = on (the link may be entered), 0 = off.
using LinkBit = std::uint8_t;

// Parameters of the two-state on/off chain shared by every link.
//
//   off -> on  with probability p per slot
//   on  -> off with probability q per slot
//
// p must be strictly positive: an off link with p = 0 never reappears.
class EdgeDynamics {
 public:
  EdgeDynamics(double p, double q);

  double p() const { return p_; }
  double q() const { return q_; }
  // Second eigenvalue of the transition matrix, 1 - p - q.
  double beta() const { return beta_; }
  double pi0() const { return pi0_; }
  double pi1() const { return pi1_; }

  friend bool operator==(const EdgeDynamics&, const EdgeDynamics&) = default;

 private:
  double p_;
  double q_;
  double beta_;
  double pi0_;
  double pi1_;
};

// One atom of a finite length distribution.
struct LengthAtom {
  std::int64_t value;  // slots
  double prob;

  friend bool operator==(const LengthAtom&, const LengthAtom&) = default;
};

// Crossing length of a link, in slots. Either a constant or a finite pmf.
// Constant(0) is cut-through, Constant(1) store-or-advance.
class LengthDist {
 public:
  static LengthDist Constant(std::int64_t slots);
  // Atoms may be given in any order; they are stored sorted by value.
  static LengthDist Pmf(std::vector<LengthAtom> atoms);

  bool is_constant() const { return constant_; }
  const std::vector<LengthAtom>& support() const { return atoms_; }
  double mean() const;
  std::int64_t max_value() const { return atoms_.back().value; }
  // Probability of exactly `slots`; 0 outside the support.
  double prob(std::int64_t slots) const;

  friend bool operator==(const LengthDist&, const LengthDist&) = default;

 private:
  LengthDist(std::vector<LengthAtom> atoms, bool constant)
      : atoms_(std::move(atoms)), constant_(constant) {}

  std::vector<LengthAtom> atoms_;
  bool constant_;
};

// What happens when a link fails while a crossing is under way.
enum class FailureModel {
  CantStart,            // crossing continues; link only has to be on to begin
  Resume,               // needs d cumulative on-slots
  RetransmitIdentical,  // needs d consecutive on-slots, same d on every retry
  RetransmitResampled,  // needs d consecutive on-slots, d redrawn per retry
};

std::string_view to_string(FailureModel model);
// Accepts cant_start, resume, retransmit_identical, retransmit_resampled.
FailureModel parse_failure_model(std::string_view name);

inline bool is_retransmit(FailureModel m) {
  return m == FailureModel::RetransmitIdentical ||
         m == FailureModel::RetransmitResampled;
}

// A path of n links with known initial configuration.
class PathSpec {
 public:
  PathSpec(EdgeDynamics dynamics, FailureModel model,
           std::vector<LinkBit> initial, std::vector<LengthDist> lengths);

  std::size_t size() const { return initial_.size(); }
  const EdgeDynamics& dynamics() const { return dynamics_; }
  FailureModel model() const { return model_; }
  const std::vector<LinkBit>& initial() const { return initial_; }
  const std::vector<LengthDist>& lengths() const { return lengths_; }

  // Same links and dynamics, different starting configuration.
  PathSpec with_initial(std::vector<LinkBit> initial) const;

 private:
  EdgeDynamics dynamics_;
  FailureModel model_;
  std::vector<LinkBit> initial_;
  std::vector<LengthDist> lengths_;
};

// beta^k by repeated squaring; valid for negative beta.
double int_power(double base, std::uint64_t exponent);

// Pr(X(t) = to | X(0) = from) for one link.
double transient_prob(const EdgeDynamics& dyn, LinkBit from, LinkBit to,
                      std::uint64_t t);

struct StationaryDist {
  double pi_off;
  double pi_on;
};

// Throws NoStationaryDistribution when p = q = 0.
StationaryDist stationary(double p, double q);
StationaryDist stationary(const EdgeDynamics& dyn);

}  // namespace dynpath
