#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <variant>
#include <vector>

#include "dynpath/model.hpp"

namespace dynpath {

// Slot timing shared by both oracles. At integer time t the packet, sitting
// at node i, observes X_i(t):
//   * off: the slot is spent waiting;
//   * on:  a crossing starts (or continues). A zero-length crossing is taken
//          instantly, and the packet immediately observes the next link at t.
// A crossing that finishes during slot t lands at node i+1 at time t+1.
// Every link chain advances exactly once per slot.
//
//   cant_start            in-flight crossings ignore the link state
//   resume                progress pauses while the link is off
//   retransmit_identical  progress resets while off; realized length kept
//   retransmit_resampled  progress resets while off; length redrawn next try

struct SimResult {
  double mean;
  double std_error;
  std::map<std::int64_t, std::uint64_t> histogram;  // traversal time -> count
  std::uint64_t samples;
  std::uint64_t seed;
};

inline constexpr std::uint64_t kSimStepCap = 10'000'000;

// Slot-by-slot Monte Carlo. Samples are split into fixed-size shards with
// per-shard generators derived from `seed`, so the result does not depend on
// `threads`. Throws SimulationTimeout when one sample exceeds kSimStepCap slots.
SimResult mc_estimate(const PathSpec& path, std::uint64_t samples, std::uint64_t seed,
                      unsigned threads = 1);

// State of the joint chain between slots.
struct JointState {
  int node;           // next link to cross, 0-based; n when absorbed
  int progress;       // slots already spent on the current crossing
  int length;         // realized length of the current crossing; -1 if not drawn
  std::uint32_t config;  // bit j = state of link j, for links j >= node only

  friend bool operator==(const JointState&, const JointState&) = default;
};

inline constexpr std::size_t kMaxJointStates = 2'000'000;

// Expected absorption time of the joint chain. Throws InfiniteExpectation when
// some reachable state cannot reach node n, ConfigurationError when the state
// space exceeds kMaxJointStates.
double exact_ett_dp(const PathSpec& path);

struct FixedInitial {
  std::vector<LinkBit> config;
};
struct StationaryInitial {};
struct BernoulliInitial {
  double p_on;
};
using InitialLaw = std::variant<FixedInitial, StationaryInitial, BernoulliInitial>;

// Pr(T = t) for t = 0..horizon by forward propagation of the joint chain,
// averaging over the initial configuration law.
std::vector<double> exact_pmf_dp(const PathSpec& path, std::size_t horizon,
                                 const InitialLaw& initial);
std::vector<double> exact_pmf_dp(const PathSpec& path, std::size_t horizon);

}  // namespace dynpath
