#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dynpath/model.hpp"

namespace dynpath::cli {

// Run configuration file. Line-oriented `key = value`; `#` starts a comment.
//
//   p = 0.5                      # off -> on per slot, (0, 1]
//   q = 0.5                      # on -> off per slot, [0, 1]
//   model = cant_start           # cant_start | resume | retransmit_identical
//                                # | retransmit_resampled
//   edge = 1 0                   # initial state, constant length
//   edge = 0 0:0.5,2:0.5         # initial state, length pmf value:prob,...
//
// Optional command defaults (flags on the command line override them):
//
//   k = 40
//   samples = 100000
//   seed = 7
//   horizon = 200
//   sweep.param = p
//   sweep.from = 0.1
//   sweep.to = 0.9
//   sweep.step = 0.1
//
// Every key except `edge` may appear at most once; unknown keys are errors.

struct EdgeConfig {
  LinkBit initial;
  LengthDist length;

  friend bool operator==(const EdgeConfig&, const EdgeConfig&) = default;
};

struct SweepRange {
  std::optional<std::string> param;
  std::optional<double> from;
  std::optional<double> to;
  std::optional<double> step;

  friend bool operator==(const SweepRange&, const SweepRange&) = default;
};

struct RunConfig {
  double p = 0.0;
  double q = 0.0;
  FailureModel model = FailureModel::CantStart;
  std::vector<EdgeConfig> edges;
  std::optional<std::uint64_t> k;
  std::optional<std::uint64_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> horizon;
  SweepRange sweep;

  PathSpec path() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Throws InvalidArgument with a line number on malformed input.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::string& file);
std::string serialize(const RunConfig& config);

// Shortest round-trip decimal form of a double.
std::string format_exact(double x);
// 12 significant digits, used by every report.
std::string format_report(double x);

}  // namespace dynpath::cli
