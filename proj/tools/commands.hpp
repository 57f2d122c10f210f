#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace dynpath::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidInput = 1,
  kExitDivergent = 2,
  kExitNumerical = 3,
  kExitTimeout = 4,
};

// Maps a library exception onto the tool's exit code.
int exit_code_for(const std::exception& e);

// Runs `body`, printing any error to `err` and translating it to an exit code.
int run_guarded(const std::function<int()>& body, std::ostream& err);

// DYNPATH_THREADS, or 1 when unset or unparsable.
unsigned threads_from_env();

enum class PmfFormat { Csv, Kv };
PmfFormat parse_pmf_format(const std::string& name);

void cmd_ett(const RunConfig& config, std::ostream& out);

void cmd_pmf(const RunConfig& config, std::optional<std::uint64_t> k, PmfFormat format,
             std::ostream& out);

inline constexpr std::uint64_t kDefaultSamples = 100000;

void cmd_simulate(const RunConfig& config, std::uint64_t samples, std::uint64_t seed,
                  const std::optional<std::string>& histogram_file, unsigned threads,
                  std::ostream& out);

struct ValidateOptions {
  std::size_t max_n = 0;
  unsigned threads = 1;
  // Perturbs the engine's ETT so the harness must report failure.
  bool inject_fault = false;
};

// Returns true when every asserted check passed.
bool cmd_validate(const ValidateOptions& options, std::ostream& out);

enum class SweepParam { P, Q };
SweepParam parse_sweep_param(const std::string& name);

// Rows of (parameter, ETT). A violated monotonicity expectation (ETT should
// not grow with p) is reported on `warn` only.
void cmd_sweep(const RunConfig& config, SweepParam param, double from, double to,
               double step, unsigned threads, std::ostream& out, std::ostream& warn);

}  // namespace dynpath::cli
