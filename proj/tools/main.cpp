#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace dynpath::cli;

int main(int argc, char** argv) {
  CLI::App app{"Expected traversal times on Markov-modulated on/off paths"};
  app.require_subcommand(1);

  std::string config_file;
  std::optional<std::uint64_t> k;
  std::string format = "csv";
  std::optional<std::uint64_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> histogram;
  std::size_t max_n = 0;
  bool inject_fault = false;
  std::optional<std::string> param;
  std::optional<double> from;
  std::optional<double> to;
  std::optional<double> step;

  auto* ett = app.add_subcommand("ett", "Exact ETT and per-node expected arrival times");
  ett->add_option("--config", config_file, "Run configuration file")->required();

  auto* pmf = app.add_subcommand("pmf", "Latency distribution truncated at K");
  pmf->add_option("--config", config_file, "Run configuration file")->required();
  pmf->add_option("--k", k, "Largest traversal time to report");
  pmf->add_option("--format", format, "csv or kv")->check(CLI::IsMember({"csv", "kv"}));

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo slot simulation");
  simulate->add_option("--config", config_file, "Run configuration file")->required();
  simulate->add_option("--samples", samples, "Number of sample traversals");
  simulate->add_option("--seed", seed, "Generator seed");
  simulate->add_option("--histogram", histogram, "Write the t,count histogram to this CSV file");

  auto* validate = app.add_subcommand("validate", "Cross-check the engine against the oracles");
  validate->add_option("--max-n", max_n, "Largest path length in the grid")->required();
  validate->add_flag("--inject-fault", inject_fault, "Perturb results to self-test the harness");

  auto* sweep = app.add_subcommand("sweep", "ETT over a range of p or q");
  sweep->add_option("--config", config_file, "Run configuration file")->required();
  sweep->add_option("--param", param, "p or q")->check(CLI::IsMember({"p", "q"}));
  sweep->add_option("--from", from, "First value");
  sweep->add_option("--to", to, "Last value (inclusive)");
  sweep->add_option("--step", step, "Increment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  const unsigned threads = threads_from_env();
  return run_guarded(
      [&]() -> int {
        if (validate->parsed()) {
          ValidateOptions options{max_n, threads, inject_fault};
          return cmd_validate(options, std::cout) ? kExitOk : kExitInvalidInput;
        }
        const RunConfig config = load_run_config(config_file);
        if (ett->parsed()) {
          cmd_ett(config, std::cout);
        } else if (pmf->parsed()) {
          cmd_pmf(config, k, parse_pmf_format(format), std::cout);
        } else if (simulate->parsed()) {
          cmd_simulate(config, samples.value_or(config.samples.value_or(kDefaultSamples)),
                       seed.value_or(config.seed.value_or(0)), histogram, threads, std::cout);
        } else if (sweep->parsed()) {
          const auto pick = [](const auto& flag, const auto& file, const char* name) {
            if (flag) return *flag;
            if (file) return *file;
            throw dynpath::InvalidArgument(std::string("sweep needs --") + name);
          };
          cmd_sweep(config, parse_sweep_param(pick(param, config.sweep.param, "param")),
                    pick(from, config.sweep.from, "from"), pick(to, config.sweep.to, "to"),
                    pick(step, config.sweep.step, "step"), threads, std::cout, std::cerr);
        }
        return kExitOk;
      },
      std::cerr);
}
