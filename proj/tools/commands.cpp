#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "dynpath/closed_forms.hpp"
#include "dynpath/oracle.hpp"
#include "dynpath/pgf.hpp"

namespace dynpath::cli {

namespace {

// Evaluates fn(0..count-1) on up to `threads` workers; results keep index order.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, unsigned threads, Fn fn) {
  std::vector<T> out(count);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1U, threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<LinkBit> config_bits(std::uint32_t mask, std::size_t n) {
  std::vector<LinkBit> bits(n);
  for (std::size_t j = 0; j < n; ++j) bits[j] = (mask >> j) & 1U;
  return bits;
}

std::string describe(const PathSpec& path) {
  std::ostringstream os;
  os << to_string(path.model()) << " p=" << path.dynamics().p() << " q=" << path.dynamics().q()
     << " x=";
  for (LinkBit b : path.initial()) os << static_cast<int>(b);
  os << " len=";
  const auto& len = path.lengths().front();
  if (len.is_constant())
    os << len.support().front().value;
  else
    os << "pmf";
  return os.str();
}

// Validation grid: the length families, models and (p, q) pairs of the
// oracle-equivalence check.
std::vector<LengthDist> grid_lengths() {
  return {LengthDist::Constant(0), LengthDist::Constant(1), LengthDist::Constant(2),
          LengthDist::Constant(3), LengthDist::Pmf({{0, 0.5}, {2, 0.5}})};
}

constexpr FailureModel kModels[] = {FailureModel::CantStart, FailureModel::Resume,
                                    FailureModel::RetransmitIdentical,
                                    FailureModel::RetransmitResampled};
constexpr double kGridProbs[] = {0.2, 0.5, 0.8};

std::vector<PathSpec> grid_paths(std::size_t min_n, std::size_t max_n) {
  std::vector<PathSpec> paths;
  const auto lengths = grid_lengths();
  for (std::size_t n = min_n; n <= max_n; ++n)
    for (const auto& len : lengths)
      for (FailureModel model : kModels)
        for (double p : kGridProbs)
          for (double q : kGridProbs)
            for (std::uint32_t mask = 0; mask < (1U << n); ++mask)
              paths.emplace_back(EdgeDynamics(p, q), model, config_bits(mask, n),
                                 std::vector<LengthDist>(n, len));
  return paths;
}

struct CheckTally {
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst = 0.0;
  std::vector<std::string> examples;

  void record(double error, double tolerance, const std::string& what) {
    ++cases;
    worst = std::max(worst, error);
    if (!(error <= tolerance)) {
      ++failures;
      if (examples.size() < 5) examples.push_back(what);
    }
  }

  void print(std::ostream& out, const std::string& name, const char* error_label) const {
    out << name << ".cases = " << cases << '\n';
    out << name << ".failures = " << failures << '\n';
    out << name << '.' << error_label << " = " << format_report(worst) << '\n';
    for (std::size_t i = 0; i < examples.size(); ++i)
      out << name << ".failure." << i << " = " << examples[i] << '\n';
  }
};

struct CaseOutcome {
  double error = 0.0;
  std::string what;
};

// Average ETT over independent Bernoulli(p_on) initial link states.
double weighted_ett(const PathSpec& path, double p_on) {
  const std::size_t n = path.size();
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    double w = 1.0;
    for (std::size_t j = 0; j < n; ++j) w *= ((mask >> j) & 1U) ? p_on : 1.0 - p_on;
    if (w == 0.0) continue;
    total += w * ett(path.with_initial(config_bits(mask, n))).total;
  }
  return total;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InfiniteExpectation*>(&e)) return kExitDivergent;
  if (dynamic_cast<const NumericalSingularity*>(&e)) return kExitNumerical;
  if (dynamic_cast<const SimulationTimeout*>(&e)) return kExitTimeout;
  if (dynamic_cast<const NoStationaryDistribution*>(&e)) return kExitNumerical;
  return kExitInvalidInput;
}

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

unsigned threads_from_env() {
  const char* raw = std::getenv("DYNPATH_THREADS");
  if (raw == nullptr) return 1;
  char* end = nullptr;
  const unsigned long v = std::strtoul(raw, &end, 10);
  if (end == raw || *end != '\0' || v == 0) return 1;
  return static_cast<unsigned>(std::min<unsigned long>(v, 1024));
}

PmfFormat parse_pmf_format(const std::string& name) {
  if (name == "csv") return PmfFormat::Csv;
  if (name == "kv") return PmfFormat::Kv;
  throw InvalidArgument("format must be csv or kv");
}

SweepParam parse_sweep_param(const std::string& name) {
  if (name == "p") return SweepParam::P;
  if (name == "q") return SweepParam::Q;
  throw InvalidArgument("sweep parameter must be p or q");
}

void cmd_ett(const RunConfig& config, std::ostream& out) {
  const EttResult r = ett(config.path());
  out << "ett = " << format_report(r.total) << '\n';
  for (std::size_t i = 0; i < r.per_node.size(); ++i)
    out << "node." << i << " = " << format_report(r.per_node[i]) << '\n';
}

void cmd_pmf(const RunConfig& config, std::optional<std::uint64_t> k, PmfFormat format,
             std::ostream& out) {
  const PathSpec path = config.path();
  if (!k) k = config.k;
  const TruncatedPmf dist = k ? pmf(path, static_cast<std::size_t>(*k)) : pmf(path);
  if (format == PmfFormat::Csv) {
    out << "t,probability\n";
    for (std::size_t t = 0; t < dist.coeffs.size(); ++t)
      out << t << ',' << format_report(dist.coeffs[t]) << '\n';
    out << "tail," << format_report(dist.tail_mass) << '\n';
  } else {
    out << "k = " << dist.coeffs.size() - 1 << '\n';
    for (std::size_t t = 0; t < dist.coeffs.size(); ++t)
      out << "pmf." << t << " = " << format_report(dist.coeffs[t]) << '\n';
    out << "tail_mass = " << format_report(dist.tail_mass) << '\n';
  }
}

void cmd_simulate(const RunConfig& config, std::uint64_t samples, std::uint64_t seed,
                  const std::optional<std::string>& histogram_file, unsigned threads,
                  std::ostream& out) {
  const SimResult r = mc_estimate(config.path(), samples, seed, threads);
  out << "samples = " << r.samples << '\n';
  out << "seed = " << r.seed << '\n';
  out << "mean = " << format_report(r.mean) << '\n';
  out << "stderr = " << format_report(r.std_error) << '\n';
  if (histogram_file) {
    std::ofstream h(*histogram_file);
    if (!h) throw InvalidArgument("cannot write histogram file '" + *histogram_file + "'");
    h << "t,count\n";
    for (const auto& [t, c] : r.histogram) h << t << ',' << c << '\n';
    out << "histogram = " << *histogram_file << '\n';
  }
}

bool cmd_validate(const ValidateOptions& options, std::ostream& out) {
  const std::size_t max_n = options.max_n;
  const double fault = options.inject_fault ? 1e-6 : 0.0;
  out << "validate.max_n = " << max_n << '\n';
  bool ok = true;

  // Engine vs joint-chain absorption time.
  {
    const auto paths = grid_paths(1, max_n);
    const auto outcomes = parallel_map<CaseOutcome>(paths.size(), options.threads, [&](std::size_t i) {
      const double engine = ett(paths[i]).total * (1.0 + fault);
      const double oracle = exact_ett_dp(paths[i]);
      return CaseOutcome{std::abs(engine - oracle) / std::max(1.0, std::abs(oracle)),
                         describe(paths[i])};
    });
    CheckTally tally;
    for (const auto& o : outcomes) tally.record(o.error, 1e-9, o.what);
    tally.print(out, "oracle_ett", "max_rel_error");
    ok = ok && tally.failures == 0;
  }

  // Series pmf vs forward propagation, t <= 40.
  {
    const auto paths = grid_paths(1, std::min<std::size_t>(max_n, 4));
    const auto outcomes = parallel_map<CaseOutcome>(paths.size(), options.threads, [&](std::size_t i) {
      const TruncatedPmf engine = pmf(paths[i], 40);
      const auto oracle = exact_pmf_dp(paths[i], 40);
      double worst = std::abs(engine.mass() + engine.tail_mass - 1.0) > 1e-9 ? 1.0 : 0.0;
      for (std::size_t t = 0; t <= 40; ++t)
        worst = std::max(worst, std::abs(engine.coeffs[t] * (1.0 + fault) - oracle[t]));
      return CaseOutcome{worst, describe(paths[i])};
    });
    CheckTally tally;
    for (const auto& o : outcomes) tally.record(o.error, 1e-10, o.what);
    tally.print(out, "oracle_pmf", "max_abs_error");
    ok = ok && tally.failures == 0;
  }

  // Closed-form reductions.
  {
    CheckTally tally;
    for (std::size_t hat = 1; hat <= std::min<std::size_t>(max_n, 10); ++hat) {
      for (double p : kGridProbs) {
        PathSpec path(EdgeDynamics(p, 0.0), FailureModel::CantStart,
                      std::vector<LinkBit>(hat, 0),
                      std::vector<LengthDist>(hat, LengthDist::Constant(0)));
        const double engine = ett(path).total * (1.0 + fault);
        const double closed = max_geom_ett(static_cast<std::int64_t>(hat), p);
        tally.record(std::abs(engine - closed), 1e-9, describe(path));
      }
    }
    tally.print(out, "reduction_max_geom", "max_abs_error");
    ok = ok && tally.failures == 0;
  }
  {
    CheckTally bern;
    CheckTally steady;
    for (std::size_t n = 1; n <= std::min<std::size_t>(max_n, 4); ++n) {
      for (const auto& len : grid_lengths()) {
        const std::vector<LengthDist> lengths(n, len);
        for (double p : kGridProbs) {
          PathSpec memoryless(EdgeDynamics(p, 1.0 - p), FailureModel::CantStart,
                              std::vector<LinkBit>(n, 0), lengths);
          const double avg = weighted_ett(memoryless, p) * (1.0 + fault);
          bern.record(std::abs(avg - bernoulli_ett(p, lengths)), 1e-9, describe(memoryless));
          for (double q : kGridProbs) {
            const EdgeDynamics dyn(p, q);
            PathSpec path(dyn, FailureModel::CantStart, std::vector<LinkBit>(n, 0), lengths);
            const double mix = weighted_ett(path, dyn.pi1()) * (1.0 + fault);
            steady.record(std::abs(mix - steady_ett(dyn, lengths)), 1e-9, describe(path));
          }
        }
      }
    }
    bern.print(out, "reduction_bernoulli", "max_abs_error");
    steady.print(out, "reduction_stationary", "max_abs_error");
    ok = ok && bern.failures == 0 && steady.failures == 0;
  }

  // Closed-form steady-state sum vs exact law. Informational only.
  for (std::int64_t n = 1; n <= std::min<std::int64_t>(static_cast<std::int64_t>(max_n), 3); ++n) {
    for (std::int64_t d : {0, 1}) {
      for (double p : {0.3, 0.6}) {
        for (double q : {0.3, 0.6}) {
          const EdgeDynamics dyn(p, q);
          PathSpec path(dyn, FailureModel::CantStart,
                        std::vector<LinkBit>(static_cast<std::size_t>(n), 1),
                        std::vector<LengthDist>(static_cast<std::size_t>(n), LengthDist::Constant(d)));
          const auto exact = exact_pmf_dp(path, 25, StationaryInitial{});
          double dev = 0.0;
          for (std::int64_t t = 0; t <= 25; ++t)
            dev = std::max(dev, std::abs(steady_pmf_as_printed(dyn, n, d * n, t) -
                                         exact[static_cast<std::size_t>(t)]));
          out << "steady_sum_deviation." << (d == 0 ? "cut" : "soa") << ".n" << n << ".p" << p << ".q"
              << q << " = " << format_report(dev) << '\n';
        }
      }
    }
  }

  out << "status = " << (ok ? "pass" : "fail") << '\n';
  return ok;
}

void cmd_sweep(const RunConfig& config, SweepParam param, double from, double to, double step,
               unsigned threads, std::ostream& out, std::ostream& warn) {
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument("sweep step must be positive");
  if (!std::isfinite(from) || !std::isfinite(to)) throw InvalidArgument("sweep bounds must be finite");
  std::vector<double> values;
  for (std::size_t i = 0;; ++i) {
    const double v = from + static_cast<double>(i) * step;
    if (v > to + 1e-9 * step) break;
    values.push_back(v);
  }

  struct Row {
    double value;
    double ett;
  };
  const auto rows = parallel_map<Row>(values.size(), threads, [&](std::size_t i) {
    RunConfig point = config;
    (param == SweepParam::P ? point.p : point.q) = values[i];
    try {
      return Row{values[i], ett(point.path()).total};
    } catch (const InfiniteExpectation&) {
      return Row{values[i], std::numeric_limits<double>::infinity()};
    }
  });

  out << (param == SweepParam::P ? "p" : "q") << ",ett\n";
  for (const auto& r : rows) out << format_report(r.value) << ',' << format_report(r.ett) << '\n';

  if (param == SweepParam::P) {
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].ett > rows[i - 1].ett * (1.0 + 1e-9) + 1e-12) {
        warn << "warning: ETT increased from " << format_report(rows[i - 1].ett) << " at p="
             << format_report(rows[i - 1].value) << " to " << format_report(rows[i].ett)
             << " at p=" << format_report(rows[i].value) << '\n';
      }
    }
  }
}

}  // namespace dynpath::cli
