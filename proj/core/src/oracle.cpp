#include "dynpath/oracle.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace dynpath {

namespace {

constexpr std::size_t kMaxOracleLinks = 24;
constexpr std::int64_t kMaxOracleLength = 1 << 14;

void check_oracle_path(const PathSpec& path) {
  if (path.size() > kMaxOracleLinks)
    throw ConfigurationError("joint-chain oracle supports at most 24 links");
  for (const auto& len : path.lengths())
    if (len.max_value() > kMaxOracleLength)
      throw ConfigurationError("joint-chain oracle length support too large");
}

bool link_on(std::uint32_t config, int link) { return (config >> link) & 1U; }

// ---------------------------------------------------------------------------
// Joint-chain transition structure.

struct Weighted {
  double prob;
  JointState state;
};

class JointChain {
 public:
  explicit JointChain(const PathSpec& path)
      : path_(path), n_(static_cast<int>(path.size())), dyn_(path.dynamics()) {}

  int links() const { return n_; }

  // Resolves everything that happens at the current instant (length draws
  // and zero-length hops). Emits settled states; node == n means absorbed.
  void settle(const JointState& s, double prob, std::vector<Weighted>& out) const {
    if (s.node == n_) {
      out.push_back({prob, s});
      return;
    }
    if (s.progress == 0 && link_on(s.config, s.node)) {
      if (s.length < 0) {
        for (const auto& atom : path_.lengths()[s.node].support()) {
          JointState drawn = s;
          drawn.length = static_cast<int>(atom.value);
          settle_drawn(drawn, prob * atom.prob, out);
        }
      } else {
        settle_drawn(s, prob, out);
      }
      return;
    }
    out.push_back({prob, s});
  }

  // One slot from a settled, non-absorbed state. Emits unsettled states at
  // the next instant.
  void advance(const JointState& s, double prob, std::vector<Weighted>& out) const {
    const bool on = link_on(s.config, s.node);
    JointState next = s;
    bool arrived = false;
    switch (path_.model()) {
      case FailureModel::CantStart:
        if (s.progress > 0 || on) {
          next.progress = s.progress + 1;
          arrived = next.progress == s.length;
        }
        break;
      case FailureModel::Resume:
        if (on) {
          next.progress = s.progress + 1;
          arrived = next.progress == s.length;
        }
        break;
      case FailureModel::RetransmitIdentical:
      case FailureModel::RetransmitResampled:
        if (on) {
          next.progress = s.progress + 1;
          arrived = next.progress == s.length;
        } else {
          next.progress = 0;
          if (path_.model() == FailureModel::RetransmitResampled) next.length = -1;
        }
        break;
    }
    if (arrived) next = hop(next);
    evolve_links(next, next.node, prob, out);
  }

 private:
  JointState hop(const JointState& s) const {
    return {s.node + 1, 0, -1, s.config & ~(1U << s.node)};
  }

  void settle_drawn(const JointState& s, double prob, std::vector<Weighted>& out) const {
    if (s.length == 0)
      settle(hop(s), prob, out);
    else
      out.push_back({prob, s});
  }

  // Every remaining link makes one chain step; zero-probability branches are
  // dropped so that reachability reflects the true support.
  void evolve_links(const JointState& s, int link, double prob,
                    std::vector<Weighted>& out) const {
    if (link >= n_) {
      out.push_back({prob, s});
      return;
    }
    const bool on = link_on(s.config, link);
    const double p_on = on ? 1.0 - dyn_.q() : dyn_.p();
    if (p_on > 0.0) {
      JointState t = s;
      t.config |= 1U << link;
      evolve_links(t, link + 1, prob * p_on, out);
    }
    if (p_on < 1.0) {
      JointState t = s;
      t.config &= ~(1U << link);
      evolve_links(t, link + 1, prob * (1.0 - p_on), out);
    }
  }

  const PathSpec& path_;
  int n_;
  EdgeDynamics dyn_;
};

std::uint64_t pack(const JointState& s) {
  return (static_cast<std::uint64_t>(s.node) << 56) |
         (static_cast<std::uint64_t>(static_cast<std::uint16_t>(s.progress)) << 40) |
         (static_cast<std::uint64_t>(static_cast<std::uint16_t>(s.length + 1)) << 24) |
         static_cast<std::uint64_t>(s.config);
}

std::uint32_t config_mask(const std::vector<LinkBit>& bits) {
  std::uint32_t c = 0;
  for (std::size_t j = 0; j < bits.size(); ++j)
    if (bits[j]) c |= 1U << j;
  return c;
}

// ---------------------------------------------------------------------------
// Expected absorption time.

struct Edge {
  std::size_t to;
  double prob;
};

struct StateGraph {
  std::vector<JointState> states;
  std::vector<std::vector<Edge>> edges;  // transitions among non-absorbed states
  std::vector<double> absorb;            // one-slot absorption probability
  std::vector<Weighted> start;           // settled initial distribution (incl. absorbed)
};

StateGraph build_graph(const JointChain& chain, std::uint32_t initial_config) {
  StateGraph g;
  std::unordered_map<std::uint64_t, std::size_t> index;
  auto intern = [&](const JointState& s) {
    auto [it, fresh] = index.try_emplace(pack(s), g.states.size());
    if (fresh) {
      if (g.states.size() >= kMaxJointStates)
        throw ConfigurationError("joint state space exceeds 2e6 states");
      g.states.push_back(s);
    }
    return it->second;
  };

  chain.settle({0, 0, -1, initial_config}, 1.0, g.start);
  for (const auto& w : g.start)
    if (w.state.node < chain.links()) intern(w.state);

  std::vector<Weighted> stepped;
  std::vector<Weighted> settled;
  for (std::size_t i = 0; i < g.states.size(); ++i) {
    stepped.clear();
    settled.clear();
    const JointState s = g.states[i];
    chain.advance(s, 1.0, stepped);
    for (const auto& w : stepped) chain.settle(w.state, w.prob, settled);

    std::unordered_map<std::size_t, double> merged;
    double absorbed = 0.0;
    for (const auto& w : settled) {
      if (w.state.node == chain.links())
        absorbed += w.prob;
      else
        merged[intern(w.state)] += w.prob;
    }
    std::vector<Edge> out;
    out.reserve(merged.size());
    for (const auto& [to, prob] : merged) out.push_back({to, prob});
    std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
    g.edges.push_back(std::move(out));
    g.absorb.push_back(absorbed);
  }
  return g;
}

void require_absorbing(const StateGraph& g) {
  const std::size_t m = g.states.size();
  std::vector<std::vector<std::size_t>> reverse(m);
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& e : g.edges[i]) reverse[e.to].push_back(i);
  std::vector<char> good(m, 0);
  std::vector<std::size_t> frontier;
  for (std::size_t i = 0; i < m; ++i) {
    if (g.absorb[i] > 0.0) {
      good[i] = 1;
      frontier.push_back(i);
    }
  }
  while (!frontier.empty()) {
    const std::size_t v = frontier.back();
    frontier.pop_back();
    for (std::size_t u : reverse[v]) {
      if (!good[u]) {
        good[u] = 1;
        frontier.push_back(u);
      }
    }
  }
  if (std::find(good.begin(), good.end(), 0) != good.end())
    throw InfiniteExpectation("some reachable joint state never reaches the last node");
}

constexpr std::size_t kDenseBlockLimit = 2048;

// Solves (I - P_bb) x = rhs for one node block.
Eigen::VectorXd solve_block(const StateGraph& g, const std::vector<std::size_t>& block,
                            const std::vector<std::size_t>& local,
                            const Eigen::VectorXd& rhs) {
  const auto m = static_cast<Eigen::Index>(block.size());
  if (block.size() <= kDenseBlockLimit) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m);
    for (Eigen::Index r = 0; r < m; ++r)
      for (const auto& e : g.edges[block[r]])
        if (g.states[e.to].node == g.states[block[r]].node)
          a(r, static_cast<Eigen::Index>(local[e.to])) -= e.prob;
    return a.partialPivLu().solve(rhs);
  }
  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index r = 0; r < m; ++r) {
    triplets.emplace_back(r, r, 1.0);
    for (const auto& e : g.edges[block[r]])
      if (g.states[e.to].node == g.states[block[r]].node)
        triplets.emplace_back(r, static_cast<Eigen::Index>(local[e.to]), -e.prob);
  }
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>> solver;
  solver.setTolerance(1e-14);
  solver.setMaxIterations(100000);
  solver.compute(a);
  Eigen::VectorXd x = solver.solve(rhs);
  const double residual = (a * x - rhs).norm() / std::max(1.0, rhs.norm());
  if (solver.info() != Eigen::Success || residual > 1e-12)
    throw NumericalSingularity("iterative joint-chain solve did not converge");
  return x;
}

}  // namespace

double exact_ett_dp(const PathSpec& path) {
  check_oracle_path(path);
  const JointChain chain(path);
  const StateGraph g = build_graph(chain, config_mask(path.initial()));
  require_absorbing(g);

  // States at node i only lead to node i or beyond: solve blocks backwards.
  const std::size_t m = g.states.size();
  std::vector<std::vector<std::size_t>> blocks(path.size());
  std::vector<std::size_t> local(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto& b = blocks[static_cast<std::size_t>(g.states[i].node)];
    local[i] = b.size();
    b.push_back(i);
  }
  std::vector<double> expected(m, 0.0);
  for (std::size_t node = path.size(); node-- > 0;) {
    const auto& block = blocks[node];
    if (block.empty()) continue;
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(block.size()));
    for (std::size_t r = 0; r < block.size(); ++r) {
      double v = 1.0;
      for (const auto& e : g.edges[block[r]])
        if (static_cast<std::size_t>(g.states[e.to].node) != node) v += e.prob * expected[e.to];
      rhs(static_cast<Eigen::Index>(r)) = v;
    }
    const Eigen::VectorXd x = solve_block(g, block, local, rhs);
    for (std::size_t r = 0; r < block.size(); ++r)
      expected[block[r]] = x(static_cast<Eigen::Index>(r));
  }

  double total = 0.0;
  for (const auto& w : g.start) {
    if (w.state.node == chain.links()) continue;
    // Start states were interned first, in order.
    for (std::size_t i = 0; i < m; ++i) {
      if (g.states[i] == w.state) {
        total += w.prob * expected[i];
        break;
      }
    }
  }
  if (!std::isfinite(total)) throw NumericalSingularity("joint-chain solve produced a non-finite value");
  return total;
}

// ---------------------------------------------------------------------------
// Forward distribution.

std::vector<double> exact_pmf_dp(const PathSpec& path, std::size_t horizon,
                                 const InitialLaw& initial) {
  check_oracle_path(path);
  const JointChain chain(path);
  const std::size_t n = path.size();
  const auto& dyn = path.dynamics();

  std::vector<std::pair<std::uint32_t, double>> starts;
  if (const auto* fixed = std::get_if<FixedInitial>(&initial)) {
    if (fixed->config.size() != n) throw InvalidArgument("initial configuration has wrong size");
    starts.emplace_back(config_mask(fixed->config), 1.0);
  } else {
    double p_on = 0.0;
    if (std::holds_alternative<StationaryInitial>(initial)) {
      p_on = dyn.pi1();
    } else {
      p_on = std::get<BernoulliInitial>(initial).p_on;
      if (!(p_on >= 0.0 && p_on <= 1.0)) throw InvalidArgument("Bernoulli parameter outside [0, 1]");
    }
    for (std::uint32_t c = 0; c < (1U << n); ++c) {
      double w = 1.0;
      for (std::size_t j = 0; j < n; ++j) w *= ((c >> j) & 1U) ? p_on : 1.0 - p_on;
      if (w > 0.0) starts.emplace_back(c, w);
    }
  }

  std::vector<double> out(horizon + 1, 0.0);
  std::unordered_map<std::uint64_t, Weighted> current;
  std::vector<Weighted> buffer;
  auto deposit = [&](std::unordered_map<std::uint64_t, Weighted>& into, std::size_t t) {
    for (const auto& w : buffer) {
      if (w.state.node == chain.links()) {
        out[t] += w.prob;
        continue;
      }
      auto [it, fresh] = into.try_emplace(pack(w.state), Weighted{0.0, w.state});
      it->second.prob += w.prob;
      if (fresh && into.size() > kMaxJointStates)
        throw ConfigurationError("joint state space exceeds 2e6 states");
    }
  };

  buffer.clear();
  for (const auto& [config, w] : starts) chain.settle({0, 0, -1, config}, w, buffer);
  deposit(current, 0);

  std::vector<Weighted> stepped;
  for (std::size_t t = 0; t < horizon; ++t) {
    std::unordered_map<std::uint64_t, Weighted> next;
    for (const auto& [key, w] : current) {
      stepped.clear();
      chain.advance(w.state, w.prob, stepped);
      buffer.clear();
      for (const auto& s : stepped) chain.settle(s.state, s.prob, buffer);
      deposit(next, t + 1);
    }
    current = std::move(next);
  }
  return out;
}

std::vector<double> exact_pmf_dp(const PathSpec& path, std::size_t horizon) {
  return exact_pmf_dp(path, horizon, FixedInitial{path.initial()});
}

// ---------------------------------------------------------------------------
// Monte Carlo.

namespace {

constexpr std::uint64_t kShardSize = 1U << 14;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Portable uniform on [0, 1): std distributions are implementation-defined.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class Simulator {
 public:
  explicit Simulator(const PathSpec& path)
      : path_(path), n_(path.size()), state_(path.size()) {}

  std::int64_t run(std::mt19937_64& rng) {
    std::copy(path_.initial().begin(), path_.initial().end(), state_.begin());
    const FailureModel model = path_.model();
    std::size_t node = 0;
    std::int64_t progress = 0;
    std::int64_t length = -1;
    std::uint64_t t = 0;
    for (;;) {
      // Instantaneous part of time t.
      while (node < n_ && progress == 0 && state_[node]) {
        if (length < 0) length = draw_length(node, rng);
        if (length != 0) break;
        ++node;
        length = -1;
      }
      if (node == n_) return static_cast<std::int64_t>(t);

      const bool on = state_[node] != 0;
      bool done = false;
      if (model == FailureModel::CantStart) {
        if (progress > 0 || on) done = ++progress == length;
      } else if (on) {
        done = ++progress == length;
      } else if (is_retransmit(model)) {
        progress = 0;
        if (model == FailureModel::RetransmitResampled) length = -1;
      }
      if (done) {
        ++node;
        progress = 0;
        length = -1;
      }

      const double p = path_.dynamics().p();
      const double q = path_.dynamics().q();
      for (std::size_t j = node; j < n_; ++j) {
        const double u = uniform01(rng);
        if (state_[j])
          state_[j] = u < q ? 0 : 1;
        else
          state_[j] = u < p ? 1 : 0;
      }
      if (++t > kSimStepCap) {
        std::ostringstream os;
        os << "a sample exceeded " << kSimStepCap << " slots";
        throw SimulationTimeout(os.str());
      }
    }
  }

 private:
  std::int64_t draw_length(std::size_t link, std::mt19937_64& rng) const {
    const auto& support = path_.lengths()[link].support();
    if (support.size() == 1) return support.front().value;
    const double u = uniform01(rng);
    double acc = 0.0;
    for (const auto& a : support) {
      acc += a.prob;
      if (u < acc) return a.value;
    }
    return support.back().value;
  }

  const PathSpec& path_;
  std::size_t n_;
  std::vector<LinkBit> state_;
};

using Histogram = std::map<std::int64_t, std::uint64_t>;

Histogram run_shard(const PathSpec& path, std::uint64_t seed, std::uint64_t shard,
                    std::uint64_t count) {
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(shard)));
  Simulator sim(path);
  Histogram h;
  for (std::uint64_t i = 0; i < count; ++i) ++h[sim.run(rng)];
  return h;
}

}  // namespace

SimResult mc_estimate(const PathSpec& path, std::uint64_t samples, std::uint64_t seed,
                      unsigned threads) {
  if (samples < 1) throw InvalidArgument("need at least one sample");
  const std::uint64_t shards = (samples + kShardSize - 1) / kShardSize;
  std::vector<Histogram> parts(shards);
  auto shard_count = [&](std::uint64_t s) {
    return std::min(kShardSize, samples - s * kShardSize);
  };

  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(std::max(1U, threads), shards));
  if (workers == 1) {
    for (std::uint64_t s = 0; s < shards; ++s) parts[s] = run_shard(path, seed, s, shard_count(s));
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::uint64_t s = next++; s < shards; s = next++)
            parts[s] = run_shard(path, seed, s, shard_count(s));
        } catch (...) {
          errors[w] = std::current_exception();
          next = shards;
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  SimResult result{0.0, 0.0, {}, samples, seed};
  for (const auto& part : parts)
    for (const auto& [t, c] : part) result.histogram[t] += c;

  // Moments straight from the histogram so that mean is its weighted average.
  long double sum = 0.0L;
  for (const auto& [t, c] : result.histogram) sum += static_cast<long double>(t) * c;
  const long double mean = sum / static_cast<long double>(samples);
  result.mean = static_cast<double>(mean);
  if (samples > 1) {
    long double centered = 0.0L;
    for (const auto& [t, c] : result.histogram) {
      const long double dev = static_cast<long double>(t) - mean;
      centered += dev * dev * c;
    }
    const long double var = centered / static_cast<long double>(samples - 1);
    result.std_error = static_cast<double>(std::sqrt(var / samples));
  }
  return result;
}

}  // namespace dynpath
