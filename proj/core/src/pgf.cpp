#include "dynpath/pgf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "pgf_forms.hpp"

namespace dynpath {

namespace {

void check_finite_expectation(FailureModel model, const EdgeDynamics& dyn,
                              const LengthDist& length) {
  if (is_retransmit(model) && dyn.q() >= 1.0 && length.max_value() >= 2) {
    std::ostringstream os;
    os << to_string(model) << " with q = 1 never completes a crossing of length "
       << length.max_value();
    throw InfiniteExpectation(os.str());
  }
}

// Derivative data of the retransmission building blocks at z = 1 for one u:
//   fail      = sum_{w<u} q (1-q)^{w-1}       = Pr(W < u)
//   fail_diff = sum_{w<u} w q (1-q)^{w-1}
//   stay      = (1-q)^{u-1}                  = Pr(W >= u)
struct RetryMoments {
  double fail = 0.0;
  double fail_diff = 0.0;
  double stay = 1.0;
};

template <class Fn>
void for_each_length(const LengthDist& len, double q, Fn&& fn) {
  RetryMoments m;
  for (std::int64_t u = 1; u <= len.max_value(); ++u) {
    const double pu = len.prob(u);
    if (pu != 0.0) fn(u, pu, m);
    m.fail += q * m.stay;
    m.fail_diff += static_cast<double>(u) * q * m.stay;
    m.stay *= 1.0 - q;
  }
}

double gamma1(FailureModel model, const EdgeDynamics& dyn, const LengthDist& len) {
  const double p = dyn.p();
  const double q = dyn.q();
  switch (model) {
    case FailureModel::CantStart:
      return len.mean();
    case FailureModel::Resume: {
      double extra = 0.0;
      for (const auto& a : len.support())
        if (a.value > 1) extra += a.prob * static_cast<double>(a.value - 1);
      return len.mean() + q * extra / p;
    }
    case FailureModel::RetransmitIdentical: {
      double g = 0.0;
      for_each_length(len, q, [&](std::int64_t u, double pu, const RetryMoments& m) {
        g += pu * (static_cast<double>(u) + (m.fail / p + m.fail_diff) / m.stay);
      });
      return g;
    }
    case FailureModel::RetransmitResampled: {
      // F1 = A / (1 - G_Y B), with A(1) = a and B(1) = 1 - a.
      double a = len.prob(0);
      double a_diff = 0.0;
      double b = 0.0;
      double b_diff = 0.0;
      for_each_length(len, q, [&](std::int64_t u, double pu, const RetryMoments& m) {
        a += pu * m.stay;
        a_diff += pu * static_cast<double>(u) * m.stay;
        b += pu * m.fail;
        b_diff += pu * m.fail_diff;
      });
      if (a <= 0.0) throw InfiniteExpectation("no retransmission attempt can succeed");
      return (a_diff + b / p + b_diff) / a;
    }
  }
  throw InvalidArgument("unknown failure model");
}

}  // namespace

double gy(const EdgeDynamics& dyn, double z) { return detail::gy_form(dyn, z); }

LinkPgfPair::LinkPgfPair(FailureModel model, const EdgeDynamics& dyn, LengthDist length)
    : model_(model), dyn_(dyn), length_(std::move(length)) {
  check_finite_expectation(model_, dyn_, length_);
}

double LinkPgfPair::eval_f1(double z) const {
  return detail::f1_form(model_, dyn_, length_, z);
}

double LinkPgfPair::eval_f0(double z) const { return eval(z).f0; }

PgfValues LinkPgfPair::eval(double z) const {
  const double f1 = eval_f1(z);
  return {gy(dyn_, z) * f1, f1};
}

GammaPair LinkPgfPair::gamma() const {
  const double g1 = gamma1(model_, dyn_, length_);
  return {g1, g1 + 1.0 / dyn_.p()};
}

TruncatedSeries LinkPgfPair::series_f1(std::size_t degree) const {
  return detail::f1_form(model_, dyn_, length_, TruncatedSeries::identity(degree));
}

TruncatedSeries LinkPgfPair::series_f0(std::size_t degree) const {
  const auto z = TruncatedSeries::identity(degree);
  return detail::gy_form(dyn_, z) * series_f1(degree);
}

PgfValues f_pair(FailureModel model, const EdgeDynamics& dyn, const LengthDist& length,
                 double z) {
  return LinkPgfPair(model, dyn, length).eval(z);
}

GammaPair gamma_pair(FailureModel model, const EdgeDynamics& dyn, const LengthDist& length) {
  return LinkPgfPair(model, dyn, length).gamma();
}

PgfTable::PgfTable(std::size_t links)
    : n_(links), values_((links + 1) * (links + 2) / 2, 0.0) {
  for (std::size_t k = 0; k <= n_; ++k) at(0, k) = 1.0;
}

namespace {

// G_i(z) = phi G(z) + chi psi G(beta z) regrouped by the link's initial state
// into a convex mix plus a difference that vanishes when G(z) = G(beta z):
//   on:  F1 (pi1 a + pi0 b) + pi0 F0 (a - b)
//   off: F0 (pi0 a + pi1 b) + pi1 F1 (a - b)
// with a = G_{i-1}(z), b = G_{i-1}(beta z).
template <class T>
T node_step(const EdgeDynamics& dyn, LinkBit on, const T& f0, const T& f1, const T& a, const T& b) {
  if (on) return f1 * (dyn.pi1() * a + dyn.pi0() * b) + dyn.pi0() * (f0 * (a - b));
  return f0 * (dyn.pi0() * a + dyn.pi1() * b) + dyn.pi1() * (f1 * (a - b));
}

// One LinkPgfPair per distinct length law, in first-seen order.
struct DistinctLinks {
  std::vector<LinkPgfPair> pairs;
  std::vector<std::size_t> index;  // per link
};

DistinctLinks distinct_links(const PathSpec& path) {
  DistinctLinks out;
  const auto& lengths = path.lengths();
  out.index.reserve(lengths.size());
  for (const auto& len : lengths) {
    std::size_t found = out.pairs.size();
    for (std::size_t j = 0; j < out.pairs.size(); ++j) {
      if (out.pairs[j].length() == len) {
        found = j;
        break;
      }
    }
    if (found == out.pairs.size()) out.pairs.emplace_back(path.model(), path.dynamics(), len);
    out.index.push_back(found);
  }
  return out;
}

}  // namespace

PgfTable pgf_table(const PathSpec& path) {
  const std::size_t n = path.size();
  const auto& dyn = path.dynamics();
  const auto links = distinct_links(path);

  std::vector<double> zs(n + 1);
  zs[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) zs[k] = zs[k - 1] * dyn.beta();

  // F0 and F1 of every distinct link at every beta^k.
  std::vector<std::vector<PgfValues>> f(links.pairs.size());
  for (std::size_t j = 0; j < links.pairs.size(); ++j) {
    f[j].reserve(n + 1);
    for (double z : zs) f[j].push_back(links.pairs[j].eval(z));
  }

  PgfTable table(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const auto& fi = f[links.index[i - 1]];
    const LinkBit on = path.initial()[i - 1];
    for (std::size_t k = 0; k <= n - i; ++k)
      table.at(i, k) = node_step(dyn, on, fi[k].f0, fi[k].f1, table.at(i - 1, k), table.at(i - 1, k + 1));
  }
  return table;
}

EttResult ett(const PathSpec& path) {
  const std::size_t n = path.size();
  const auto& dyn = path.dynamics();
  const auto links = distinct_links(path);
  std::vector<GammaPair> gammas;
  gammas.reserve(links.pairs.size());
  for (const auto& pair : links.pairs) gammas.push_back(pair.gamma());

  const PgfTable table = pgf_table(path);
  EttResult out{0.0, std::vector<double>(n + 1, 0.0)};
  for (std::size_t i = 1; i <= n; ++i) {
    const GammaPair& g = gammas[links.index[i - 1]];
    // Pr(link i-1 is off when the packet reaches it), written without cancellation.
    const double g_beta = table.at(i - 1, 1);
    const double off = path.initial()[i - 1] ? dyn.pi0() * (1.0 - g_beta)
                                             : dyn.pi0() + dyn.pi1() * g_beta;
    out.per_node[i] = out.per_node[i - 1] + g.gamma1 + (g.gamma0 - g.gamma1) * std::max(0.0, off);
  }
  out.total = out.per_node[n];
  return out;
}

double TruncatedPmf::mass() const {
  double s = 0.0;
  for (double c : coeffs) s += c;
  return s;
}

double TruncatedPmf::partial_mean() const {
  double s = 0.0;
  for (std::size_t t = 0; t < coeffs.size(); ++t) s += static_cast<double>(t) * coeffs[t];
  return s;
}

std::size_t default_pmf_degree(const PathSpec& path) {
  const double mean = ett(path).total;
  const double k = std::ceil(20.0 * (mean + 1.0));
  if (!(k <= static_cast<double>(kMaxPmfDegree)))
    throw ConfigurationError("default pmf horizon exceeds the series budget");
  return static_cast<std::size_t>(k);
}

TruncatedPmf pmf(const PathSpec& path, std::optional<std::size_t> degree) {
  const std::size_t k = degree ? *degree : default_pmf_degree(path);
  if (k < 1) throw InvalidArgument("pmf horizon K must be at least 1");
  if (k > kMaxPmfDegree) throw ConfigurationError("pmf horizon K exceeds the series budget");

  const auto& dyn = path.dynamics();
  const auto links = distinct_links(path);
  struct LinkSeries {
    TruncatedSeries f0;
    TruncatedSeries f1;
  };
  std::vector<LinkSeries> series;
  series.reserve(links.pairs.size());
  for (const auto& pair : links.pairs) {
    const auto z = TruncatedSeries::identity(k);
    const TruncatedSeries f1 = pair.series_f1(k);
    const TruncatedSeries f0 = detail::gy_form(dyn, z) * f1;
    series.push_back({f0, f1});
  }

  TruncatedSeries g(k, 1.0);
  for (std::size_t i = 0; i < path.size(); ++i) {
    const LinkSeries& s = series[links.index[i]];
    g = node_step(dyn, path.initial()[i], s.f0, s.f1, g, g.dilated(dyn.beta()));
  }

  TruncatedPmf out{g.coeffs(), 0.0};
  // Rounding in the difference term can leave -1e-17 style residue.
  for (double& c : out.coeffs)
    if (c < 0.0 && c > -1e-12) c = 0.0;
  out.tail_mass = 1.0 - out.mass();
  return out;
}

}  // namespace dynpath
