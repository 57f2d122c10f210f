#include "dynpath/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dynpath {

namespace {

bool is_probability(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

}  // namespace

EdgeDynamics::EdgeDynamics(double p, double q) : p_(p), q_(q) {
  if (!is_probability(p) || p <= 0.0) {
    std::ostringstream os;
    os << "p must lie in (0, 1], got " << p;
    throw InvalidArgument(os.str());
  }
  if (!is_probability(q)) {
    std::ostringstream os;
    os << "q must lie in [0, 1], got " << q;
    throw InvalidArgument(os.str());
  }
  beta_ = 1.0 - p - q;
  pi0_ = q / (p + q);
  pi1_ = p / (p + q);
}

LengthDist LengthDist::Constant(std::int64_t slots) {
  if (slots < 0) throw InvalidArgument("link length must be nonnegative");
  return LengthDist({{slots, 1.0}}, true);
}

LengthDist LengthDist::Pmf(std::vector<LengthAtom> atoms) {
  if (atoms.empty()) throw InvalidArgument("length pmf has empty support");
  std::sort(atoms.begin(), atoms.end(),
            [](const LengthAtom& a, const LengthAtom& b) { return a.value < b.value; });
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    if (a.value < 0) throw InvalidArgument("length pmf has a negative value");
    if (!(a.prob > 0.0) || !std::isfinite(a.prob) || a.prob > 1.0)
      throw InvalidArgument("length pmf probabilities must lie in (0, 1]");
    if (i > 0 && atoms[i - 1].value == a.value)
      throw InvalidArgument("length pmf has duplicate support values");
    total += a.prob;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "length pmf sums to " << total << ", expected 1";
    throw InvalidArgument(os.str());
  }
  const bool constant = atoms.size() == 1;
  return LengthDist(std::move(atoms), constant);
}

double LengthDist::mean() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += static_cast<double>(a.value) * a.prob;
  return m;
}

double LengthDist::prob(std::int64_t slots) const {
  for (const auto& a : atoms_)
    if (a.value == slots) return a.prob;
  return 0.0;
}

std::string_view to_string(FailureModel model) {
  switch (model) {
    case FailureModel::CantStart: return "cant_start";
    case FailureModel::Resume: return "resume";
    case FailureModel::RetransmitIdentical: return "retransmit_identical";
    case FailureModel::RetransmitResampled: return "retransmit_resampled";
  }
  return "unknown";
}

FailureModel parse_failure_model(std::string_view name) {
  if (name == "cant_start") return FailureModel::CantStart;
  if (name == "resume") return FailureModel::Resume;
  if (name == "retransmit_identical") return FailureModel::RetransmitIdentical;
  if (name == "retransmit_resampled") return FailureModel::RetransmitResampled;
  throw InvalidArgument("unknown failure model '" + std::string(name) + "'");
}

PathSpec::PathSpec(EdgeDynamics dynamics, FailureModel model,
                   std::vector<LinkBit> initial, std::vector<LengthDist> lengths)
    : dynamics_(dynamics),
      model_(model),
      initial_(std::move(initial)),
      lengths_(std::move(lengths)) {
  if (initial_.empty()) throw InvalidArgument("path needs at least one link");
  if (initial_.size() != lengths_.size())
    throw InvalidArgument("initial configuration and lengths differ in size");
  for (LinkBit b : initial_)
    if (b > 1) throw InvalidArgument("initial link state must be 0 or 1");
}

PathSpec PathSpec::with_initial(std::vector<LinkBit> initial) const {
  return PathSpec(dynamics_, model_, std::move(initial), lengths_);
}

double int_power(double base, std::uint64_t exponent) {
  double result = 1.0;
  while (exponent != 0) {
    if (exponent & 1U) result *= base;
    base *= base;
    exponent >>= 1U;
  }
  return result;
}

double transient_prob(const EdgeDynamics& dyn, LinkBit from, LinkBit to,
                      std::uint64_t t) {
  const double bt = int_power(dyn.beta(), t);
  if (from == 1) {
    return to == 1 ? dyn.pi1() + dyn.pi0() * bt : dyn.pi0() * (1.0 - bt);
  }
  return to == 1 ? dyn.pi1() * (1.0 - bt) : dyn.pi0() + dyn.pi1() * bt;
}

StationaryDist stationary(double p, double q) {
  if (!is_probability(p) || !is_probability(q))
    throw InvalidArgument("transition probabilities must lie in [0, 1]");
  if (p == 0.0 && q == 0.0)
    throw NoStationaryDistribution("p = q = 0: every state is absorbing");
  return {q / (p + q), p / (p + q)};
}

StationaryDist stationary(const EdgeDynamics& dyn) { return {dyn.pi0(), dyn.pi1()}; }

}  // namespace dynpath
