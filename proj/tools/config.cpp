#include "config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dynpath::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << "config line " << line << ": " << what;
  throw InvalidArgument(os.str());
}

double parse_double(std::string_view text, std::size_t line) {
  const std::string s(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    fail(line, "expected a number, got '" + s + "'");
  return v;
}

std::uint64_t parse_uint(std::string_view text, std::size_t line) {
  const std::string s(text);
  char* end = nullptr;
  errno = 0;
  if (s.empty() || s.front() == '-') fail(line, "expected a nonnegative integer, got '" + s + "'");
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE)
    fail(line, "expected a nonnegative integer, got '" + s + "'");
  return v;
}

LengthDist parse_length(std::string_view text, std::size_t line) {
  if (text.find(':') == std::string_view::npos)
    return LengthDist::Constant(static_cast<std::int64_t>(parse_uint(text, line)));
  std::vector<LengthAtom> atoms;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) fail(line, "pmf atoms are written value:prob");
    atoms.push_back({static_cast<std::int64_t>(parse_uint(trim(item.substr(0, colon)), line)),
                     parse_double(trim(item.substr(colon + 1)), line)});
  }
  try {
    return LengthDist::Pmf(std::move(atoms));
  } catch (const InvalidArgument& e) {
    fail(line, e.what());
  }
}

EdgeConfig parse_edge(std::string_view value, std::size_t line) {
  const auto space = value.find_first_of(" \t");
  if (space == std::string_view::npos) fail(line, "edge needs '<initial> <length>'");
  const std::string_view state = trim(value.substr(0, space));
  if (state != "0" && state != "1") fail(line, "edge initial state must be 0 or 1");
  return {static_cast<LinkBit>(state == "1"), parse_length(trim(value.substr(space + 1)), line)};
}

std::string format_length(const LengthDist& len) {
  if (len.is_constant() && len.support().front().prob == 1.0)
    return std::to_string(len.support().front().value);
  std::string out;
  for (const auto& a : len.support()) {
    if (!out.empty()) out += ',';
    out += std::to_string(a.value) + ':' + format_exact(a.prob);
  }
  return out;
}

}  // namespace

std::string format_exact(double x) {
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

std::string format_report(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

PathSpec RunConfig::path() const {
  std::vector<LinkBit> initial;
  std::vector<LengthDist> lengths;
  for (const auto& e : edges) {
    initial.push_back(e.initial);
    lengths.push_back(e.length);
  }
  return PathSpec(EdgeDynamics(p, q), model, std::move(initial), std::move(lengths));
}

RunConfig parse_run_config(std::string_view text) {
  RunConfig cfg;
  bool seen_p = false;
  bool seen_q = false;
  bool seen_model = false;
  std::vector<std::string> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (value.empty()) fail(line_no, "missing value for '" + key + "'");

    if (key == "edge") {
      cfg.edges.push_back(parse_edge(value, line_no));
      continue;
    }
    for (const auto& k : seen)
      if (k == key) fail(line_no, "duplicate key '" + key + "'");
    seen.push_back(key);

    if (key == "p") {
      cfg.p = parse_double(value, line_no);
      seen_p = true;
    } else if (key == "q") {
      cfg.q = parse_double(value, line_no);
      seen_q = true;
    } else if (key == "model") {
      try {
        cfg.model = parse_failure_model(value);
      } catch (const InvalidArgument& e) {
        fail(line_no, e.what());
      }
      seen_model = true;
    } else if (key == "k") {
      cfg.k = parse_uint(value, line_no);
    } else if (key == "samples") {
      cfg.samples = parse_uint(value, line_no);
    } else if (key == "seed") {
      cfg.seed = parse_uint(value, line_no);
    } else if (key == "horizon") {
      cfg.horizon = parse_uint(value, line_no);
    } else if (key == "sweep.param") {
      if (value != "p" && value != "q") fail(line_no, "sweep.param must be p or q");
      cfg.sweep.param = std::string(value);
    } else if (key == "sweep.from") {
      cfg.sweep.from = parse_double(value, line_no);
    } else if (key == "sweep.to") {
      cfg.sweep.to = parse_double(value, line_no);
    } else if (key == "sweep.step") {
      cfg.sweep.step = parse_double(value, line_no);
    } else {
      fail(line_no, "unknown key '" + key + "'");
    }
  }
  if (!seen_p || !seen_q || !seen_model) throw InvalidArgument("config must set p, q and model");
  if (cfg.edges.empty()) throw InvalidArgument("config must list at least one edge");
  cfg.path();  // re-validate every invariant up front
  return cfg;
}

RunConfig load_run_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw InvalidArgument("cannot open config file '" + file + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string serialize(const RunConfig& config) {
  std::ostringstream os;
  os << "p = " << format_exact(config.p) << '\n';
  os << "q = " << format_exact(config.q) << '\n';
  os << "model = " << to_string(config.model) << '\n';
  for (const auto& e : config.edges)
    os << "edge = " << static_cast<int>(e.initial) << ' ' << format_length(e.length) << '\n';
  if (config.k) os << "k = " << *config.k << '\n';
  if (config.samples) os << "samples = " << *config.samples << '\n';
  if (config.seed) os << "seed = " << *config.seed << '\n';
  if (config.horizon) os << "horizon = " << *config.horizon << '\n';
  if (config.sweep.param) os << "sweep.param = " << *config.sweep.param << '\n';
  if (config.sweep.from) os << "sweep.from = " << format_exact(*config.sweep.from) << '\n';
  if (config.sweep.to) os << "sweep.to = " << format_exact(*config.sweep.to) << '\n';
  if (config.sweep.step) os << "sweep.step = " << format_exact(*config.sweep.step) << '\n';
  return os.str();
}

}  // namespace dynpath::cli
