#include "shieldmt/harness/policies.hpp"

#include <limits>

#include "shieldmt/harness/trace_io.hpp"

namespace shieldmt {

namespace {

Integer parse_integer(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  Integer v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw SpecError("bad " + what + " '" + s + "'");
  }
  if (used != s.size()) throw SpecError("bad " + what + " '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

constexpr Integer kRangeLo = -(Integer{1} << 31);
constexpr Integer kRangeHi = (Integer{1} << 31) - 1;

std::vector<Valuation> scripted(const PolicySpec& p, const std::vector<std::string>& vars) {
  if (vars.size() != 1) throw SpecError("values: scripts need exactly one variable");
  std::vector<Valuation> out;
  for (Integer v : p.values) out.push_back({{vars[0], v}});
  return out;
}

}  // namespace

PolicySpec PolicySpec::parse(const std::string& text) {
  PolicySpec p;
  if (text.rfind("random:", 0) == 0) {
    auto parts = split(text.substr(7), ':');
    if (parts.size() != 1 && parts.size() != 3) throw SpecError("expected random:SEED or random:SEED:LO:HI");
    Integer seed = parse_integer(parts[0], "seed");
    if (seed < 0) throw SpecError("seed must be non-negative");
    p.seed = static_cast<std::uint64_t>(seed);
    if (parts.size() == 3) {
      p.lo = parse_integer(parts[1], "lower bound");
      p.hi = parse_integer(parts[2], "upper bound");
    }
    if (p.lo > p.hi || p.lo < kRangeLo || p.hi > kRangeHi)
      throw SpecError("random range must be non-empty and inside [-2^31, 2^31)");
    p.kind = Kind::UniformRandom;
  } else if (text.rfind("values:", 0) == 0) {
    p.kind = Kind::Scripted;
    for (const auto& v : split(text.substr(7), ',')) p.values.push_back(parse_integer(v, "value"));
  } else {
    if (text.empty()) throw SpecError("empty policy");
    p.kind = Kind::TraceFile;
    p.path = text;
  }
  return p;
}

Integer UniformDraw::operator()(Integer lo, Integer hi) {
  std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  if (span == 0) return static_cast<Integer>(rng_());
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t r;
  do r = rng_();
  while (r >= limit);
  return static_cast<Integer>(static_cast<std::uint64_t>(lo) + r % span);
}

std::vector<Valuation> project_trace(const std::vector<Valuation>& trace, const std::vector<std::string>& vars) {
  std::vector<Valuation> out;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    Valuation v;
    for (const auto& name : vars) {
      auto it = trace[i].find(name);
      if (it == trace[i].end()) throw SpecError("trace entry " + std::to_string(i) + " has no value for " + name);
      v[name] = it->second;
    }
    out.push_back(std::move(v));
  }
  return out;
}

TraceEnv::TraceEnv(std::vector<Valuation> trace, std::vector<std::string> vars)
    : trace_(project_trace(trace, vars)) {}

std::optional<Valuation> TraceEnv::next(std::size_t step) {
  if (step >= trace_.size()) return std::nullopt;
  return trace_[step];
}

RandomEnv::RandomEnv(std::vector<std::string> vars, std::uint64_t seed, Integer lo, Integer hi)
    : vars_(std::move(vars)), draw_(seed), lo_(lo), hi_(hi) {}

std::optional<Valuation> RandomEnv::next(std::size_t) {
  Valuation v;
  for (const auto& name : vars_) v[name] = draw_(lo_, hi_);
  return v;
}

TraceDesign::TraceDesign(std::vector<Valuation> trace, std::vector<std::string> vars)
    : trace_(project_trace(trace, vars)) {}

Valuation TraceDesign::next(std::size_t step, const Valuation&) {
  if (step >= trace_.size()) throw SpecError("design trace ended at step " + std::to_string(step));
  return trace_[step];
}

RandomDesign::RandomDesign(std::vector<std::string> vars, std::uint64_t seed, Integer lo, Integer hi)
    : vars_(std::move(vars)), draw_(seed), lo_(lo), hi_(hi) {}

Valuation RandomDesign::next(std::size_t, const Valuation&) {
  Valuation v;
  for (const auto& name : vars_) v[name] = draw_(lo_, hi_);
  return v;
}

ControllerDesign::ControllerDesign(std::unique_ptr<ShieldSession> session) : session_(std::move(session)) {
  if (session_->architecture() != Architecture::ControllerBased)
    throw ShieldError(ShieldError::Kind::Config, "controller design needs a controller-based session");
  for (const auto& v : session_->spec().sys_vars()) dummy_[v] = 0;
}

Valuation ControllerDesign::next(std::size_t, const Valuation& x) { return session_->step(x, dummy_).y_out; }

std::unique_ptr<EnvSource> make_env(const SpecT& spec, const PolicySpec& p) {
  auto vars = spec.env_vars();
  switch (p.kind) {
    case PolicySpec::Kind::TraceFile: return std::make_unique<TraceEnv>(read_valuations_jsonl(p.path), vars);
    case PolicySpec::Kind::Scripted: return std::make_unique<TraceEnv>(scripted(p, vars), vars);
    case PolicySpec::Kind::UniformRandom: return std::make_unique<RandomEnv>(vars, p.seed, p.lo, p.hi);
  }
  return nullptr;
}

std::unique_ptr<DesignPolicy> make_design(const SpecT& spec, const PolicySpec& p) {
  auto vars = spec.sys_vars();
  switch (p.kind) {
    case PolicySpec::Kind::TraceFile: return std::make_unique<TraceDesign>(read_valuations_jsonl(p.path), vars);
    case PolicySpec::Kind::Scripted: return std::make_unique<TraceDesign>(scripted(p, vars), vars);
    case PolicySpec::Kind::UniformRandom: return std::make_unique<RandomDesign>(vars, p.seed, p.lo, p.hi);
  }
  return nullptr;
}

}  // namespace shieldmt
