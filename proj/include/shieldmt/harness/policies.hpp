#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "shieldmt/shield/run.hpp"

namespace shieldmt {

// Where environment inputs or design outputs come from.
//   <path>                 JSONL trace file
//   random:SEED[:LO:HI]    uniform values in [LO, HI] (default [-64, 64])
//   values:V1,V2,...       inline script for a single variable
struct PolicySpec {
  enum class Kind { TraceFile, UniformRandom, Scripted };
  Kind kind = Kind::UniformRandom;
  std::string path;
  std::uint64_t seed = 0;
  Integer lo = -64;
  Integer hi = 64;
  std::vector<Integer> values;

  static PolicySpec parse(const std::string& text);
};

// Deterministic across platforms: mt19937_64 with rejection sampling.
class UniformDraw {
 public:
  explicit UniformDraw(std::uint64_t seed) : rng_(seed) {}
  Integer operator()(Integer lo, Integer hi);

 private:
  std::mt19937_64 rng_;
};

class TraceEnv : public EnvSource {
 public:
  TraceEnv(std::vector<Valuation> trace, std::vector<std::string> vars);
  std::optional<Valuation> next(std::size_t step) override;

 private:
  std::vector<Valuation> trace_;
};

class RandomEnv : public EnvSource {
 public:
  RandomEnv(std::vector<std::string> vars, std::uint64_t seed, Integer lo, Integer hi);
  std::optional<Valuation> next(std::size_t step) override;

 private:
  std::vector<std::string> vars_;
  UniformDraw draw_;
  Integer lo_, hi_;
};

class TraceDesign : public DesignPolicy {
 public:
  TraceDesign(std::vector<Valuation> trace, std::vector<std::string> vars);
  Valuation next(std::size_t step, const Valuation& x) override;

 private:
  std::vector<Valuation> trace_;
};

class RandomDesign : public DesignPolicy {
 public:
  RandomDesign(std::vector<std::string> vars, std::uint64_t seed, Integer lo, Integer hi);
  Valuation next(std::size_t step, const Valuation& x) override;

 private:
  std::vector<std::string> vars_;
  UniformDraw draw_;
  Integer lo_, hi_;
};

// A design that follows a Boolean controller, realized through a private
// controller-based shield fed with a fixed dummy output.
class ControllerDesign : public DesignPolicy {
 public:
  explicit ControllerDesign(std::unique_ptr<ShieldSession> session);
  Valuation next(std::size_t step, const Valuation& x) override;
  void reset() { session_->reset(); }

 private:
  std::unique_ptr<ShieldSession> session_;
  Valuation dummy_;
};

// Keeps only `vars` of each valuation; a missing variable is an error.
std::vector<Valuation> project_trace(const std::vector<Valuation>& trace, const std::vector<std::string>& vars);

std::unique_ptr<EnvSource> make_env(const SpecT& spec, const PolicySpec& p);
std::unique_ptr<DesignPolicy> make_design(const SpecT& spec, const PolicySpec& p);

}  // namespace shieldmt
