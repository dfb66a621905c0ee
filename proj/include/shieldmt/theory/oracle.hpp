#pragma once

#include <map>
#include <utility>

#include "shieldmt/theory/solver.hpp"

namespace shieldmt {

// Decides formulas by enumerating every variable (free or bound) over a
// finite box, [-bound, bound] unless overridden per variable. Exact only
// when the box is large enough for the formulas at hand; intended as a
// reference implementation and test oracle.
class BoundedOracle : public TheorySolver {
 public:
  explicit BoundedOracle(Integer bound = 64, std::size_t budget = 50'000'000);

  void set_range(const std::string& var, Integer lo, Integer hi);
  std::pair<Integer, Integer> range(const std::string& var) const;

  SolverVerdict check_sat(const Formula& f) override;
  bool check_validity(const Formula& f) override;
  // Exhaustive argmin of (-soft weight, distance, valuation order).
  std::optional<Valuation> find_model(const Formula& f, const std::vector<std::string>& vars,
                                      const ObjectiveSpec& objective) override;
  std::string name() const override { return "oracle"; }

  // Evaluates `f` (quantifiers included) under `v` with bound variables
  // ranging over the box.
  bool holds(const Formula& f, Valuation& v);

 private:
  void tick();
  template <class Visit>
  bool enumerate(const std::vector<std::string>& vars, std::size_t i, Valuation& v, Visit&& visit);

  Integer bound_;
  std::size_t budget_;
  std::size_t spent_ = 0;
  std::map<std::string, std::pair<Integer, Integer>> ranges_;
};

}  // namespace shieldmt
