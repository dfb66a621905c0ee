#include "shieldmt/shield/run.hpp"

#include "shieldmt/speccore/monitor.hpp"

namespace shieldmt {

std::vector<StepRecord> combined_run(ShieldSession& session, DesignPolicy& design, EnvSource& env,
                                     std::size_t steps) {
  Monitor monitor(session.spec());
  std::vector<StepRecord> out;
  out.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    auto x = env.next(t);
    if (!x) break;
    Valuation y = design.next(t, *x);
    StepRecord r = session.step(*x, y);
    if (!monitor.push(join(r.x, r.y_out)).ok)
      throw ShieldError(ShieldError::Kind::Violation,
                        "shielded output violates the specification at step " + std::to_string(t));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace shieldmt
