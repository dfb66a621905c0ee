#include "shieldmt/speccore/monitor.hpp"

namespace shieldmt {

std::string MonitorVerdict::to_string() const {
  return ok ? "OK" : "ViolatedAt(" + std::to_string(step) + ")";
}

Monitor::Monitor(const SpecT& spec) : spec_(&spec) {
  for (const auto& g : spec.guarantees) clause_has_next_.push_back(g.body.has_next());
}

MonitorVerdict Monitor::push(const Valuation& joint) {
  check_domain(*spec_, joint, std::nullopt);
  return push_bits(literal_bits(*spec_, joint));
}

MonitorVerdict Monitor::push_bits(std::uint32_t bits) {
  std::size_t t = steps_++;
  if (verdict_.ok) {
    const auto& gs = spec_->guarantees;
    for (std::size_t i = 0; i < gs.size() && verdict_.ok; ++i) {
      if (clause_has_next_[i]) {
        if (previous_ && !gs[i].body.evaluate_bits(*previous_, bits)) verdict_ = MonitorVerdict::ViolatedAt(t);
      } else if (!gs[i].body.evaluate_bits(bits, 0)) {
        verdict_ = MonitorVerdict::ViolatedAt(t);
      }
    }
  }
  previous_ = bits;
  return verdict_;
}

MonitorVerdict monitor_prefix(const SpecT& spec, const std::vector<Valuation>& prefix) {
  Monitor m(spec);
  for (const auto& v : prefix) {
    if (!m.push(v).ok) break;
  }
  return m.verdict();
}

}  // namespace shieldmt
