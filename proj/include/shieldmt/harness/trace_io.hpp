#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "shieldmt/shield/session.hpp"

namespace shieldmt {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
nlohmann::json read_json_file(const std::string& path);

// One JSON object per line. A line is either a flat map of variable values
// ({"x":15,"y":6}) or a shield step record, whose "x" and "y_out" are
// joined. Blank lines are skipped.
std::vector<Valuation> read_valuations_jsonl(const std::string& path);
std::vector<Valuation> parse_valuations_jsonl(const std::string& text);

nlohmann::ordered_json valuation_to_json(const Valuation& v);

// {"step","x","y_design","y_out","overridden","reaction","choice_design","choice_out"}
// plus "boolean_ms"/"theory_ms" when `timing` is set.
nlohmann::ordered_json record_to_json(const StepRecord& r, const BoolSpec& bs, bool timing = false);
std::string records_to_jsonl(const std::vector<StepRecord>& records, const BoolSpec& bs, bool timing = false);

}  // namespace shieldmt
