#include "shieldmt/harness/trace_io.hpp"

#include <fstream>
#include <sstream>

namespace shieldmt {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out.flush()) throw IoError("write failed for " + path);
}

json read_json_file(const std::string& path) {
  std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(path + ": invalid JSON: " + e.what());
  }
}

namespace {

Valuation flat_valuation(const json& obj, int lineno) {
  Valuation v;
  for (const auto& [k, val] : obj.items()) {
    if (!val.is_number_integer())
      throw SpecError("trace line " + std::to_string(lineno) + ": value of " + k + " is not an integer");
    v[k] = val.get<Integer>();
  }
  return v;
}

}  // namespace

std::vector<Valuation> parse_valuations_jsonl(const std::string& text) {
  std::vector<Valuation> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SpecError("trace line " + std::to_string(lineno) + ": invalid JSON");
    }
    if (!j.is_object()) throw SpecError("trace line " + std::to_string(lineno) + ": expected an object");
    if (j.contains("y_out") && j.contains("x"))
      out.push_back(join(flat_valuation(j["x"], lineno), flat_valuation(j["y_out"], lineno)));
    else
      out.push_back(flat_valuation(j, lineno));
  }
  return out;
}

std::vector<Valuation> read_valuations_jsonl(const std::string& path) {
  return parse_valuations_jsonl(read_text_file(path));
}

ordered_json valuation_to_json(const Valuation& v) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, x] : v) j[k] = x;
  return j;
}

ordered_json record_to_json(const StepRecord& r, const BoolSpec& bs, bool timing) {
  ordered_json j;
  j["step"] = r.step;
  j["x"] = valuation_to_json(r.x);
  j["y_design"] = valuation_to_json(r.y_design);
  j["y_out"] = valuation_to_json(r.y_out);
  j["overridden"] = r.overridden;
  j["reaction"] = bs.reactions.reactions.at(r.reaction).name;
  j["choice_design"] = choice_props(r.choice_design, bs.prop_count);
  j["choice_out"] = choice_props(r.choice_out, bs.prop_count);
  if (timing) {
    j["boolean_ms"] = r.boolean_ms;
    j["theory_ms"] = r.theory_ms;
  }
  return j;
}

std::string records_to_jsonl(const std::vector<StepRecord>& records, const BoolSpec& bs, bool timing) {
  std::string out;
  for (const auto& r : records) out += record_to_json(r, bs, timing).dump() + "\n";
  return out;
}

}  // namespace shieldmt
