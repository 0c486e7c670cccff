#include "readsim/scanpath_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "readsim/errors.hpp"

namespace readsim {

namespace {

using nlohmann::json;

double round_ms(double value) { return std::round(value * 1000.0) / 1000.0; }

double number_field(const json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(line, std::string("missing field '") + key + "'");
  if (!it->is_number()) throw SchemaError(line, std::string("field '") + key + "' must be a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw SchemaError(line, std::string("field '") + key + "' must be finite");
  return v;
}

std::size_t index_field(const json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(line, std::string("missing field '") + key + "'");
  if (!it->is_number_unsigned()) {
    throw SchemaError(line, std::string("field '") + key + "' must be a nonnegative integer");
  }
  return it->get<std::size_t>();
}

Scanpath scanpath_from_json(const json& obj, std::size_t line) {
  if (!obj.is_object()) throw SchemaError(line, "expected a JSON object");
  Scanpath out;
  const auto id = obj.find("trial_id");
  if (id == obj.end() || !id->is_string()) throw SchemaError(line, "field 'trial_id' must be a string");
  out.trial_id = id->get<std::string>();
  out.condition_s = number_field(obj, "condition_s", line);
  if (const auto seed = obj.find("seed"); seed != obj.end() && !seed->is_null()) {
    if (!seed->is_number_unsigned()) throw SchemaError(line, "field 'seed' must be a nonnegative integer");
    out.seed = seed->get<std::uint64_t>();
  }
  if (const auto recall = obj.find("recall"); recall != obj.end() && !recall->is_null()) {
    out.recall = number_field(obj, "recall", line);
  }
  if (const auto text = obj.find("text"); text != obj.end() && !text->is_null()) {
    if (!text->is_string()) throw SchemaError(line, "field 'text' must be a string");
    out.text_id = text->get<std::string>();
  }
  const auto events = obj.find("events");
  if (events == obj.end() || !events->is_array()) throw SchemaError(line, "field 'events' must be an array");
  out.events.reserve(events->size());
  for (const auto& e : *events) {
    if (!e.is_object()) throw SchemaError(line, "each event must be an object");
    FixationEvent event;
    event.t_ms = number_field(e, "t_ms", line);
    event.word = index_field(e, "word", line);
    event.letter = index_field(e, "letter", line);
    const auto action = e.find("action");
    if (action == e.end() || !action->is_string()) throw SchemaError(line, "event field 'action' must be a string");
    event.action = action->get<std::string>();
    event.dur_ms = number_field(e, "dur_ms", line);
    if (event.dur_ms < 0.0) throw SchemaError(line, "event field 'dur_ms' must be >= 0");
    out.events.push_back(std::move(event));
  }
  return out;
}

}  // namespace

std::string scanpath_to_json_line(const Scanpath& scanpath) {
  nlohmann::ordered_json events = nlohmann::ordered_json::array();
  for (const auto& e : scanpath.events) {
    nlohmann::ordered_json event;
    event["t_ms"] = round_ms(e.t_ms);
    event["word"] = e.word;
    event["letter"] = e.letter;
    event["action"] = e.action;
    event["dur_ms"] = round_ms(e.dur_ms);
    events.push_back(std::move(event));
  }
  nlohmann::ordered_json out;
  out["trial_id"] = scanpath.trial_id;
  out["condition_s"] = scanpath.condition_s;
  if (scanpath.seed) out["seed"] = *scanpath.seed;
  if (scanpath.recall) out["recall"] = *scanpath.recall;
  if (scanpath.text_id) out["text"] = *scanpath.text_id;
  out["events"] = std::move(events);
  return out.dump() + "\n";
}

std::vector<Scanpath> parse_scanpaths_jsonl(std::istream& in) {
  std::vector<Scanpath> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json parsed;
    try {
      parsed = json::parse(text);
    } catch (const json::parse_error& e) {
      throw SchemaError(line, std::string("malformed JSON: ") + e.what());
    }
    out.push_back(scanpath_from_json(parsed, line));
  }
  return out;
}

std::vector<Scanpath> load_scanpaths_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open scanpath file " + path.string());
  return parse_scanpaths_jsonl(in);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace readsim
