#include "readsim/checkpoint.hpp"

#include <sstream>

#include <json.hpp>

#include "readsim/config.hpp"
#include "readsim/errors.hpp"
#include "readsim/metrics.hpp"
#include "readsim/scanpath_io.hpp"

namespace readsim {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json network_json(const Mlp& net) {
  return ordered_json{{"layers", net.layer_sizes()}, {"params", net.parameters()}};
}

Mlp network_from_json(const json& obj, const char* name) {
  if (!obj.is_object() || !obj.contains("layers") || !obj.contains("params")) {
    throw DataError(std::string("checkpoint network '") + name + "' is malformed");
  }
  Mlp net(obj["layers"].get<std::vector<std::size_t>>());
  const auto params = obj["params"].get<std::vector<double>>();
  if (params.size() != net.parameter_count()) {
    throw DataError(std::string("checkpoint network '") + name + "' has " + std::to_string(params.size()) +
                    " parameters, expected " + std::to_string(net.parameter_count()));
  }
  net.parameters() = params;
  return net;
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& c) {
  ordered_json out;
  out["format"] = "readsim-checkpoint";
  out["version"] = kCheckpointVersion;
  out["config_hash"] = hash_hex(c.config_hash);
  out["seed"] = c.seed;
  out["updates"] = c.updates;
  out["time_budget_s"] = c.time_budget_s;
  out["policy"] = network_json(c.params.policy);
  out["value"] = network_json(c.params.value);
  return out.dump() + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
  try {
    if (root.value("format", "") != "readsim-checkpoint") throw DataError("not a checkpoint file");
    if (root.value("version", 0) != kCheckpointVersion) {
      throw DataError("unsupported checkpoint version " + std::to_string(root.value("version", 0)));
    }
    Checkpoint c;
    c.config_hash = std::stoull(root.at("config_hash").get<std::string>(), nullptr, 16);
    c.seed = root.at("seed").get<std::uint64_t>();
    c.updates = root.at("updates").get<std::size_t>();
    c.time_budget_s = root.at("time_budget_s").get<double>();
    c.params.policy = network_from_json(root.at("policy"), "policy");
    c.params.value = network_from_json(root.at("value"), "value");
    if (c.params.policy.input_size() != kNumFeatures || c.params.policy.output_size() != kNumActions ||
        c.params.value.input_size() != kNumFeatures || c.params.value.output_size() != 1) {
      throw DataError("checkpoint networks have the wrong input or output size");
    }
    if (!c.params.all_finite()) throw DataError("checkpoint contains non-finite weights");
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  write_text_file(path, checkpoint_to_json(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return checkpoint_from_json(read_text_file(path)); }

std::string curve_csv(std::span<const CurvePoint> curve) {
  std::ostringstream out;
  out << "update,mean_return,clip_fraction,approx_kl,entropy\n";
  for (const auto& p : curve) {
    out << p.update << ',' << format_number(p.mean_return) << ',' << format_number(p.clip_fraction) << ','
        << format_number(p.approx_kl) << ',' << format_number(p.entropy) << '\n';
  }
  return out.str();
}

}  // namespace readsim
