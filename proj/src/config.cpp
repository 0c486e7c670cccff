#include "readsim/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <string_view>
#include <variant>

#include "readsim/errors.hpp"

namespace readsim {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

using Ref = std::variant<double*, std::size_t*, bool*>;

struct Field {
  std::string_view section;
  std::string_view key;
  Ref (*ref)(RunConfig&);
};

#define READSIM_FIELD(section, key, member) \
  Field { section, key, [](RunConfig& c) -> Ref { return &c.member; } }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      READSIM_FIELD("perception", "sigma", env.perception.sigma),
      READSIM_FIELD("perception", "p_floor", env.perception.p_floor),
      READSIM_FIELD("perception", "span_left", env.perception.span_left),
      READSIM_FIELD("perception", "span_right", env.perception.span_right),
      READSIM_FIELD("belief", "theta_rec", env.belief.theta_rec),
      READSIM_FIELD("belief", "gamma_pred", env.belief.gamma_pred),
      READSIM_FIELD("memory", "stm_capacity", env.memory.stm_capacity),
      READSIM_FIELD("memory", "lambda_stm", env.memory.lambda_stm),
      READSIM_FIELD("memory", "lambda_gist", env.memory.lambda_gist),
      READSIM_FIELD("memory", "theta_forget", env.memory.theta_forget),
      READSIM_FIELD("memory", "theta_int", env.memory.theta_int),
      READSIM_FIELD("memory", "theta_recall", env.memory.theta_recall),
      READSIM_FIELD("memory", "stochastic_recall", env.memory.stochastic_recall),
      READSIM_FIELD("reward", "alpha_word", env.reward.alpha_word),
      READSIM_FIELD("reward", "alpha_sentence", env.reward.alpha_sentence),
      READSIM_FIELD("reward", "alpha_recall", env.reward.alpha_recall),
      READSIM_FIELD("reward", "c_time", env.reward.c_time),
      READSIM_FIELD("reward", "c_sacc_base", env.reward.c_sacc_base),
      READSIM_FIELD("reward", "c_sacc_amp", env.reward.c_sacc_amp),
      READSIM_FIELD("reward", "pay_rerecognition", env.reward.pay_rerecognition),
      READSIM_FIELD("timing", "tau_sample", env.timing.tau_sample),
      READSIM_FIELD("timing", "sacc_base", env.timing.sacc_base),
      READSIM_FIELD("timing", "sacc_per_letter", env.timing.sacc_per_letter),
      READSIM_FIELD("timing", "sentence_switch", env.timing.sentence_switch),
      READSIM_FIELD("timing", "motor_noise_sd_frac", env.timing.motor_noise_sd_frac),
      READSIM_FIELD("agent", "skip_pred_threshold", agent.thresholds.skip_pred_threshold),
      READSIM_FIELD("agent", "revisit_budget", agent.revisit_budget),
      READSIM_FIELD("ppo", "gamma", ppo.gamma),
      READSIM_FIELD("ppo", "gae_lambda", ppo.gae_lambda),
      READSIM_FIELD("ppo", "clip_eps", ppo.clip_eps),
      READSIM_FIELD("ppo", "learning_rate", ppo.learning_rate),
      READSIM_FIELD("ppo", "epochs_per_update", ppo.epochs_per_update),
      READSIM_FIELD("ppo", "minibatch_size", ppo.minibatch_size),
      READSIM_FIELD("ppo", "entropy_coef", ppo.entropy_coef),
      READSIM_FIELD("ppo", "value_coef", ppo.value_coef),
      READSIM_FIELD("ppo", "steps_per_update", ppo.steps_per_update),
      READSIM_FIELD("ppo", "parallel_envs", ppo.parallel_envs),
      READSIM_FIELD("ppo", "total_updates", ppo.total_updates),
      READSIM_FIELD("metrics", "collapse_refixations", collapse_refixations),
  };
  return table;
}

#undef READSIM_FIELD

constexpr std::string_view kHashedSections[] = {"perception", "belief", "memory", "reward", "timing"};
const std::set<std::string> kMetricNames = {"reading_speed_wpm", "skip_p", "regress_p",
                                            "mean_fix_ms",       "coverage", "recall"};

std::string join(std::string_view a, std::string_view b) { return std::string(a) + "." + std::string(b); }

bool is_count(const json& value) {
  return value.is_number_unsigned() || (value.is_number_integer() && value.get<std::int64_t>() >= 0);
}

void read_value(const json& value, Ref ref, const std::string& path) {
  std::visit(
      [&](auto* target) {
        using T = std::remove_pointer_t<decltype(target)>;
        if constexpr (std::is_same_v<T, bool>) {
          if (!value.is_boolean()) throw ConfigError(path, "must be a boolean");
          *target = value.get<bool>();
        } else if constexpr (std::is_same_v<T, std::size_t>) {
          if (!is_count(value)) throw ConfigError(path, "must be a nonnegative integer");
          *target = value.get<std::size_t>();
        } else {
          if (!value.is_number()) throw ConfigError(path, "must be a number");
          *target = value.get<double>();
        }
      },
      ref);
}

void require_object(const json& value, const std::string& path) {
  if (!value.is_object()) throw ConfigError(path, "must be an object");
}

void reject_unknown(const json& object, const std::set<std::string>& known, const std::string& prefix) {
  for (const auto& item : object.items()) {
    if (!known.count(item.key())) {
      throw ConfigError(prefix.empty() ? item.key() : join(prefix, item.key()), "unknown key");
    }
  }
}

std::string string_value(const json& value, const std::string& path) {
  if (!value.is_string()) throw ConfigError(path, "must be a string");
  return value.get<std::string>();
}

std::string resolve(const std::string& path, const std::filesystem::path& base_dir) {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p.lexically_normal().string();
  return (base_dir / p).lexically_normal().string();
}

void read_corpus(const json& value, CorpusConfig& corpus, const std::filesystem::path& base_dir) {
  require_object(value, "corpus");
  reject_unknown(value, {"lexicon", "texts", "texts_dir", "texts_per_passage"}, "corpus");
  if (value.contains("lexicon")) corpus.lexicon = resolve(string_value(value["lexicon"], "corpus.lexicon"), base_dir);
  if (value.contains("texts_dir")) {
    corpus.texts_dir = resolve(string_value(value["texts_dir"], "corpus.texts_dir"), base_dir);
  }
  if (value.contains("texts")) {
    if (!value["texts"].is_array()) throw ConfigError("corpus.texts", "must be an array of paths");
    corpus.texts.clear();
    for (const auto& t : value["texts"]) corpus.texts.push_back(resolve(string_value(t, "corpus.texts"), base_dir));
  }
  if (value.contains("texts_per_passage")) {
    if (!is_count(value["texts_per_passage"])) {
      throw ConfigError("corpus.texts_per_passage", "must be a positive integer");
    }
    corpus.texts_per_passage = value["texts_per_passage"].get<std::size_t>();
  }
}

void read_env(const json& value, RunConfig& config) {
  require_object(value, "env");
  reject_unknown(value, {"time_budget_s"}, "env");
  if (!value.contains("time_budget_s")) return;
  const auto& budget = value["time_budget_s"];
  config.time_budgets.clear();
  if (budget.is_number()) {
    config.time_budgets.push_back(budget.get<double>());
  } else if (budget.is_array() && !budget.empty()) {
    for (const auto& b : budget) {
      if (!b.is_number()) throw ConfigError("env.time_budget_s", "list entries must be numbers");
      config.time_budgets.push_back(b.get<double>());
    }
  } else {
    throw ConfigError("env.time_budget_s", "must be a number or a nonempty list of numbers");
  }
  config.env.time_budget_s = config.time_budgets.front();
}

void read_fit(const json& value, FitConfig& fit) {
  require_object(value, "fit");
  reject_unknown(value, {"episodes", "grid", "target", "weights"}, "fit");
  if (value.contains("episodes")) {
    if (!is_count(value["episodes"])) throw ConfigError("fit.episodes", "must be a positive integer");
    fit.episodes = value["episodes"].get<std::size_t>();
  }
  if (value.contains("grid")) {
    const auto& grid = value["grid"];
    if (!grid.is_array()) throw ConfigError("fit.grid", "must be a list of {\"param\", \"values\"} objects");
    fit.grid.clear();
    for (const auto& axis : grid) {
      require_object(axis, "fit.grid");
      reject_unknown(axis, {"param", "values"}, "fit.grid");
      if (!axis.contains("param") || !axis.contains("values")) {
        throw ConfigError("fit.grid", "each axis needs 'param' and 'values'");
      }
      const auto param = string_value(axis["param"], "fit.grid.param");
      if (!axis["values"].is_array()) throw ConfigError("fit.grid.values", "must be a list of numbers");
      std::vector<double> values;
      for (const auto& v : axis["values"]) {
        if (!v.is_number()) throw ConfigError("fit.grid.values", "must be a list of numbers");
        values.push_back(v.get<double>());
      }
      fit.grid.emplace_back(param, std::move(values));
    }
  }
  for (const char* key : {"target", "weights"}) {
    if (!value.contains(key)) continue;
    const std::string path = std::string("fit.") + key;
    require_object(value[key], path);
    auto& out = std::string_view(key) == "target" ? fit.target : fit.weights;
    out.clear();
    for (const auto& item : value[key].items()) {
      if (!item.value().is_number()) throw ConfigError(join(path, item.key()), "must be a number");
      out[item.key()] = item.value().get<double>();
    }
  }
}

ordered_json section_json(RunConfig& config, std::string_view section) {
  ordered_json out = ordered_json::object();
  for (const auto& f : fields()) {
    if (f.section != section) continue;
    std::visit([&](auto* target) { out[std::string(f.key)] = *target; }, f.ref(config));
  }
  return out;
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace

void RunConfig::validate() const {
  env.validate();
  ppo.validate();
  if (!(agent.thresholds.skip_pred_threshold >= 0.0 && agent.thresholds.skip_pred_threshold <= 1.0)) {
    throw ConfigError("agent.skip_pred_threshold", "must be in [0,1]");
  }
  if (time_budgets.empty()) throw ConfigError("env.time_budget_s", "must list at least one budget");
  for (const double t : time_budgets) {
    if (!(t > 0.0)) throw ConfigError("env.time_budget_s", "must be > 0");
  }
  if (corpus.texts_per_passage == 0) throw ConfigError("corpus.texts_per_passage", "must be >= 1");
  if (fit.episodes == 0) throw ConfigError("fit.episodes", "must be >= 1");
  for (const auto& [param, values] : fit.grid) {
    if (!is_settable_parameter(param)) throw ConfigError("fit.grid.param", "unknown parameter '" + param + "'");
    if (values.empty()) throw ConfigError("fit.grid.values", "axis '" + param + "' has no values");
  }
  for (const auto& [name, v] : fit.target) {
    if (!kMetricNames.count(name)) throw ConfigError("fit.target." + name, "unknown metric");
  }
  for (const auto& [name, w] : fit.weights) {
    if (!kMetricNames.count(name)) throw ConfigError("fit.weights." + name, "unknown metric");
    if (!(w >= 0.0)) throw ConfigError("fit.weights." + name, "must be >= 0");
  }
  if (threads == 0) throw ConfigError("threads", "must be >= 1");
}

RunConfig config_from_json(const json& root, const std::filesystem::path& base_dir) {
  require_object(root, "");
  std::set<std::string> sections;
  for (const auto& f : fields()) sections.insert(std::string(f.section));
  std::set<std::string> known = sections;
  known.insert({"corpus", "env", "fit", "seed", "output_dir", "threads"});
  reject_unknown(root, known, "");

  RunConfig config;
  config.corpus.lexicon = resolve(config.corpus.lexicon, base_dir);
  config.corpus.texts_dir = resolve(config.corpus.texts_dir, base_dir);
  for (const auto& section : sections) {
    if (!root.contains(section)) continue;
    const auto& object = root[section];
    require_object(object, section);
    std::set<std::string> keys;
    for (const auto& f : fields()) {
      if (f.section == section) keys.insert(std::string(f.key));
    }
    if (section == "ppo") keys.insert("hidden_sizes");
    reject_unknown(object, keys, section);
    for (const auto& f : fields()) {
      if (f.section != section || !object.contains(std::string(f.key))) continue;
      read_value(object[std::string(f.key)], f.ref(config), join(section, f.key));
    }
    if (section == "ppo" && object.contains("hidden_sizes")) {
      const auto& hidden = object["hidden_sizes"];
      if (!hidden.is_array()) throw ConfigError("ppo.hidden_sizes", "must be a list of positive integers");
      config.ppo.hidden_sizes.clear();
      for (const auto& h : hidden) {
        if (!is_count(h)) throw ConfigError("ppo.hidden_sizes", "must be a list of positive integers");
        config.ppo.hidden_sizes.push_back(h.get<std::size_t>());
      }
    }
  }
  if (root.contains("corpus")) read_corpus(root["corpus"], config.corpus, base_dir);
  if (root.contains("env")) read_env(root["env"], config);
  if (root.contains("fit")) read_fit(root["fit"], config.fit);
  if (root.contains("seed")) {
    if (!is_count(root["seed"])) throw ConfigError("seed", "must be a nonnegative integer");
    config.seed = root["seed"].get<std::uint64_t>();
  }
  if (root.contains("output_dir")) config.output_dir = resolve(string_value(root["output_dir"], "output_dir"), base_dir);
  if (root.contains("threads")) {
    if (!is_count(root["threads"])) throw ConfigError("threads", "must be a positive integer");
    config.threads = root["threads"].get<std::size_t>();
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "malformed JSON in " + path.string() + ": " + e.what());
  }
  return config_from_json(root, path.parent_path());
}

ordered_json config_to_json(const RunConfig& config) {
  RunConfig c = config;
  ordered_json out;
  out["corpus"] = {{"lexicon", c.corpus.lexicon},
                   {"texts", c.corpus.texts},
                   {"texts_dir", c.corpus.texts_dir},
                   {"texts_per_passage", c.corpus.texts_per_passage}};
  for (const auto section : {"perception", "belief", "memory", "reward", "timing", "agent", "ppo", "metrics"}) {
    out[section] = section_json(c, section);
  }
  out["ppo"]["hidden_sizes"] = c.ppo.hidden_sizes;
  out["env"] = {{"time_budget_s", c.time_budgets.size() == 1 ? ordered_json(c.time_budgets.front())
                                                             : ordered_json(c.time_budgets)}};
  ordered_json grid = ordered_json::array();
  for (const auto& [param, values] : c.fit.grid) grid.push_back({{"param", param}, {"values", values}});
  out["fit"] = {{"episodes", c.fit.episodes},
                {"grid", grid},
                {"target", ordered_json(c.fit.target)},
                {"weights", ordered_json(c.fit.weights)}};
  out["seed"] = c.seed;
  out["output_dir"] = c.output_dir;
  out["threads"] = c.threads;
  return out;
}

std::string default_config_text() { return config_to_json(RunConfig{}).dump(2) + "\n"; }

bool is_settable_parameter(const std::string& path) {
  if (path == "env.time_budget_s") return true;
  RunConfig probe;
  return std::any_of(fields().begin(), fields().end(), [&](const Field& f) {
    return join(f.section, f.key) == path && std::holds_alternative<double*>(f.ref(probe));
  });
}

void set_parameter(RunConfig& config, const std::string& path, double value) {
  if (path == "env.time_budget_s") {
    config.env.time_budget_s = value;
    config.time_budgets = {value};
    return;
  }
  for (const auto& f : fields()) {
    if (join(f.section, f.key) != path) continue;
    const auto ref = f.ref(config);
    if (const auto* p = std::get_if<double*>(&ref)) {
      **p = value;
      return;
    }
    throw ConfigError(path, "is not a real-valued parameter");
  }
  throw ConfigError(path, "unknown parameter");
}

std::uint64_t config_hash(const RunConfig& config) {
  RunConfig c = config;
  std::string payload;
  for (const auto section : kHashedSections) payload += std::string(section) + section_json(c, section).dump() + ";";
  return fnv1a(payload);
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::vector<std::filesystem::path> corpus_text_paths(const CorpusConfig& corpus) {
  std::vector<std::filesystem::path> out;
  if (!corpus.texts.empty()) {
    for (const auto& t : corpus.texts) out.emplace_back(t);
    return out;
  }
  std::error_code ec;
  if (!std::filesystem::is_directory(corpus.texts_dir, ec)) {
    throw ConfigError("corpus.texts_dir", "not a directory: " + corpus.texts_dir);
  }
  for (const auto& entry : std::filesystem::directory_iterator(corpus.texts_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace readsim
