#include "dhypr/config.hpp"

#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <sstream>

#include "dhypr/errors.hpp"

namespace dhypr {

namespace {

using nlohmann::json;
using Setter = std::function<void(RunConfig&, const json&)>;

template <typename T>
Setter field(T RunConfig::*member) {
  return [member](RunConfig& c, const json& v) { c.*member = v.get<T>(); };
}

template <typename T>
Setter train_field(T TrainConfig::*member) {
  return [member](RunConfig& c, const json& v) { c.train.*member = v.get<T>(); };
}

Setter decoder_field(double DecoderConfig::*member) {
  return [member](RunConfig& c, const json& v) { c.train.decoder.*member = v.get<double>(); };
}

template <typename T>
Setter optional_field(std::optional<T> RunConfig::*member) {
  return [member](RunConfig& c, const json& v) {
    if (v.is_null()) {
      (c.*member).reset();
    } else {
      c.*member = v.get<T>();
    }
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"task", [](RunConfig& c, const json& v) { c.train.task = parse_task(v.get<std::string>()); }},
      {"edges", field(&RunConfig::edges)},
      {"features", optional_field(&RunConfig::features)},
      {"labels", optional_field(&RunConfig::labels)},
      {"out", field(&RunConfig::out)},
      {"stack_cache", optional_field(&RunConfig::stack_cache)},
      {"allow_duplicate_edges", field(&RunConfig::allow_duplicate_edges)},
      {"deterministic", field(&RunConfig::deterministic)},
      {"seed", train_field(&TrainConfig::seed)},
      {"lr", train_field(&TrainConfig::lr)},
      {"weight_decay", train_field(&TrainConfig::weight_decay)},
      {"dropout", train_field(&TrainConfig::dropout)},
      {"epochs_max", train_field(&TrainConfig::epochs_max)},
      {"patience", train_field(&TrainConfig::patience)},
      {"K", train_field(&TrainConfig::K)},
      {"dims", train_field(&TrainConfig::dims)},
      {"negative_ratio", train_field(&TrainConfig::negative_ratio)},
      {"lp_score", [](RunConfig& c, const json& v) { c.train.lp_score = parse_link_score(v.get<std::string>()); }},
      {"r", decoder_field(&DecoderConfig::r)},
      {"t", decoder_field(&DecoderConfig::t)},
      {"lambda", decoder_field(&DecoderConfig::lambda)},
      {"w_g", decoder_field(&DecoderConfig::w_g)},
      {"w_r", decoder_field(&DecoderConfig::w_r)},
      {"labeled_per_class", [](RunConfig& c, const json& v) { c.node_split.labeled_per_class = v.get<std::size_t>(); }},
      {"val_size", [](RunConfig& c, const json& v) { c.node_split.val_size = v.get<std::size_t>(); }},
      {"label_rate",
       [](RunConfig& c, const json& v) {
         if (v.is_null()) {
           c.node_split.label_rate.reset();
         } else {
           c.node_split.label_rate = v.get<double>();
         }
       }},
  };
  return table;
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
    try {
      it->second(cfg, value);
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + key + "' has the wrong type: " + e.what());
    }
  }
  if (cfg.edges.empty()) throw ConfigError("config key 'edges' is required");
  cfg.train.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string to_json(const RunConfig& cfg) {
  const TrainConfig& t = cfg.train;
  json j;
  j["task"] = to_string(t.task);
  j["edges"] = cfg.edges;
  j["features"] = optional_json(cfg.features);
  j["labels"] = optional_json(cfg.labels);
  j["out"] = cfg.out;
  j["stack_cache"] = optional_json(cfg.stack_cache);
  j["allow_duplicate_edges"] = cfg.allow_duplicate_edges;
  j["deterministic"] = cfg.deterministic;
  j["seed"] = t.seed;
  j["lr"] = t.lr;
  j["weight_decay"] = t.weight_decay;
  j["dropout"] = t.dropout;
  j["epochs_max"] = t.epochs_max;
  j["patience"] = t.patience;
  j["K"] = t.K;
  j["dims"] = t.dims;
  j["negative_ratio"] = t.negative_ratio;
  j["lp_score"] = to_string(t.lp_score);
  j["r"] = t.decoder.r;
  j["t"] = t.decoder.t;
  j["lambda"] = t.decoder.lambda;
  j["w_g"] = t.decoder.w_g;
  j["w_r"] = t.decoder.w_r;
  j["labeled_per_class"] = cfg.node_split.labeled_per_class;
  j["val_size"] = cfg.node_split.val_size;
  j["label_rate"] = optional_json(cfg.node_split.label_rate);
  return j.dump(2);
}

}  // namespace dhypr
