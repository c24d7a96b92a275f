#pragma once

// JSON run configuration of the command-line tool.

#include <filesystem>
#include <optional>
#include <string>

#include "dhypr/split.hpp"
#include "dhypr/train.hpp"

namespace dhypr {

struct RunConfig {
  TrainConfig train;
  std::string edges;
  std::optional<std::string> features;
  std::optional<std::string> labels;
  std::string out = "out";
  // Optional proximity stack cache written by `preprocess`. For LP the stack
  // must come from the training edges, so the cache is used for nc / sp only.
  std::optional<std::string> stack_cache;
  NodeSplitOptions node_split;
  bool allow_duplicate_edges = false;
  bool deterministic = true;
};

// Keys absent from the document keep their defaults; unknown keys and
// ill-typed values raise ConfigError naming the key.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

// Every field, defaults included, as pretty-printed JSON.
std::string to_json(const RunConfig& cfg);

}  // namespace dhypr
