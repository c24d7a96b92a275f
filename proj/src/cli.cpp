#include "dhypr/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "dhypr/config.hpp"
#include "dhypr/digraph.hpp"
#include "dhypr/errors.hpp"
#include "dhypr/kernels.hpp"
#include "dhypr/pca.hpp"
#include "dhypr/proximity.hpp"
#include "dhypr/serialize.hpp"
#include "dhypr/split.hpp"
#include "dhypr/train.hpp"

namespace dhypr {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Shortest round-trip text, independent of the C and C++ locales.
std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("failed writing " + path.string());
}

void stamp_output_dir(const fs::path& dir, const RunConfig& cfg) {
  fs::create_directories(dir);
  write_text(dir / "config.json", to_json(cfg) + "\n");
  write_text(dir / "seed", std::to_string(cfg.train.seed) + "\n");
  write_text(dir / "FORMAT_VERSION", std::to_string(kOutputFormatVersion) + "\n");
}

void write_node_map(const fs::path& path, const Digraph& g) {
  std::string text;
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    text += std::to_string(i) + '\t' + std::to_string(g.original_ids[i]) + '\n';
  }
  write_text(path, text);
}

// Relative paths in a config file are taken relative to the file itself.
std::string resolve(const std::string& p, const fs::path& base) {
  const fs::path path(p);
  return path.is_absolute() ? p : fs::absolute(base / path).lexically_normal().string();
}

void resolve_paths(RunConfig& cfg, const fs::path& base) {
  cfg.edges = resolve(cfg.edges, base);
  if (cfg.features) cfg.features = resolve(*cfg.features, base);
  if (cfg.labels) cfg.labels = resolve(*cfg.labels, base);
  if (cfg.stack_cache) cfg.stack_cache = resolve(*cfg.stack_cache, base);
  cfg.out = resolve(cfg.out, base);
}

Digraph load_graph(const RunConfig& cfg) {
  std::optional<fs::path> features, labels;
  if (cfg.features) features = *cfg.features;
  if (cfg.labels) labels = *cfg.labels;
  return load_digraph(cfg.edges, features, labels, LoadOptions{cfg.allow_duplicate_edges});
}

void apply_thread_env() {
  if (const char* v = std::getenv("DHYPR_THREADS")) {
    int threads = 0;
    const std::string s(v);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), threads);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || threads < 1) {
      throw ConfigError("DHYPR_THREADS must be a positive integer, got '" + s + "'");
    }
    kernels::set_thread_limit(threads);
  }
}

// Stack the model was (or will be) trained on.
ProximityStack training_stack(const Digraph& g, const RunConfig& cfg, const LinkSplit* split) {
  if (split) return build_stack(training_graph(g, *split), cfg.train.K);
  if (cfg.stack_cache) {
    ProximityStack stack = load_stack(*cfg.stack_cache);
    if (stack.num_nodes() != g.num_nodes() || stack.K() != cfg.train.K) {
      throw ContractViolation("stack cache " + *cfg.stack_cache + " does not match the graph or K");
    }
    return stack;
  }
  return build_stack(g, cfg.train.K);
}

// ---- preprocess ----

struct PreprocessArgs {
  std::string edges;
  int K = 2;
  std::string out;
  bool allow_duplicates = false;
};

int cmd_preprocess(const PreprocessArgs& a, std::ostream& out) {
  if (a.K < 1) throw ConfigError("K must be at least 1");
  const Digraph g = load_digraph(a.edges, std::nullopt, std::nullopt, LoadOptions{a.allow_duplicates});
  const fs::path dir(a.out);
  fs::create_directories(dir);
  const ProximityStack stack = build_stack(g, a.K);
  save_stack(stack, dir / "stack.bin");
  write_node_map(dir / "node_map.tsv", g);
  write_text(dir / "FORMAT_VERSION", std::to_string(kOutputFormatVersion) + "\n");

  std::vector<std::size_t> in_deg(g.num_nodes()), out_deg(g.num_nodes());
  for (const auto& e : g.edges()) {
    ++out_deg[e.src];
    ++in_deg[e.dst];
  }
  json stats;
  stats["nodes"] = g.num_nodes();
  stats["edges"] = g.num_edges();
  stats["reciprocity"] = g.reciprocity();
  stats["avg_degree"] = g.num_nodes() ? static_cast<double>(g.num_edges()) / static_cast<double>(g.num_nodes()) : 0.0;
  stats["max_out_degree"] = out_deg.empty() ? 0 : *std::max_element(out_deg.begin(), out_deg.end());
  stats["max_in_degree"] = in_deg.empty() ? 0 : *std::max_element(in_deg.begin(), in_deg.end());
  stats["K"] = a.K;
  json nnz = json::object();
  for (const auto nk : kNeighborhoods) {
    for (int k = 1; k <= a.K; ++k) {
      nnz[std::string(to_string(nk)) + "_" + std::to_string(k)] = stack.matrix(nk, k).nnz();
    }
  }
  stats["proximity_nnz"] = nnz;
  write_text(dir / "stats.json", stats.dump(2) + "\n");
  out << stats.dump() << "\n";
  return kExitOk;
}

// ---- train ----

struct TrainArgs {
  std::string config;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  bool deterministic = true;
  bool verbose = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig cfg = load_run_config(a.config);
  resolve_paths(cfg, fs::path(a.config).parent_path());
  if (a.seed) cfg.train.seed = *a.seed;
  if (a.out_dir) cfg.out = *a.out_dir;
  cfg.deterministic = a.deterministic;
  cfg.out = fs::absolute(cfg.out).lexically_normal().string();

  const Digraph g = load_graph(cfg);
  const fs::path dir(cfg.out);
  stamp_output_dir(dir, cfg);
  write_node_map(dir / "node_map.tsv", g);

  EpochCallback progress;
  if (a.verbose) {
    progress = [&err](const EpochRecord& r) {
      err << "epoch " << r.epoch << " loss " << format_double(r.loss) << " val " << format_double(r.val_metric)
          << "\n";
    };
  }

  TrainResult result;
  const std::uint64_t seed = cfg.train.seed;
  switch (cfg.train.task) {
    case Task::lp: {
      const LinkSplit split = split_link_prediction(g, seed);
      result = train(g, training_stack(g, cfg, &split), split, cfg.train, progress);
      break;
    }
    case Task::nc: {
      const NodeSplit split = split_node_classification(g, cfg.node_split, seed);
      result = train(g, training_stack(g, cfg, nullptr), split, cfg.train, progress);
      break;
    }
    case Task::sp: {
      const SignSplit split = split_sign_prediction(g, seed);
      result = train(g, training_stack(g, cfg, nullptr), split, cfg.train, progress);
      break;
    }
  }

  save_checkpoint({result.params, to_json(cfg)}, dir / "checkpoint.bin");
  write_text(dir / "report.json", report_to_json(result.report) + "\n");

  std::string line = "task=" + to_string(cfg.train.task) + " best_epoch=" + std::to_string(result.report.best_epoch);
  for (const auto& [name, value] : result.report.metrics) line += " " + name + "=" + format_double(value);
  out << line << "\n";
  return kExitOk;
}

// ---- export ----

struct ExportArgs {
  std::string checkpoint;
  std::string out;
  std::optional<std::string> edges;
  std::optional<std::string> features;
  std::optional<std::string> labels;
};

int cmd_export(const ExportArgs& a, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  RunConfig cfg = parse_run_config(ckpt.config_echo);
  if (a.edges) cfg.edges = fs::absolute(*a.edges).string();
  if (a.features) cfg.features = fs::absolute(*a.features).string();
  if (a.labels) cfg.labels = fs::absolute(*a.labels).string();
  cfg.out = fs::absolute(a.out).lexically_normal().string();

  const Digraph g = load_graph(cfg);
  const ModelConfig& mc = ckpt.params.config;
  if (g.features.cols() != mc.input_dim) {
    throw ContractViolation("checkpoint expects " + std::to_string(mc.input_dim) + " input features, graph has " +
                            std::to_string(g.features.cols()));
  }
  if (mc.K != cfg.train.K) throw ContractViolation("checkpoint K does not match its config echo");

  std::optional<LinkSplit> split;
  if (cfg.train.task == Task::lp) split = split_link_prediction(g, cfg.train.seed);
  const ProximityStack stack = training_stack(g, cfg, split ? &*split : nullptr);
  const Embeddings emb = embed(g, stack, ckpt.params);
  const ad::Matrix proj = pca_project(emb.z_tangent, 2);

  const fs::path dir(cfg.out);
  stamp_output_dir(dir, cfg);
  std::string embeddings, mass, projection;
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    const std::string id = std::to_string(g.original_ids[i]);
    embeddings += id;
    for (double v : emb.z_tangent.row(i)) embeddings += '\t' + format_double(v);
    embeddings += '\n';
    mass += id + '\t' + format_double(emb.mass[i]) + '\n';
    projection += id + '\t' + format_double(proj.row(i)[0]) + '\t' + format_double(proj.row(i)[1]);
    if (g.labels) projection += '\t' + std::to_string((*g.labels)[i]);
    projection += '\n';
  }
  write_text(dir / "embeddings.tsv", embeddings);
  write_text(dir / "mass.tsv", mass);
  write_text(dir / "projection.tsv", projection);
  out << "exported " << g.num_nodes() << " nodes to " << dir.string() << "\n";
  return kExitOk;
}

int report_error(std::ostream& err, const std::string& kind, const std::string& message, json extra = json::object()) {
  extra["error"] = kind;
  extra["message"] = message;
  err << extra.dump() << "\n";
  return kind == "config_error" ? kExitConfig : kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Directed hyperbolic graph embeddings"};
  app.require_subcommand(1);

  PreprocessArgs pre;
  auto* preprocess = app.add_subcommand("preprocess", "Build and cache the proximity matrices, print graph stats");
  preprocess->add_option("edges", pre.edges, "Edge list file")->required();
  preprocess->add_option("-K,--K", pre.K, "Proximity order")->capture_default_str();
  preprocess->add_option("--out", pre.out, "Output directory")->required();
  preprocess->add_flag("--allow-duplicate-edges", pre.allow_duplicates, "Drop repeated edges instead of failing");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a model from a JSON config");
  train_cmd->add_option("--config", tr.config, "Run config (JSON)")->required();
  train_cmd->add_option("--out", tr.out_dir, "Output directory (overrides config)");
  train_cmd->add_option("--seed", tr.seed, "Seed (overrides config)");
  train_cmd->add_flag("--deterministic,!--no-deterministic", tr.deterministic, "Deterministic mode (default on)");
  train_cmd->add_flag("-v,--verbose", tr.verbose, "Print per-epoch progress to stderr");

  ExportArgs ex;
  auto* export_cmd = app.add_subcommand("export", "Write embeddings, masses and a 2-D PCA projection");
  export_cmd->add_option("--checkpoint", ex.checkpoint, "Checkpoint written by train")->required();
  export_cmd->add_option("--out", ex.out, "Output directory")->required();
  export_cmd->add_option("--edges", ex.edges, "Edge list (defaults to the one in the checkpoint)");
  export_cmd->add_option("--features", ex.features, "Feature CSV (defaults to the checkpoint's)");
  export_cmd->add_option("--labels", ex.labels, "Label file (defaults to the checkpoint's)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return report_error(err, "config_error", e.what());
  }

  try {
    apply_thread_env();
    if (*preprocess) return cmd_preprocess(pre, out);
    if (*train_cmd) return cmd_train(tr, out, err);
    if (*export_cmd) return cmd_export(ex, out);
  } catch (const TrainingError& e) {
    return report_error(err, e.kind(), e.what(), {{"epoch", e.epoch()}});
  } catch (const NumericError& e) {
    return report_error(err, e.kind(), e.what(), {{"op", e.op()}});
  } catch (const Error& e) {
    return report_error(err, e.kind(), e.what());
  } catch (const fs::filesystem_error& e) {
    return report_error(err, "io_error", e.what());
  } catch (const std::exception& e) {
    return report_error(err, "internal_error", e.what());
  }
  return kExitFailure;
}

}  // namespace dhypr
