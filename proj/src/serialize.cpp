#include "dhypr/serialize.hpp"

#include <cstring>
#include <fstream>
#include <json.hpp>

#include "dhypr/errors.hpp"

namespace dhypr {

namespace {

constexpr char kMagic[8] = {'D', 'H', 'Y', 'P', 'R', 'C', 'K', 'P'};

template <typename T>
void write_pod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& v, const std::filesystem::path& path) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError("checkpoint " + path.string() + " is truncated");
}

std::string read_string(std::istream& in, std::uint64_t len, const std::filesystem::path& path) {
  if (len > (1ull << 32)) throw FormatError("checkpoint " + path.string() + ": implausible string length");
  std::string s(len, '\0');
  in.read(s.data(), static_cast<std::streamsize>(len));
  if (!in) throw FormatError("checkpoint " + path.string() + " is truncated");
  return s;
}

nlohmann::json model_to_json(const ModelConfig& c) {
  return {{"input_dim", c.input_dim},
          {"dims", c.dims},
          {"K", c.K},
          {"num_classes", c.num_classes},
          {"classifier_input", c.classifier_input}};
}

ModelConfig model_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.input_dim = j.at("input_dim").get<std::size_t>();
  c.dims = j.at("dims").get<std::vector<std::size_t>>();
  c.K = j.at("K").get<int>();
  c.num_classes = j.at("num_classes").get<std::size_t>();
  c.classifier_input = j.at("classifier_input").get<std::size_t>();
  return c;
}

// Parameters of the right shapes, all zero; filled from the file afterwards.
ModelParams skeleton(const ModelConfig& config) {
  config.validate();
  ModelParams p;
  p.config = config;
  p.branches.resize(config.num_branches());
  for (auto& branch : p.branches) {
    std::size_t in = config.input_dim;
    for (auto out : config.dims) {
      branch.push_back({ad::Matrix(out, in), ad::Matrix(1, out)});
      in = out;
    }
  }
  p.raw_curvatures.assign(config.num_layers() + 1, ad::Matrix(1, 1));
  p.mass_weight = ad::Matrix(config.embedding_dim(), 1);
  p.mass_bias = ad::Matrix(1, 1);
  if (config.num_classes > 0) {
    p.class_weight = ad::Matrix(config.num_classes, config.classifier_input);
    p.class_bias = ad::Matrix(1, config.num_classes);
  }
  return p;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  nlohmann::json header;
  header["model"] = model_to_json(ckpt.params.config);
  try {
    header["config"] = nlohmann::json::parse(ckpt.config_echo);
  } catch (const nlohmann::json::exception& e) {
    throw ContractViolation(std::string("checkpoint config echo is not valid JSON: ") + e.what());
  }
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kCheckpointFormatVersion);
  write_pod(out, static_cast<std::uint64_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  const auto named = ckpt.params.named();
  write_pod(out, static_cast<std::uint32_t>(named.size()));
  for (const auto& [name, m] : named) {
    write_pod(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_pod(out, static_cast<std::uint64_t>(m->rows()));
    write_pod(out, static_cast<std::uint64_t>(m->cols()));
    out.write(reinterpret_cast<const char*>(m->data().data()),
              static_cast<std::streamsize>(m->size() * sizeof(double)));
  }
  if (!out) throw FormatError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError(path.string() + " is not a checkpoint");
  }
  std::uint32_t version = 0;
  read_pod(in, version, path);
  if (version != kCheckpointFormatVersion) {
    throw FormatError("checkpoint format version " + std::to_string(version) + " is not supported");
  }
  std::uint64_t len = 0;
  read_pod(in, len, path);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(read_string(in, len, path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("checkpoint " + path.string() + ": bad header: " + e.what());
  }

  Checkpoint ckpt;
  try {
    ckpt.params = skeleton(model_from_json(header.at("model")));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("checkpoint " + path.string() + ": bad model header: " + e.what());
  } catch (const ContractViolation& e) {
    throw FormatError("checkpoint " + path.string() + ": " + e.what());
  }
  ckpt.config_echo = header.value("config", nlohmann::json::object()).dump();

  auto named = ckpt.params.named();
  std::uint32_t count = 0;
  read_pod(in, count, path);
  if (count != named.size()) {
    throw FormatError("checkpoint " + path.string() + " holds " + std::to_string(count) + " tensors, expected " +
                      std::to_string(named.size()));
  }
  for (auto& [name, m] : named) {
    std::uint32_t name_len = 0;
    read_pod(in, name_len, path);
    const std::string stored = read_string(in, name_len, path);
    if (stored != name) throw FormatError("checkpoint tensor '" + stored + "' where '" + name + "' was expected");
    std::uint64_t rows = 0, cols = 0;
    read_pod(in, rows, path);
    read_pod(in, cols, path);
    if (rows != m->rows() || cols != m->cols()) {
      throw FormatError("checkpoint tensor '" + name + "' has shape " + std::to_string(rows) + "x" +
                        std::to_string(cols) + ", expected " + to_string(m->shape()));
    }
    in.read(reinterpret_cast<char*>(m->data().data()), static_cast<std::streamsize>(m->size() * sizeof(double)));
    if (!in) throw FormatError("checkpoint " + path.string() + " is truncated");
  }
  return ckpt;
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::json j;
  j["metrics"] = report.metrics;
  j["best_epoch"] = report.best_epoch;
  j["wall_seconds"] = report.wall_seconds;
  auto& history = j["history"] = nlohmann::json::array();
  for (const auto& r : report.history) {
    history.push_back({{"epoch", r.epoch}, {"loss", r.loss}, {"val_metric", r.val_metric}});
  }
  return j.dump(2);
}

}  // namespace dhypr
