#include "dhypr/digraph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "dhypr/errors.hpp"

namespace dhypr {

namespace {

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

std::vector<std::string_view> split_fields(std::string_view line, bool comma) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (comma) {
      const std::size_t j = line.find(',', i);
      const std::size_t end = j == std::string_view::npos ? line.size() : j;
      std::string_view f = line.substr(i, end - i);
      while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
      while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
      out.push_back(f);
      if (j == std::string_view::npos) break;
      i = j + 1;
    } else {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) out.push_back(line.substr(i, j - i));
      i = j;
    }
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool is_skippable(std::string_view line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string_view::npos || line[pos] == '#';
}

struct RawEdge {
  std::int64_t src;
  std::int64_t dst;
  std::optional<std::int64_t> sign;
  std::size_t line;
};

std::vector<RawEdge> read_edge_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open edge file " + path.string());
  std::vector<RawEdge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_skippable(line)) continue;
    const auto fields = split_fields(line, false);
    if (fields.size() != 2 && fields.size() != 3) {
      throw IngestionError(where(path, lineno) + ": expected 'src dst [sign]', got " +
                           std::to_string(fields.size()) + " fields");
    }
    RawEdge e{};
    e.line = lineno;
    if (!parse_number(fields[0], e.src) || !parse_number(fields[1], e.dst) || e.src < 0 || e.dst < 0) {
      throw IngestionError(where(path, lineno) + ": node ids must be nonnegative integers");
    }
    if (fields.size() == 3) {
      std::int64_t s = 0;
      if (!parse_number(fields[2], s)) throw IngestionError(where(path, lineno) + ": bad sign value");
      e.sign = s;
    }
    edges.push_back(e);
  }
  return edges;
}

Sign to_sign(std::int64_t v, const std::filesystem::path& path, std::size_t line) {
  switch (v) {
    case -1: return Sign::oppose;
    case 0: return Sign::neutral;
    case 1: return Sign::support;
    default:
      throw IngestionError(where(path, line) + ": sign must be -1, 0 or 1, got " + std::to_string(v));
  }
}

}  // namespace

Digraph::Digraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(edges_.size());
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const Edge& e = edges_[k];
    if (e.src >= n_ || e.dst >= n_) {
      throw IngestionError("edge " + std::to_string(k) + " (" + std::to_string(e.src) + ", " +
                           std::to_string(e.dst) + ") out of range for " + std::to_string(n_) +
                           " nodes");
    }
    if (e.src == e.dst) throw IngestionError("self-loop on node " + std::to_string(e.src));
    pairs.emplace_back(e.src, e.dst);
  }
  adjacency_ = SparseMatrix::from_pairs(n_, n_, std::move(pairs));
  if (adjacency_.nnz() != edges_.size()) throw IngestionError("duplicate edges in edge list");
  features = ad::Matrix::identity(n_);
  original_ids.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) original_ids[i] = static_cast<std::int64_t>(i);
}

bool Digraph::has_edge(std::uint32_t src, std::uint32_t dst) const {
  return adjacency_.contains(src, dst);
}

Digraph Digraph::with_edges(std::vector<Edge> edges) const {
  Digraph g(n_, std::move(edges));
  g.features = features;
  g.labels = labels;
  g.original_ids = original_ids;
  return g;
}

Digraph Digraph::reversed() const {
  std::vector<Edge> rev;
  rev.reserve(edges_.size());
  for (const auto& e : edges_) rev.push_back({e.dst, e.src});
  Digraph g = with_edges(std::move(rev));
  g.edge_signs = edge_signs;
  return g;
}

double Digraph::reciprocity() const {
  if (edges_.empty()) return 0.0;
  std::size_t mutual = 0;
  for (const auto& e : edges_) mutual += has_edge(e.dst, e.src) ? 1 : 0;
  return static_cast<double>(mutual) / static_cast<double>(edges_.size());
}

std::size_t Digraph::num_classes() const {
  if (!labels || labels->empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(labels->begin(), labels->end())) + 1;
}

ad::Matrix load_features_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open feature file " + path.string());
  std::vector<double> data;
  std::size_t rows = 0, cols = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_skippable(line)) continue;
    const auto fields = split_fields(line, true);
    if (rows == 0) cols = fields.size();
    if (fields.size() != cols) {
      throw IngestionError(where(path, lineno) + ": expected " + std::to_string(cols) +
                           " columns, got " + std::to_string(fields.size()));
    }
    for (auto f : fields) {
      double v = 0.0;
      if (!parse_number(f, v) || !std::isfinite(v)) {
        throw IngestionError(where(path, lineno) + ": bad feature value '" + std::string(f) + "'");
      }
      data.push_back(v);
    }
    ++rows;
  }
  return ad::Matrix(rows, cols, std::move(data));
}

std::vector<std::int32_t> load_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open label file " + path.string());
  std::vector<std::int32_t> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_skippable(line)) continue;
    const auto fields = split_fields(line, false);
    std::int32_t v = 0;
    if (fields.size() != 1 || !parse_number(fields[0], v) || v < 0) {
      throw IngestionError(where(path, lineno) + ": expected one nonnegative integer label");
    }
    labels.push_back(v);
  }
  return labels;
}

Digraph load_digraph(const std::filesystem::path& edge_path,
                     const std::optional<std::filesystem::path>& feature_path,
                     const std::optional<std::filesystem::path>& label_path, LoadOptions options) {
  const auto raw = read_edge_lines(edge_path);

  std::optional<ad::Matrix> features;
  std::optional<std::vector<std::int32_t>> labels;
  if (feature_path) features = load_features_csv(*feature_path);
  if (label_path) labels = load_labels(*label_path);
  if (features && labels && features->rows() != labels->size()) {
    throw IngestionError("feature file has " + std::to_string(features->rows()) +
                         " rows but label file has " + std::to_string(labels->size()));
  }

  // Either explicit row indexing (n fixed by side files) or dense remapping.
  std::size_t n = 0;
  std::map<std::int64_t, std::uint32_t> remap;
  const bool indexed = features || labels;
  if (indexed) {
    n = features ? features->rows() : labels->size();
  } else {
    for (const auto& e : raw) {
      remap.emplace(e.src, 0);
      remap.emplace(e.dst, 0);
    }
    for (auto& [id, dense] : remap) dense = static_cast<std::uint32_t>(n++);
  }

  const bool signed_edges = !raw.empty() && raw.front().sign.has_value();
  std::vector<Edge> edges;
  std::vector<Sign> signs;
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (const auto& e : raw) {
    if (e.sign.has_value() != signed_edges) {
      throw IngestionError(where(edge_path, e.line) + ": either every line or no line carries a sign");
    }
    std::uint32_t s = 0, d = 0;
    if (indexed) {
      if (e.src >= static_cast<std::int64_t>(n) || e.dst >= static_cast<std::int64_t>(n)) {
        throw IngestionError(where(edge_path, e.line) + ": node id out of range [0, " +
                             std::to_string(n) + ")");
      }
      s = static_cast<std::uint32_t>(e.src);
      d = static_cast<std::uint32_t>(e.dst);
    } else {
      s = remap.at(e.src);
      d = remap.at(e.dst);
    }
    if (s == d) throw IngestionError(where(edge_path, e.line) + ": self-loop on node " + std::to_string(e.src));
    if (!seen.emplace(s, d).second) {
      if (options.allow_duplicate_edges) continue;
      throw IngestionError(where(edge_path, e.line) + ": duplicate edge " + std::to_string(e.src) +
                           " -> " + std::to_string(e.dst));
    }
    edges.push_back({s, d});
    if (signed_edges) signs.push_back(to_sign(*e.sign, edge_path, e.line));
  }

  Digraph g(n, std::move(edges));
  if (features) g.features = std::move(*features);
  g.labels = std::move(labels);
  if (signed_edges) g.edge_signs = std::move(signs);
  if (!indexed) {
    for (const auto& [id, dense] : remap) g.original_ids[dense] = id;
  }
  return g;
}

}  // namespace dhypr
