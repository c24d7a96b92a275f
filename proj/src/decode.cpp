#include "dhypr/decode.hpp"

#include <cmath>

#include "dhypr/hyperbolic.hpp"

namespace dhypr {

namespace {

void split_endpoints(std::span<const Edge> edges, std::vector<std::uint32_t>& src,
                     std::vector<std::uint32_t>& dst) {
  src.reserve(edges.size());
  dst.reserve(edges.size());
  for (const auto& e : edges) {
    src.push_back(e.src);
    dst.push_back(e.dst);
  }
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

void DecoderConfig::validate() const {
  if (!(t > 0.0)) throw ConfigError("decoder temperature t must be positive");
  if (!(lambda > 0.0)) throw ConfigError("gravity weight lambda must be positive");
  if (w_g < 0.0 || w_r < 0.0) throw ConfigError("loss weights w_g and w_r must be nonnegative");
}

double fermi_dirac_probability(double distance, const DecoderConfig& cfg) {
  return 1.0 / (std::exp((distance * distance - cfg.r) / cfg.t) + 1.0);
}

double gravity_probability(double distance, double target_mass, const DecoderConfig& cfg) {
  const double d = std::max(distance, kDistanceFloor);
  return sigmoid(target_mass - cfg.lambda * std::log(d * d));
}

ad::Tensor fermi_dirac_score(const ad::Tensor& z_src, const ad::Tensor& z_dst, const ad::Tensor& c,
                             const DecoderConfig& cfg) {
  const ad::Tensor d = hyp::distance(z_src, z_dst, c);
  // 1 / (exp(x) + 1) == sigmoid(-x)
  return ad::sigmoid((cfg.r - d * d) / cfg.t);
}

ad::Tensor gravity_score(const ad::Tensor& z_src, const ad::Tensor& z_dst, const ad::Tensor& target_mass,
                         const ad::Tensor& c, const DecoderConfig& cfg) {
  const ad::Tensor d = ad::clamp_min(hyp::distance(z_src, z_dst, c), kDistanceFloor);
  return ad::sigmoid(target_mass - cfg.lambda * ad::log(d * d));
}

ad::Tensor bce_with_negatives(const ad::Tensor& scores_pos, const ad::Tensor& scores_neg) {
  if (scores_pos.rows() == 0) throw ContractViolation("bce_with_negatives: empty positive set");
  constexpr double lo = kProbabilityFloor;
  constexpr double hi = 1.0 - kProbabilityFloor;
  ad::Tensor total = ad::sum(ad::log(ad::clamp(scores_pos, lo, hi)));
  double count = static_cast<double>(scores_pos.rows());
  if (scores_neg.rows() > 0) {
    total = total + ad::sum(ad::log(1.0 - ad::clamp(scores_neg, lo, hi)));
    count += static_cast<double>(scores_neg.rows());
  }
  return total * (-1.0 / count);
}

EdgeScores score_edges(const EmbeddingOutput& emb, std::span<const Edge> edges, const DecoderConfig& cfg) {
  std::vector<std::uint32_t> src, dst;
  split_endpoints(edges, src, dst);
  const ad::Tensor zs = ad::gather_rows(emb.z_hyper, src);
  const ad::Tensor zd = ad::gather_rows(emb.z_hyper, dst);
  EdgeScores s;
  s.fermi_dirac = fermi_dirac_score(zs, zd, emb.curvature, cfg);
  s.gravity = gravity_score(zs, zd, ad::gather_rows(emb.mass, dst), emb.curvature, cfg);
  return s;
}

ad::Tensor lp_loss(const EmbeddingOutput& emb, std::span<const Edge> pos, std::span<const Edge> neg,
                   const DecoderConfig& cfg) {
  const EdgeScores p = score_edges(emb, pos, cfg);
  ad::Tape& tape = emb.z_hyper.tape();
  // An empty negative set is represented by a 0 x 1 tensor.
  const EdgeScores n = neg.empty()
                           ? EdgeScores{tape.constant(ad::Matrix(0, 1)), tape.constant(ad::Matrix(0, 1))}
                           : score_edges(emb, neg, cfg);
  const ad::Tensor loss_f = bce_with_negatives(p.fermi_dirac, n.fermi_dirac);
  if (cfg.w_g == 0.0) return loss_f;
  return loss_f + cfg.w_g * bce_with_negatives(p.gravity, n.gravity);
}

ad::Tensor classifier_head(const ad::Tensor& inputs, const ad::Tensor& weight, const ad::Tensor& bias) {
  if (inputs.cols() != weight.cols()) {
    throw ContractViolation("classifier_head: input width " + std::to_string(inputs.cols()) +
                            " does not match head width " + std::to_string(weight.cols()));
  }
  if (bias.cols() != weight.rows()) throw ContractViolation("classifier_head: class-count mismatch");
  return ad::log_softmax_rows(ad::matmul_nt(inputs, weight) + bias);
}

ad::Tensor edge_features(const ad::Tensor& z_tangent, std::span<const Edge> edges) {
  std::vector<std::uint32_t> src, dst;
  split_endpoints(edges, src, dst);
  return ad::concat_cols({ad::gather_rows(z_tangent, src), ad::gather_rows(z_tangent, dst)});
}

ad::Tensor nll_loss(const ad::Tensor& log_probs, std::span<const std::uint32_t> classes) {
  if (classes.empty()) throw ContractViolation("nll_loss: no labeled items");
  for (auto c : classes) {
    if (c >= log_probs.cols()) throw ContractViolation("nll_loss: class index exceeds class count");
  }
  return -ad::mean(ad::pick(log_probs, classes));
}

ad::Tensor nc_sp_loss(const ad::Tensor& class_loss, const EmbeddingOutput& emb, std::span<const Edge> pos,
                      std::span<const Edge> neg, const DecoderConfig& cfg) {
  if (cfg.w_r == 0.0) return class_loss;
  return class_loss + cfg.w_r * lp_loss(emb, pos, neg, cfg);
}

}  // namespace dhypr
