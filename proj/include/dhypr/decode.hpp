#pragma once

// Edge likelihood decoders, classifier head and the task losses.

#include <cstdint>
#include <span>
#include <vector>

#include "dhypr/digraph.hpp"
#include "dhypr/model.hpp"
#include "dhypr/tensor.hpp"

namespace dhypr {

struct DecoderConfig {
  double r = 2.0;       // Fermi-Dirac radius
  double t = 1.0;       // Fermi-Dirac temperature
  double lambda = 1.0;  // distance weight in the gravity decoder
  double w_g = 1.0;     // weight of the gravity loss
  double w_r = 0.5;     // weight of the self-supervised term in NC / SP
  void validate() const;
};

inline constexpr double kProbabilityFloor = 1e-12;
inline constexpr double kDistanceFloor = 1e-9;

// Scalar forms, used for reporting and as test oracles.
double fermi_dirac_probability(double distance, const DecoderConfig& cfg);
double gravity_probability(double distance, double target_mass, const DecoderConfig& cfg);

// Row-wise scores for edge lists; z_src/z_dst are n x d' points on the ball
// of curvature c, target_mass is n x 1.
ad::Tensor fermi_dirac_score(const ad::Tensor& z_src, const ad::Tensor& z_dst, const ad::Tensor& c,
                             const DecoderConfig& cfg);
ad::Tensor gravity_score(const ad::Tensor& z_src, const ad::Tensor& z_dst, const ad::Tensor& target_mass,
                         const ad::Tensor& c, const DecoderConfig& cfg);

// Mean binary cross-entropy over positives (target 1) and negatives (target 0).
ad::Tensor bce_with_negatives(const ad::Tensor& scores_pos, const ad::Tensor& scores_neg);

struct EdgeScores {
  ad::Tensor fermi_dirac;
  ad::Tensor gravity;
};
EdgeScores score_edges(const EmbeddingOutput& emb, std::span<const Edge> edges, const DecoderConfig& cfg);

// L_f + w_g L_g over the given positive and negative edges.
ad::Tensor lp_loss(const EmbeddingOutput& emb, std::span<const Edge> pos, std::span<const Edge> neg,
                   const DecoderConfig& cfg);

// Affine map + log-softmax.
ad::Tensor classifier_head(const ad::Tensor& inputs, const ad::Tensor& weight, const ad::Tensor& bias);
// Concatenated tangent embeddings of each edge's endpoints, |edges| x 2d'.
ad::Tensor edge_features(const ad::Tensor& z_tangent, std::span<const Edge> edges);
// Mean negative log-likelihood of the given classes.
ad::Tensor nll_loss(const ad::Tensor& log_probs, std::span<const std::uint32_t> classes);

// L_class + w_r (L_f + w_g L_g).
ad::Tensor nc_sp_loss(const ad::Tensor& class_loss, const EmbeddingOutput& emb, std::span<const Edge> pos,
                      std::span<const Edge> neg, const DecoderConfig& cfg);

}  // namespace dhypr
