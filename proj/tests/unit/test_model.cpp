#include <gtest/gtest.h>

#include <cmath>

#include "dhypr/errors.hpp"
#include "dhypr/geometry.hpp"
#include "dhypr/hyperbolic.hpp"
#include "dhypr/model.hpp"
#include "gradcheck.hpp"
#include "synthetic.hpp"

namespace {

using namespace dhypr;
using ad::Matrix;
using ad::Tensor;
using geometry::Curvature;
using geometry::Vec;

Vec row(const Matrix& m, std::size_t i) { return {m.row(i).begin(), m.row(i).end()}; }

Vec random_ball_point(Rng& rng, std::size_t d, double c, double frac) {
  Vec v(d);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  const double r = rng.uniform(0.05, frac) / std::sqrt(c) / geometry::norm(v);
  for (auto& x : v) x *= r;
  return v;
}

Matrix rows_to_matrix(const std::vector<Vec>& rows) {
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  return m;
}

// Forward pass replayed node by node with the scalar reference kernel.
struct ScalarForward {
  std::vector<Vec> z_hyper, z_tangent;
  std::vector<double> mass;
};

ScalarForward scalar_forward(const Matrix& features, const ProximityStack& stack, const ModelParams& p) {
  const std::size_t n = features.rows();
  const auto cs = p.curvatures();
  std::vector<std::vector<Vec>> outputs;
  for (std::size_t b = 0; b < p.branches.size(); ++b) {
    const SparseMatrix& w = stack.weights(b)->forward;
    std::vector<Vec> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = geometry::exp_map_origin(row(features, i), Curvature(cs[0]));
    for (std::size_t l = 0; l < p.branches[b].size(); ++l) {
      const Curvature c_prev(cs[l]), c_next(cs[l + 1]);
      const auto& layer = p.branches[b][l];
      const Vec bias_point = geometry::exp_map_origin(row(layer.bias, 0), c_prev);
      std::vector<Vec> msg(n);
      for (std::size_t i = 0; i < n; ++i) {
        const Vec h = geometry::mobius_matvec(layer.weight.data(), layer.weight.rows(), layer.weight.cols(), x[i],
                                              c_prev);
        msg[i] = geometry::log_map_origin(geometry::mobius_add(h, bias_point, c_prev), c_prev);
      }
      const bool last = l + 1 == p.branches[b].size();
      for (std::size_t i = 0; i < n; ++i) {
        Vec agg(layer.weight.rows(), 0.0);
        for (std::size_t q = w.row_ptr[i]; q < w.row_ptr[i + 1]; ++q) {
          for (std::size_t k = 0; k < agg.size(); ++k) agg[k] += w.value_at(q) * msg[w.col_idx[q]][k];
        }
        Vec u = geometry::log_map_origin(geometry::exp_map_origin(agg, c_prev), c_prev);
        if (!last) {
          for (auto& v : u) v = std::max(v, 0.0);
        }
        x[i] = geometry::exp_map_origin(u, c_next);
      }
    }
    outputs.push_back(std::move(x));
  }

  const Curvature cl(cs.back());
  const double count = static_cast<double>(outputs.size());
  ScalarForward out;
  for (std::size_t i = 0; i < n; ++i) {
    Vec fold = outputs[0][i];
    for (std::size_t b = 1; b < outputs.size(); ++b) fold = geometry::mobius_add(fold, outputs[b][i], cl);
    Vec mean = geometry::log_map_origin(geometry::mobius_scalar_mul(1.0 / count, fold, cl), cl);
    for (const auto& o : outputs) {
      const Vec t = geometry::log_map_origin(o[i], cl);
      for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += t[k];
    }
    for (auto& v : mean) v /= count + 1.0;
    const Vec z = geometry::exp_map_origin(mean, cl);
    const Vec zt = geometry::log_map_origin(z, cl);
    double m = p.mass_bias[0];
    for (std::size_t k = 0; k < zt.size(); ++k) m += zt[k] * p.mass_weight[k];
    out.z_hyper.push_back(z);
    out.z_tangent.push_back(zt);
    out.mass.push_back(m);
  }
  return out;
}

struct Fixture {
  Digraph g;
  ProximityStack stack;
  ModelParams params;
};

Fixture small_model(std::uint64_t seed, int K, std::vector<std::size_t> dims, std::size_t n = 12) {
  Rng rng(seed);
  Fixture f;
  f.g = dhypr::testing::random_digraph(n, 0.2, rng);
  Matrix x(n, 5);
  for (auto& v : x.data()) v = rng.uniform(-1.0, 1.0);
  f.g.features = x;
  f.stack = build_stack(f.g, K);
  ModelConfig cfg;
  cfg.input_dim = 5;
  cfg.dims = std::move(dims);
  cfg.K = K;
  f.params = init_params(cfg, rng);
  // Move away from the symmetric initial state.
  for (auto& [name, m] : f.params.named()) {
    if (name.find("bias") != std::string::npos) {
      for (auto& v : m->data()) v = rng.uniform(-0.3, 0.3);
    }
  }
  for (auto& raw : f.params.raw_curvatures) raw(0, 0) = geometry::softplus_inverse(rng.uniform(0.5, 2.0));
  return f;
}

TEST(Model, InitialisationShapes) {
  ModelConfig cfg;
  cfg.input_dim = 10;
  cfg.dims = {8, 4};
  cfg.K = 2;
  cfg.num_classes = 3;
  cfg.classifier_input = 4;
  Rng rng(0);
  const ModelParams p = init_params(cfg, rng);
  ASSERT_EQ(p.branches.size(), 8u);
  for (const auto& branch : p.branches) {
    ASSERT_EQ(branch.size(), 2u);
    EXPECT_EQ(branch[0].weight.shape(), (ad::Shape{8, 10}));
    EXPECT_EQ(branch[1].weight.shape(), (ad::Shape{4, 8}));
    EXPECT_EQ(branch[1].bias.shape(), (ad::Shape{1, 4}));
    const double bound = std::sqrt(6.0 / 18.0);
    for (double v : branch[0].weight.data()) EXPECT_LE(std::abs(v), bound);
  }
  for (double c : p.curvatures()) EXPECT_NEAR(c, 1.0, 1e-15);
  EXPECT_EQ(p.curvatures().size(), 3u);
  EXPECT_EQ(p.mass_weight.shape(), (ad::Shape{4, 1}));
  EXPECT_EQ(p.class_weight.shape(), (ad::Shape{3, 4}));
}

TEST(Model, LiftZeroRowIsOrigin) {
  ad::Tape tape;
  const Tensor x = tape.constant(Matrix(2, 3, std::vector<double>{0, 0, 0, 0.2, -0.1, 0.4}));
  const Matrix z = lift_features(x, tape.constant(Matrix::scalar(1.0))).value();
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(z(0, j), 0.0);
}

TEST(Model, HypLayerIdentityCase) {
  Rng rng(1);
  for (double cv : {0.5, 1.0, 2.0}) {
    const Vec p = random_ball_point(rng, 4, cv, 0.9);
    ad::Tape tape;
    const Tensor c = tape.constant(Matrix::scalar(cv));
    const Tensor x = tape.constant(rows_to_matrix({p}));
    SparseMatrix self = SparseMatrix::from_pairs(1, 1, {{0, 0}});
    const auto agg = std::make_shared<const ad::SparseOperand>(self);
    const Matrix out = hyp_layer(x, tape.constant(Matrix::identity(4)), tape.constant(Matrix(1, 4)), agg, c, c,
                                 Activation::identity)
                           .value();
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(out(0, j), p[j], 1e-6);
  }
}

TEST(Model, CollaborationIsIdempotentOnEqualInputs) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const double cv = rng.uniform(0.3, 3.0);
    const int K = 1 + trial % 3;
    // The fold of 4K copies lies at 4K times the hyperbolic radius of v; keep
    // it inside the projection shell, where the identity is exact.
    const double radius = rng.uniform(0.05, 5.0 / (4.0 * K));
    Vec v = random_ball_point(rng, 1 + trial % 6, cv, 0.5);
    const double scale = std::tanh(radius) / std::sqrt(cv) / geometry::norm(v);
    for (auto& x : v) x *= scale;
    ad::Tape tape;
    const Tensor c = tape.constant(Matrix::scalar(cv));
    const Tensor t = tape.constant(rows_to_matrix({v}));
    const EmbeddingOutput out = collaborate(std::vector<Tensor>(4 * static_cast<std::size_t>(K), t), c);
    for (std::size_t j = 0; j < v.size(); ++j) EXPECT_NEAR(out.z_hyper.value()(0, j), v[j], 1e-6) << trial;
  }
}

TEST(Model, CollaborationWithOneOrderAveragesFiveMembers) {
  Rng rng(3);
  const Curvature c(1.3);
  std::vector<Vec> members;
  for (int b = 0; b < 4; ++b) members.push_back(random_ball_point(rng, 3, 1.3, 0.9));
  ad::Tape tape;
  std::vector<Tensor> outs;
  for (const auto& m : members) outs.push_back(tape.constant(rows_to_matrix({m})));
  const EmbeddingOutput e = collaborate(outs, tape.constant(Matrix::scalar(1.3)));

  Vec fold = members[0];
  for (int b = 1; b < 4; ++b) fold = geometry::mobius_add(fold, members[static_cast<std::size_t>(b)], c);
  Vec expected = geometry::log_map_origin(geometry::mobius_scalar_mul(0.25, fold, c), c);
  for (auto& v : expected) v *= 0.2;
  for (const auto& m : members) {
    const Vec t = geometry::log_map_origin(m, c);
    for (std::size_t j = 0; j < 3; ++j) expected[j] += 0.2 * t[j];
  }
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(e.z_tangent.value()(0, j), expected[j], 1e-12);
}

TEST(Model, CollaborationRejectsEmptyInput) {
  ad::Tape tape;
  EXPECT_THROW(collaborate({}, tape.constant(Matrix::scalar(1.0))), ContractViolation);
}

TEST(Model, NodeMassExamples) {
  ad::Tape tape;
  const Tensor z = tape.constant(Matrix(3, 2, std::vector<double>{1, 2, 3, 4, 5, 6}));
  const Matrix m = node_mass(z, tape.constant(Matrix(2, 1)), tape.constant(Matrix::scalar(3.0))).value();
  for (double v : m.data()) EXPECT_EQ(v, 3.0);
  const Matrix m2 =
      node_mass(z, tape.constant(Matrix(2, 1, std::vector<double>{1.0, -0.5})), tape.constant(Matrix::scalar(0.5)))
          .value();
  EXPECT_DOUBLE_EQ(m2(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(m2(1, 0), 1.5);
  EXPECT_DOUBLE_EQ(m2(2, 0), 2.5);
}

TEST(Model, ForwardMatchesScalarOracle) {
  for (int K : {1, 2}) {
    Fixture f = small_model(10 + static_cast<std::uint64_t>(K), K, {6, 3});
    ad::Tape tape;
    const BoundParams bp = bind(tape, f.params, false);
    const EmbeddingOutput out = forward(tape.constant(f.g.features), f.stack, bp);
    const ScalarForward ref = scalar_forward(f.g.features, f.stack, f.params);
    for (std::size_t i = 0; i < f.g.num_nodes(); ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_NEAR(out.z_hyper.value()(i, j), ref.z_hyper[i][j], 1e-9);
        EXPECT_NEAR(out.z_tangent.value()(i, j), ref.z_tangent[i][j], 1e-9);
      }
      EXPECT_NEAR(out.mass.value()(i, 0), ref.mass[i], 1e-9);
    }
    EXPECT_NEAR(out.curvature.value()[0], f.params.curvatures().back(), 1e-15);
  }
}

TEST(Model, ForwardBranchesCountAndIndependence) {
  Fixture f = small_model(20, 2, {6, 3});
  const auto run = [&](const ModelParams& p) {
    ad::Tape tape;
    const BoundParams bp = bind(tape, p, false);
    const auto outs = forward_branches(lift_features(tape.constant(f.g.features), bp.curvatures.front()), f.stack, bp);
    std::vector<Matrix> values;
    for (const auto& o : outs) values.push_back(o.value());
    return values;
  };
  const auto base = run(f.params);
  ASSERT_EQ(base.size(), 8u);
  ModelParams changed = f.params;
  for (auto& v : changed.branches[5][0].weight.data()) v += 0.1;
  const auto after = run(changed);
  for (std::size_t b = 0; b < 8; ++b) {
    if (b == 5) {
      EXPECT_NE(after[b], base[b]);
    } else {
      EXPECT_EQ(after[b], base[b]) << "branch " << b;
    }
  }
}

TEST(Model, ForwardRejectsStackMismatch) {
  Fixture f = small_model(21, 2, {4});
  const ProximityStack other = build_stack(f.g, 1);
  ad::Tape tape;
  const BoundParams bp = bind(tape, f.params, false);
  EXPECT_THROW(forward(tape.constant(f.g.features), other, bp), ContractViolation);
}

TEST(Model, DropoutOnlyActsWithGenerator) {
  Fixture f = small_model(22, 1, {6, 3});
  ad::Tape tape;
  const BoundParams bp = bind(tape, f.params, false);
  const Tensor x = tape.constant(f.g.features);
  const Matrix plain = forward(x, f.stack, bp).z_hyper.value();
  EXPECT_EQ(forward(x, f.stack, bp, Dropout{0.5, nullptr}).z_hyper.value(), plain);
  Rng rng(1);
  EXPECT_NE(forward(x, f.stack, bp, Dropout{0.5, &rng}).z_hyper.value(), plain);
}

TEST(Model, GradientsOfEveryParameter) {
  Fixture f = small_model(30, 1, {4, 3}, 8);
  Rng rng(5);
  Matrix probe_z(8, 3), probe_m(8, 1);
  for (auto& v : probe_z.data()) v = rng.uniform(-1.0, 1.0);
  for (auto& v : probe_m.data()) v = rng.uniform(-1.0, 1.0);
  const auto evaluate = [&](ad::Tape& tape) {
    const BoundParams bp = bind(tape, f.params, true);
    const EmbeddingOutput out = forward(tape.constant(f.g.features), f.stack, bp);
    const Tensor loss =
        ad::sum(out.z_hyper * tape.constant(probe_z)) + ad::sum(out.mass * tape.constant(probe_m));
    return std::make_pair(loss, bp.flat);
  };
  std::vector<Matrix*> ptrs;
  for (auto& [name, m] : f.params.named()) ptrs.push_back(m);
  const auto r = dhypr::testing::grad_check(evaluate, ptrs);
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
  EXPECT_GT(r.checked, 100u);
}

}  // namespace
