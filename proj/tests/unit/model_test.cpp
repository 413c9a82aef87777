#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "../support/finite_difference.hpp"
#include "../support/reference_model.hpp"
#include "mlstm/autodiff/gradcheck.hpp"
#include "mlstm/model/checkpoint.hpp"
#include "mlstm/model/layers.hpp"
#include "mlstm/model/model.hpp"

using namespace mlstm;
using namespace mlstm::model;
using mlstm::testing::random_tensor;
namespace ref = mlstm::testing::ref;

namespace {

ModelConfig small_config(std::size_t l, std::size_t d, HeadKind head) {
  ModelConfig c;
  c.hidden_dim = l;
  c.embed_dim = d;
  c.head = head;
  return c;
}

ModelParams random_params(const ModelConfig& config, std::mt19937_64& rng, double scale = 0.5) {
  ModelParams p = ModelParams::initialize(config, rng);
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (const auto& n : p.names())
    for (std::size_t i = 0; i < p.at(n).size(); ++i) p.at(n)[i] = dist(rng);
  return p;
}

// Graph with parameter inputs plus named data inputs.
struct Harness {
  ad::Graph g;
  ParamNodes p;
  ad::Bindings b;
  std::vector<std::unique_ptr<Tensor>> owned;

  explicit Harness(const ModelParams& params) : p(ParamNodes::declare(g, params)) {
    for (const auto& n : params.names()) b.bind(n, params.at(n));
  }
  NodeId data(const std::string& name, Tensor t) {
    owned.push_back(std::make_unique<Tensor>(std::move(t)));
    b.bind(name, *owned.back());
    return g.input(name, owned.back()->shape(), ad::InputKind::kData);
  }
  const Tensor& run(NodeId out) {
    g.forward(b);
    return g.value(out);
  }
};

double row_sum(const Tensor& t, std::size_t r) {
  double s = 0;
  for (std::size_t c = 0; c < t.cols(); ++c) s += t(r, c);
  return s;
}

}  // namespace

TEST(ParameterLayout, SharedAttentionAndShapes) {
  const ModelConfig c = small_config(4, 3, HeadKind::kBoundary);
  std::mt19937_64 rng(1);
  const ModelParams p = ModelParams::initialize(c, rng);
  EXPECT_EQ(p.at("att.Wq").shape(), (Shape{4, 4}));
  EXPECT_EQ(p.at("att.w").shape(), (Shape{4, 1}));
  EXPECT_EQ(p.at("att.b").shape(), (Shape{1, 1}));
  EXPECT_EQ(p.at("match_fwd.Wi").shape(), (Shape{4, 8}));
  EXPECT_EQ(p.at("ptr.V").shape(), (Shape{4, 8}));
  EXPECT_EQ(p.at("ptr.lstm.Wi").shape(), (Shape{4, 8}));
  EXPECT_EQ(p.at("pre.Wi").shape(), (Shape{4, 3}));
  EXPECT_FALSE(p.contains("pre.Wo"));  // no output gate in preprocessing
  EXPECT_FALSE(p.contains("att_bwd.Wq"));
  EXPECT_EQ(p.at("pre.bf"), Tensor(4, 1, 1.0));
  EXPECT_EQ(p.at("att.bp"), Tensor(4, 1, 0.0));
  for (const auto& n : p.names()) EXPECT_LE(p.at(n).max_abs(), 1.0);
}

TEST(ParameterLayout, VariantsAddTheirTensors) {
  ModelConfig c = small_config(4, 3, HeadKind::kBoundary);
  c.bi_preprocess = true;
  c.bi_answer_pointer = true;
  c.shared_preprocess = false;
  std::mt19937_64 rng(1);
  const ModelParams p = ModelParams::initialize(c, rng);
  EXPECT_TRUE(p.contains("pre_p_rev.Wi"));
  EXPECT_TRUE(p.contains("pre_q_proj"));
  EXPECT_EQ(p.at("pre_q_proj").shape(), (Shape{4, 8}));
  EXPECT_TRUE(p.contains("ptr_rev.lstm.Wo"));

  ModelConfig bad = small_config(4, 3, HeadKind::kSequence);
  bad.bi_answer_pointer = true;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_THROW(small_config(0, 3, HeadKind::kBoundary).validate(), std::invalid_argument);
}

TEST(Preprocess, EmptyPassage) {
  const ModelConfig c = small_config(4, 3, HeadKind::kBoundary);
  std::mt19937_64 rng(2);
  const ModelParams params = random_params(c, rng);
  Harness h(params);
  auto pe = h.data("pe", Tensor(3, 0));
  auto qe = h.data("qe", random_tensor(3, 2, rng));
  auto enc = lstm_preprocess(h.g, h.p, c, pe, qe);
  EXPECT_EQ(h.g.shape(enc.passage), (Shape{4, 0}));
  h.g.forward(h.b);
  EXPECT_EQ(h.g.value(enc.passage).size(), 0u);
}

TEST(Preprocess, ShapeContract) {
  const ModelConfig c = small_config(4, 3, HeadKind::kBoundary);
  std::mt19937_64 rng(3);
  const ModelParams params = random_params(c, rng);
  Harness h(params);
  auto enc = lstm_preprocess(h.g, h.p, c, h.data("pe", random_tensor(3, 7, rng)),
                             h.data("qe", random_tensor(3, 5, rng)));
  EXPECT_EQ(h.g.shape(enc.passage), (Shape{4, 7}));
  EXPECT_EQ(h.g.shape(enc.question), (Shape{4, 5}));

  ModelConfig bi = c;
  bi.bi_preprocess = true;
  const ModelParams bparams = random_params(bi, rng);
  Harness hb(bparams);
  auto benc = lstm_preprocess(hb.g, hb.p, bi, hb.data("pe", random_tensor(3, 7, rng)),
                              hb.data("qe", random_tensor(3, 5, rng)));
  EXPECT_EQ(hb.g.shape(benc.passage), (Shape{4, 7}));
  hb.g.forward(hb.b);
  EXPECT_TRUE(hb.g.value(benc.passage).all_finite());
}

TEST(Preprocess, ZeroInputsWithZeroBiasesGiveIdenticalColumns) {
  const ModelConfig c = small_config(4, 3, HeadKind::kBoundary);
  std::mt19937_64 rng(4);
  ModelParams params = random_params(c, rng);
  for (const char* b : {"pre.bi", "pre.bf", "pre.bc"}) params.at(b).fill(0);
  Harness h(params);
  auto enc = lstm_preprocess(h.g, h.p, c, h.data("pe", Tensor(3, 6)), h.data("qe", Tensor(3, 2)));
  const Tensor& hp = h.run(enc.passage);
  // Zero input and zero bias: the candidate is tanh(U h) with h_0 = 0, so
  // c_1 = 0 and every later step repeats the same fixed point.
  for (std::size_t t = 1; t < hp.cols(); ++t)
    for (std::size_t r = 0; r < hp.rows(); ++r) EXPECT_EQ(hp(r, t), hp(r, 0));
}

TEST(Preprocess, NoOutputGateMeansTanhOfCell) {
  // One step, l = d = 1, hand-computed: c = sigmoid(wi x) * tanh(wc x).
  ModelConfig c = small_config(1, 1, HeadKind::kBoundary);
  ModelParams params = ModelParams::zeros(c);
  params.at("pre.Wi")(0, 0) = 0.5;
  params.at("pre.Wc")(0, 0) = 2.0;
  Harness h(params);
  auto enc = lstm_preprocess(h.g, h.p, c, h.data("pe", Tensor::from_rows({{0.3}})),
                             h.data("qe", Tensor::from_rows({{0.3}})));
  const double cell = (1.0 / (1.0 + std::exp(-0.15))) * std::tanh(0.6);
  EXPECT_NEAR(h.run(enc.passage)(0, 0), std::tanh(cell), 1e-15);
}

TEST(MatchAttention, SingletonQuestion) {
  const ModelConfig c = small_config(3, 3, HeadKind::kBoundary);
  std::mt19937_64 rng(5);
  const ModelParams params = random_params(c, rng);
  Harness h(params);
  auto alpha = match_attention(h.g, h.p, h.data("hq", random_tensor(3, 1, rng)),
                               h.data("hp", random_tensor(3, 1, rng)), h.data("hr", random_tensor(3, 1, rng)));
  EXPECT_EQ(h.run(alpha), Tensor::from_rows({{1.0}}));
}

TEST(MatchAttention, ZeroParametersGiveUniform) {
  const ModelConfig c = small_config(3, 3, HeadKind::kBoundary);
  std::mt19937_64 rng(6);
  const ModelParams params = ModelParams::zeros(c);
  Harness h(params);
  auto alpha = match_attention(h.g, h.p, h.data("hq", random_tensor(3, 4, rng)),
                               h.data("hp", random_tensor(3, 1, rng)), h.data("hr", random_tensor(3, 1, rng)));
  const Tensor& a = h.run(alpha);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(a(0, j), 0.25);
}

TEST(MatchAttention, MatchesStraightLineOracle) {
  const ModelConfig c = small_config(2, 2, HeadKind::kBoundary);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const ModelParams params = random_params(c, rng, 1.0);
    Harness h(params);
    Tensor hq = random_tensor(2, 3, rng), hp = random_tensor(2, 1, rng), hr = random_tensor(2, 1, rng);
    auto alpha = match_attention(h.g, h.p, h.data("hq", hq), h.data("hp", hp), h.data("hr", hr));
    const Tensor& got = h.run(alpha);
    const auto want = ref::attention(params, ref::to_mat(hq), ref::to_vec(hp), ref::to_vec(hr));
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(got(0, j), want[j], 1e-12);
  }
}

TEST(MatchLstm, ShapesAndNormalization) {
  const ModelConfig c = small_config(4, 3, HeadKind::kBoundary);
  std::mt19937_64 rng(8);
  const ModelParams params = random_params(c, rng);
  Harness h(params);
  auto out = match_lstm_forward(h.g, h.p, c, h.data("hp", random_tensor(4, 7, rng)),
                                h.data("hq", random_tensor(4, 5, rng)));
  EXPECT_EQ(h.g.shape(out.hr), (Shape{8, 7}));
  EXPECT_EQ(h.g.shape(out.alpha_forward), (Shape{7, 5}));
  EXPECT_EQ(h.g.shape(out.alpha_backward), (Shape{7, 5}));
  h.g.forward(h.b);
  for (NodeId a : {out.alpha_forward, out.alpha_backward}) {
    const Tensor& t = h.g.value(a);
    for (std::size_t r = 0; r < t.rows(); ++r) {
      EXPECT_NEAR(row_sum(t, r), 1.0, 1e-6);
      for (std::size_t j = 0; j < t.cols(); ++j) {
        EXPECT_GE(t(r, j), 0.0);
        EXPECT_LE(t(r, j), 1.0);
      }
    }
  }
}

TEST(MatchLstm, SinglePositionDirectionsAgree) {
  const ModelConfig c = small_config(3, 3, HeadKind::kBoundary);
  std::mt19937_64 rng(9);
  const ModelParams params = random_params(c, rng);
  Harness h(params);
  auto out = match_lstm_forward(h.g, h.p, c, h.data("hp", random_tensor(3, 1, rng)),
                                h.data("hq", random_tensor(3, 4, rng)));
  h.g.forward(h.b);
  EXPECT_EQ(h.g.value(out.alpha_forward), h.g.value(out.alpha_backward));
}

TEST(MatchLstm, ReversingPassageSwapsDirections) {
  const ModelConfig c = small_config(2, 2, HeadKind::kBoundary);
  std::mt19937_64 rng(10);
  const ModelParams params = random_params(c, rng);
  ModelParams swapped = params;
  for (const auto& name : params.names()) {
    if (name.rfind("match_fwd.", 0) == 0) {
      const std::string suffix = name.substr(std::string("match_fwd.").size());
      swapped.at(name) = params.at("match_bwd." + suffix);
      swapped.at("match_bwd." + suffix) = params.at(name);
    }
  }
  const Tensor hp = random_tensor(2, 4, rng), hq = random_tensor(2, 3, rng);
  Tensor hp_rev(2, 4);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t i = 0; i < 4; ++i) hp_rev(r, i) = hp(r, 3 - i);

  Harness a(params), b(swapped);
  auto oa = match_lstm_forward(a.g, a.p, c, a.data("hp", hp), a.data("hq", hq));
  auto ob = match_lstm_forward(b.g, b.p, c, b.data("hp", hp_rev), b.data("hq", hq));
  const Tensor hr = a.run(oa.hr);
  const Tensor hr_rev = b.run(ob.hr);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t r = 0; r < 2; ++r) {
      EXPECT_NEAR(hr_rev(r, i), hr(2 + r, 3 - i), 1e-14);      // forward over reversed = backward
      EXPECT_NEAR(hr_rev(2 + r, i), hr(r, 3 - i), 1e-14);
    }
  }
}

TEST(MatchLstm, EmptyInputsRejected) {
  const ModelConfig c = small_config(2, 2, HeadKind::kBoundary);
  std::mt19937_64 rng(11);
  const ModelParams params = random_params(c, rng);
  Harness h(params);
  EXPECT_THROW(match_lstm_forward(h.g, h.p, c, h.data("hp", Tensor(2, 0)), h.data("hq", random_tensor(2, 3, rng))),
               std::invalid_argument);
}

TEST(SequencePointer, SinglePositionHasTwoOutcomes) {
  const ModelConfig c = small_config(2, 2, HeadKind::kSequence);
  std::mt19937_64 rng(12);
  const ModelParams params = random_params(c, rng);
  Harness h(params);
  auto betas = sequence_pointer_forward(h.g, h.p, c, h.data("hr", random_tensor(4, 1, rng)), 3);
  h.g.forward(h.b);
  for (NodeId b : betas) {
    ASSERT_EQ(h.g.shape(b), (Shape{1, 2}));
    EXPECT_NEAR(row_sum(h.g.value(b), 0), 1.0, 1e-12);
  }
}

TEST(SequencePointer, ZeroParametersGiveUniform) {
  const ModelConfig c = small_config(2, 2, HeadKind::kSequence);
  std::mt19937_64 rng(13);
  const ModelParams params = ModelParams::zeros(c);
  Harness h(params);
  auto betas = sequence_pointer_forward(h.g, h.p, c, h.data("hr", random_tensor(4, 5, rng)), 2);
  h.g.forward(h.b);
  for (NodeId b : betas)
    for (std::size_t j = 0; j < 6; ++j) EXPECT_DOUBLE_EQ(h.g.value(b)(0, j), 1.0 / 6.0);
}

TEST(SequencePointer, MatchesStraightLineOracle) {
  const ModelConfig c = small_config(2, 2, HeadKind::kSequence);
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const ModelParams params = random_params(c, rng, 1.0);
    Harness h(params);
    const Tensor hr = random_tensor(4, 3, rng);
    auto betas = sequence_pointer_forward(h.g, h.p, c, h.data("hr", hr), 2);
    h.g.forward(h.b);
    const auto want = ref::sequence_pointer(params, ref::to_mat(hr), 2);
    for (std::size_t k = 0; k < 2; ++k)
      for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(h.g.value(betas[k])(0, j), want[k][j], 1e-12);
  }
}

TEST(BoundaryPointer, SinglePosition) {
  const ModelConfig c = small_config(2, 2, HeadKind::kBoundary);
  std::mt19937_64 rng(15);
  const ModelParams params = random_params(c, rng);
  Harness h(params);
  auto out = boundary_pointer_forward(h.g, h.p, c, h.data("hr", random_tensor(4, 1, rng)));
  h.g.forward(h.b);
  EXPECT_EQ(h.g.value(out.start), Tensor::from_rows({{1.0}}));
  EXPECT_EQ(h.g.value(out.end), Tensor::from_rows({{1.0}}));
}

TEST(BoundaryPointer, ZeroParametersGiveUniform) {
  const ModelConfig c = small_config(2, 2, HeadKind::kBoundary);
  std::mt19937_64 rng(16);
  const ModelParams params = ModelParams::zeros(c);
  Harness h(params);
  auto out = boundary_pointer_forward(h.g, h.p, c, h.data("hr", random_tensor(4, 4, rng)));
  h.g.forward(h.b);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_DOUBLE_EQ(h.g.value(out.start)(0, j), 0.25);
    EXPECT_DOUBLE_EQ(h.g.value(out.end)(0, j), 0.25);
  }
}

TEST(BoundaryPointer, MatchesStraightLineOracle) {
  for (bool bi : {false, true}) {
    ModelConfig c = small_config(2, 2, HeadKind::kBoundary);
    c.bi_answer_pointer = bi;
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
      const ModelParams params = random_params(c, rng, 1.0);
      Harness h(params);
      const Tensor hr = random_tensor(4, 4, rng);
      auto out = boundary_pointer_forward(h.g, h.p, c, h.data("hr", hr));
      h.g.forward(h.b);
      const auto [ws, we] = ref::boundary_pointer(params, ref::to_mat(hr), bi);
      for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_NEAR(h.g.value(out.start)(0, j), ws[j], 1e-12);
        EXPECT_NEAR(h.g.value(out.end)(0, j), we[j], 1e-12);
      }
      EXPECT_NEAR(row_sum(h.g.value(out.start), 0), 1.0, 1e-12);
    }
  }
}

TEST(Losses, SequenceLossValues) {
  ad::Graph g;
  const auto one_hot = [&](std::size_t n, std::size_t at) {
    Tensor t(1, n);
    t(0, at) = 1.0;
    return g.constant(t);
  };
  auto certain = sequence_loss(g, {one_hot(4, 1), one_hot(4, 3)}, {1, 3});
  auto u1 = g.constant(Tensor(1, 4, 0.25)), u2 = g.constant(Tensor(1, 4, 0.25));
  auto uniform = sequence_loss(g, {u1, u2}, {2, 3});
  g.forward(ad::Bindings{});
  EXPECT_EQ(g.value(certain)(0, 0), 0.0);
  EXPECT_NEAR(g.value(uniform)(0, 0), 2 * std::log(4.0), 1e-15);
  EXPECT_THROW(sequence_loss(g, {u1, u2}, {2, 4}), std::out_of_range);
  EXPECT_THROW(sequence_loss(g, {u1}, {2, 3}), std::invalid_argument);
}

TEST(Losses, SequenceLossClampsZeroProbability) {
  ad::Graph g;
  auto zero = g.constant(Tensor::from_rows({{0.0, 1.0}}));
  auto loss = sequence_loss(g, {zero}, {0});
  g.forward(ad::Bindings{});
  EXPECT_NEAR(g.value(loss)(0, 0), -std::log(1e-12), 1e-9);
  EXPECT_TRUE(g.value(loss).all_finite());
}

TEST(Losses, BoundaryLossValues) {
  ad::Graph g;
  BoundaryOutput sure{g.constant(Tensor::from_rows({{0, 1, 0, 0}})), g.constant(Tensor::from_rows({{0, 0, 1, 0}}))};
  BoundaryOutput uni{g.constant(Tensor(1, 4, 0.25)), g.constant(Tensor(1, 4, 0.25))};
  BoundaryOutput skew{g.constant(Tensor::from_rows({{0.7, 0.1, 0.1, 0.1}})),
                      g.constant(Tensor::from_rows({{0.1, 0.1, 0.2, 0.6}}))};
  auto l0 = boundary_loss(g, sure, {1, 2});
  auto lu = boundary_loss(g, uni, {0, 3});
  auto a = boundary_loss(g, skew, {0, 3});
  auto b = boundary_loss(g, skew, {3, 0});
  g.forward(ad::Bindings{});
  EXPECT_EQ(g.value(l0)(0, 0), 0.0);
  EXPECT_NEAR(g.value(lu)(0, 0), 2 * std::log(4.0), 1e-15);
  EXPECT_NE(g.value(a)(0, 0), g.value(b)(0, 0));
  EXPECT_THROW(boundary_loss(g, uni, {0, 4}), std::out_of_range);
}

TEST(Losses, SequenceTargetForConsecutiveSpan) {
  EXPECT_EQ(sequence_target({2, 4}, 7), (std::vector<std::size_t>{2, 3, 4, 7}));
  EXPECT_EQ(sequence_target({0, 0}, 1), (std::vector<std::size_t>{0, 1}));
  EXPECT_THROW(sequence_target({3, 7}, 7), std::out_of_range);
}

TEST(Model, LossIsNonNegativeAndFinite) {
  for (auto head : {HeadKind::kBoundary, HeadKind::kSequence}) {
    const auto m = random_model(small_config(4, 3, head), 20, 21, 0.5);
    std::mt19937_64 rng(22);
    for (int t = 0; t < 5; ++t) {
      auto in = random_input(6, 4, 20, rng);
      const Real loss = m.loss(in, {1, 3});
      EXPECT_GE(loss, 0.0);
      EXPECT_TRUE(std::isfinite(loss));
    }
  }
}

namespace {

// Unit-scale weights keep most gradient entries well above the double
// precision noise floor of a central difference at eps = 1e-5 (about 1e-11).
void end_to_end_gradcheck(ModelConfig c, std::uint64_t seed) {
  const auto m = random_model(c, 30, seed, 1.0);
  std::mt19937_64 rng(seed + 1);
  auto in = random_input(7, 5, 30, rng);
  NetworkGraph net = m.build(in, data::TokenSpan{2, 4});
  const auto bindings = m.bindings();
  const auto report = ad::check_gradients(net.graph, bindings, *net.loss, 1e-5, 1e-4);
  for (const auto& p : report.parameters) {
    EXPECT_TRUE(p.passed) << p.name << " rel err " << p.max_relative_error;
    EXPECT_NE(p.name, kEmbeddingInput);
  }
  EXPECT_LT(report.max_relative_error, 1e-4);
}

}  // namespace

TEST(GradientCheck, BoundaryModelEndToEnd) {
  end_to_end_gradcheck(small_config(4, 4, HeadKind::kBoundary), 1);
}

TEST(GradientCheck, SequenceModelEndToEnd) {
  end_to_end_gradcheck(small_config(4, 4, HeadKind::kSequence), 1);
}

TEST(GradientCheck, VariantsEndToEnd) {
  ModelConfig c = small_config(3, 3, HeadKind::kBoundary);
  c.bi_preprocess = true;
  c.bi_answer_pointer = true;
  c.shared_preprocess = false;
  end_to_end_gradcheck(c, 1);
}

// Across many random instances, with an absolute allowance for the rounding
// noise of the loss itself so entries that are structurally zero still count.
TEST(GradientCheck, ManyInstancesWithinNoiseFloor) {
  for (auto head : {HeadKind::kBoundary, HeadKind::kSequence}) {
    for (std::uint64_t seed = 100; seed < 108; ++seed) {
      const auto m = random_model(small_config(4, 4, head), 30, seed, 1.0);
      std::mt19937_64 rng(seed);
      auto in = random_input(7, 5, 30, rng);
      NetworkGraph net = m.build(in, data::TokenSpan{1, 3});
      auto bindings = m.bindings();
      net.graph.forward(bindings);
      const ad::Gradients grads = net.graph.backward(*net.loss);
      for (const auto& [name, g] : grads) {
        ad::Bindings perturbed = bindings;
        const auto f = [&](const Tensor& x) {
          perturbed.bind(name, x);
          net.graph.forward(perturbed);
          return net.graph.value(*net.loss)(0, 0);
        };
        const Tensor numeric = mlstm::testing::numeric_gradient(f, m.params().at(name), 1e-5);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const Real n = numeric[i];
          const Real bound = 1e-4 * std::max(std::abs(g[i]), std::abs(n)) + 1e-9;
          ASSERT_LE(std::abs(g[i] - n), bound) << name << "[" << i << "] seed " << seed;
        }
      }
    }
  }
}

TEST(ParameterSharing, AttentionMatrixDrivesBothDirections) {
  const ModelConfig c = small_config(3, 3, HeadKind::kBoundary);
  auto m = random_model(c, 20, 41, 0.5);
  std::mt19937_64 rng(42);
  auto in = random_input(5, 4, 20, rng);
  const AttentionMaps base = m.attention(in);
  m.params().at("att.Wq")(0, 1) += 1e-3;
  const AttentionMaps moved = m.attention(in);
  double df = 0, db = 0;
  for (std::size_t i = 0; i < base.forward.size(); ++i) {
    df = std::max(df, std::abs(moved.forward[i] - base.forward[i]));
    db = std::max(db, std::abs(moved.backward[i] - base.backward[i]));
  }
  EXPECT_GT(df, 1e-8);
  EXPECT_GT(db, 1e-8);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  ModelConfig c = small_config(3, 4, HeadKind::kBoundary);
  c.bi_answer_pointer = true;
  const auto m = random_model(c, 15, 51, 0.5);
  const auto path = std::filesystem::temp_directory_path() / "mlstm_ckpt_test.bin";
  save_checkpoint(m, path);
  const Model back = load_checkpoint(path);
  EXPECT_EQ(back.config(), m.config());
  EXPECT_TRUE(back.params() == m.params());
  EXPECT_EQ(back.embedding(), m.embedding());
  EXPECT_EQ(back.vocab().tokens(), m.vocab().tokens());
}

TEST(Checkpoint, RejectsCorruptFiles) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto m = random_model(small_config(2, 2, HeadKind::kSequence), 10, 52, 0.5);
  const auto good = dir / "mlstm_ckpt_good.bin";
  save_checkpoint(m, good);

  std::ifstream in(good, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  const auto bad_magic = dir / "mlstm_ckpt_magic.bin";
  std::string b1 = bytes;
  b1[0] = 'X';
  std::ofstream(bad_magic, std::ios::binary) << b1;
  EXPECT_THROW(load_checkpoint(bad_magic), CheckpointError);

  const auto truncated = dir / "mlstm_ckpt_trunc.bin";
  std::ofstream(truncated, std::ios::binary) << bytes.substr(0, bytes.size() - 9);
  EXPECT_THROW(load_checkpoint(truncated), CheckpointError);

  // Change the stored hidden size so the recorded shapes no longer fit.
  const auto reshaped = dir / "mlstm_ckpt_shape.bin";
  std::string b3 = bytes;
  const auto pos = b3.find("\"hidden_dim\":2");
  ASSERT_NE(pos, std::string::npos);
  b3[pos + 13] = '3';
  std::ofstream(reshaped, std::ios::binary) << b3;
  EXPECT_THROW(load_checkpoint(reshaped), CheckpointError);
}
