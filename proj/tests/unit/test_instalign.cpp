#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "tploc/diffcore/gradcheck.hpp"
#include "tploc/errors.hpp"
#include "tploc/instalign/aggregation.hpp"
#include "tploc/instalign/beose.hpp"
#include "tploc/instalign/edges.hpp"
#include "tploc/instalign/instance_loss.hpp"

using namespace tploc;
using namespace tploc::instalign;

namespace {

Tensor random_matrix(std::size_t r, std::size_t c, Rng& rng, double lo = -2, double hi = 2, bool grad = false) {
  std::vector<double> v(r * c);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return Tensor(Shape{r, c}, std::move(v), grad);
}

double cos_oracle(std::span<const double> a, std::span<const double> b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

// Independent nested-loop evaluation of the mean-of-max set similarity.
double set_sim_oracle(const Tensor& x, const Tensor& y) {
  std::size_t d = x.dim(1);
  double total = 0;
  for (std::size_t i = 0; i < x.dim(0); ++i) {
    double best = -2;
    for (std::size_t j = 0; j < y.dim(0); ++j)
      best = std::max(best, cos_oracle(x.values().subspan(i * d, d), y.values().subspan(j * d, d)));
    total += best;
  }
  return total / static_cast<double>(x.dim(0));
}

}  // namespace

// ---- offsets ----

TEST(Offsets, DefinitionExample) {
  auto o = build_offset_tensor(std::vector<scene::Vec3>{{0, 0, 0}, {3, 4, 0}});
  ASSERT_EQ(o.shape(), (Shape{2, 2, 3}));
  // O[2][1] in one-based terms is row (1, 0).
  EXPECT_EQ(o[(1 * 2 + 0) * 3 + 0], 3);
  EXPECT_EQ(o[(1 * 2 + 0) * 3 + 1], 4);
  EXPECT_EQ(o[(0 * 2 + 1) * 3 + 0], -3);
  EXPECT_EQ(o[(0 * 2 + 1) * 3 + 1], -4);
}

TEST(Offsets, AntisymmetricWithZeroDiagonal) {
  Rng rng(9);
  std::vector<scene::Vec3> c(5);
  for (auto& p : c) p = {rng.uniform(-15, 15), rng.uniform(-15, 15), rng.uniform(0, 4)};
  auto o = build_offset_tensor(c);
  for (std::size_t m = 0; m < 5; ++m)
    for (std::size_t n = 0; n < 5; ++n)
      for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(o[(m * 5 + n) * 3 + k], -o[(n * 5 + m) * 3 + k]);
        if (m == n) EXPECT_EQ(o[(m * 5 + n) * 3 + k], 0.0);
      }
}

TEST(Offsets, SingleInstanceRejected) {
  EXPECT_THROW(build_offset_tensor(std::vector<scene::Vec3>{{1, 2, 3}}), TooFewInstancesError);
}

// ---- edge fusion ----

struct EdgeFixture {
  ParameterStore store;
  Rng rng{13};
  EdgeFusion fusion = EdgeFusion::create(store, "edge", 4, 6, rng);
};

TEST(EdgeFusion, ZeroFinalWeightsGiveBias) {
  EdgeFixture f;
  std::vector<double> bias = {0.1, -0.2, 0.3, 0.4, -0.5, 0.6};
  f.store.assign("edge.point_fuse.output.weight", std::vector<double>(6 * 6, 0.0));
  f.store.assign("edge.point_fuse.output.bias", bias);
  Rng rng(2);
  auto v = random_matrix(3, 4, rng);
  auto o = build_offset_tensor(std::vector<scene::Vec3>{{0, 0, 0}, {3, 4, 0}, {-5, 1, 2}});
  auto e = f.fusion.fuse_points(v, o);
  for (std::size_t m = 0; m < 3; ++m)
    for (std::size_t n = 0; n < 3; ++n) EXPECT_EQ(e.edge(m, n), bias);
}

TEST(EdgeFusion, DirectedEdgesDiffer) {
  EdgeFixture f;
  Rng rng(2);
  auto v = random_matrix(3, 4, rng);
  auto o = build_offset_tensor(std::vector<scene::Vec3>{{0, 0, 0}, {3, 4, 0}, {-5, 1, 2}});
  auto e = f.fusion.fuse_points(v, o);
  EXPECT_EQ(e.nodes, 3u);
  EXPECT_NE(e.edge(0, 1), e.edge(1, 0));
  auto t = f.fusion.fuse_text(random_matrix(2, 4, rng));
  EXPECT_EQ(t.modality, Modality::kText);
  EXPECT_NE(t.edge(0, 1), t.edge(1, 0));
}

TEST(EdgeFusion, GradientWithRespectToOffsets) {
  EdgeFixture f;
  Rng rng(4);
  auto v = random_matrix(3, 4, rng);
  std::vector<double> ov(27);
  for (auto& x : ov) x = rng.uniform(-20, 20);
  Tensor o(Shape{3, 3, 3}, ov, true);
  auto w = random_matrix(9, 6, rng);
  auto report = grad_check([&] { return sum(f.fusion.fuse_points(v, o).edges * w); }, {{"offsets", o}});
  EXPECT_TRUE(report.passed()) << report.table();
}

// ---- BEOSE ----

TEST(Bezier, Endpoints) {
  Rng rng(1);
  auto p0 = random_matrix(4, 5, rng), p1 = random_matrix(4, 5, rng), p2 = random_matrix(4, 5, rng);
  auto at0 = bezier(p0, p1, p2, Tensor::vector({0.0}));
  auto at1 = bezier(p0, p1, p2, Tensor::vector({1.0}));
  for (std::size_t i = 0; i < p0.numel(); ++i) {
    EXPECT_NEAR(at0[i], p0[i], 1e-12);
    EXPECT_NEAR(at1[i], p2[i], 1e-12);
  }
}

TEST(Bezier, MidpointExample) {
  auto v = bezier(Tensor::vector({0.2}), Tensor::vector({1.0}), Tensor::vector({-0.4}), Tensor::vector({0.5}));
  EXPECT_NEAR(v.item(), 0.45, 1e-15);
}

TEST(Beose, ZeroIterationsRejected) {
  ParameterStore store;
  Rng rng(1);
  EXPECT_THROW(Beose::create(store, "b", 4, 0, rng), ConfigError);
}

TEST(Beose, OutputStrictlyBoundedForHugeInputs) {
  ParameterStore store;
  Rng rng(3);
  auto beose = Beose::create(store, "b", 8, 2, rng);
  for (double s : {1.0, 10.0, 100.0, 1000.0}) {
    Rng in(7);
    auto x = scale(random_matrix(16, 8, in), s);
    auto y = beose({x, 4, Modality::kPoint}).edges;
    for (double v : y.values()) {
      EXPECT_GT(v, -1.0);
      EXPECT_LT(v, 1.0);
    }
  }
}

TEST(Beose, SignFollowsStartPointWhenTauNearZero) {
  ParameterStore store;
  Rng rng(3);
  auto layer = BeoseLayer::create(store, "b", 6, rng);
  store.assign("b.tau_logit", {-60.0});
  Rng in(8);
  auto t = layer.trace(random_matrix(9, 6, in));
  for (std::size_t i = 0; i < t.p0.numel(); ++i) {
    if (std::fabs(t.p0[i]) < 1e-9) continue;
    EXPECT_EQ(std::signbit(t.output[i]), std::signbit(t.p0[i]));
  }
  // Exact endpoint through the layer's own curve with tau = 0 and 1.
  auto c0 = tanh(bezier(t.p0, t.p1, t.p2, Tensor::vector({0.0})));
  auto c1 = bezier(t.p0, t.p1, t.p2, Tensor::vector({1.0}));
  for (std::size_t i = 0; i < t.p0.numel(); ++i) {
    EXPECT_EQ(std::signbit(c0[i]), std::signbit(t.p0[i]));
    EXPECT_NEAR(c1[i], t.p2[i], 1e-12);
  }
}

TEST(Beose, TauStaysInUnitInterval) {
  ParameterStore store;
  Rng rng(3);
  auto layer = BeoseLayer::create(store, "b", 4, rng);
  for (double logit : {-800.0, -5.0, 0.0, 5.0, 30.0}) {
    store.assign("b.tau_logit", {logit});
    double tau = layer.trace(Tensor::zeros(Shape{1, 4})).tau.item();
    EXPECT_GE(tau, 0.0);
    EXPECT_LE(tau, 1.0);
  }
}

TEST(Beose, GradientMatchesFiniteDifferences) {
  ParameterStore store;
  Rng rng(5);
  auto beose = Beose::create(store, "b", 4, 2, rng);
  Rng in(6);
  auto x = random_matrix(4, 4, in, -2, 2, true);
  auto w = random_matrix(4, 4, in);
  auto f = [&] { return sum(beose({x, 2, Modality::kPoint}).edges * w); };
  auto report = grad_check(f, store);
  EXPECT_TRUE(report.passed()) << report.table();
  auto rx = grad_check(f, {{"edges", x}});
  EXPECT_TRUE(rx.passed()) << rx.table();
}

// ---- Gaussian aggregation ----

TEST(Aggregation, ReparameterizeExample) {
  auto z = reparameterize(Tensor::vector({1.0}), Tensor::vector({std::log(4.0)}), Tensor::vector({1.0}));
  EXPECT_NEAR(z.item(), 3.0, 1e-15);
}

TEST(Aggregation, ZeroNoiseGivesMeanExactly) {
  ParameterStore store;
  Rng rng(2);
  auto ga = GaussianAggregator::create(store, "ga", 5, rng);
  Rng in(3);
  EdgeGraph g{tanh(random_matrix(9, 5, in)), 3, Modality::kPoint};
  auto noise = NoiseSource::zero();
  auto a = ga(g, noise);
  auto b = ga(g, noise);
  for (std::size_t i = 0; i < a.latent.numel(); ++i) EXPECT_EQ(a.latent[i], a.mean[i]);
  for (std::size_t i = 0; i < a.descriptors.numel(); ++i) EXPECT_EQ(a.descriptors[i], b.descriptors[i]);
  EXPECT_EQ(a.descriptors.shape(), (Shape{3, 5}));
}

TEST(Aggregation, LiteralSingletonIsAllTwo) {
  ParameterStore store;
  Rng rng(2);
  auto ga = GaussianAggregator::create(store, "ga", 4, rng);
  auto noise = NoiseSource::seeded(1);
  EdgeGraph g{Tensor::matrix(1, 4, {0.3, -0.2, 0.9, 0.0}), 1, Modality::kText};
  auto lit = ga(g, noise, AggregationMode::kLiteral);
  for (double v : lit.descriptors.values()) EXPECT_NEAR(v, 2.0, 1e-15);
  // The literal sum is 2 for any node count; the weighted default is not.
  Rng in(4);
  EdgeGraph big{tanh(random_matrix(16, 4, in)), 4, Modality::kPoint};
  auto big_lit = ga(big, noise, AggregationMode::kLiteral);
  for (double v : big_lit.descriptors.values()) EXPECT_NEAR(v, 2.0, 1e-12);
  auto w = ga(g, noise, AggregationMode::kWeighted);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(w.descriptors[c], w.latent[c] + g.edges[c], 1e-15);
}

TEST(Aggregation, MaxPoolReplacement) {
  EdgeGraph g{Tensor::matrix(4, 2, {1, 5, 3, -1, 0, 0, -2, 7}), 2, Modality::kPoint};
  auto m = max_pool_edges(g);
  EXPECT_EQ(std::vector<double>(m.values().begin(), m.values().end()), (std::vector<double>{3, 5, 0, 7}));
}

TEST(Aggregation, EmpiricalLatentMeanMatches) {
  const std::size_t draws = 100000;
  std::vector<double> mu = {0.5, -1.0, 2.0, 0.0};
  std::vector<double> lv = {0.0, std::log(4.0), -1.0, 1.0};
  auto noise = NoiseSource::seeded(2024);
  auto z = reparameterize(Tensor::vector(mu), Tensor::vector(lv), noise.draw(Shape{draws, 4}));
  for (std::size_t c = 0; c < 4; ++c) {
    double m = 0;
    for (std::size_t i = 0; i < draws; ++i) m += z[i * 4 + c];
    m /= draws;
    double sigma = std::exp(0.5 * lv[c]);
    EXPECT_LE(std::fabs(m - mu[c]), 4 * sigma / std::sqrt(double(draws)));
  }
}

TEST(Aggregation, GradientWithFrozenNoise) {
  ParameterStore store;
  Rng rng(2);
  auto ga = GaussianAggregator::create(store, "ga", 3, rng);
  Rng in(3);
  auto e = random_matrix(9, 3, in, -0.9, 0.9, true);
  auto w = random_matrix(3, 3, in);
  auto noise = NoiseSource::seeded(5);
  noise.set_recording(true);
  noise.draw(Shape{9, 3});
  noise.freeze();
  auto f = [&] {
    noise.rewind();
    return sum(ga({e, 3, Modality::kPoint}, noise).descriptors * w);
  };
  auto report = grad_check(f, store);
  EXPECT_TRUE(report.passed()) << report.table();
  auto re = grad_check(f, {{"edges", e}});
  EXPECT_TRUE(re.passed()) << re.table();
}

// ---- set similarity and alignment ----

TEST(SetSimilarity, MatchesNestedLoopOracle) {
  Rng rng(21);
  std::vector<Tensor> xs = {random_matrix(3, 5, rng), random_matrix(2, 5, rng), random_matrix(4, 5, rng)};
  std::vector<Tensor> ys = {random_matrix(2, 5, rng), random_matrix(5, 5, rng), random_matrix(1, 5, rng)};
  auto s = set_similarity(xs, ys);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_NEAR(s.x2y.at(i, j), set_sim_oracle(xs[i], ys[j]), 1e-12);
      EXPECT_NEAR(s.y2x.at(i, j), set_sim_oracle(ys[i], xs[j]), 1e-12);
    }
}

TEST(SetSimilarity, SingletonBatchProbabilityIsOne) {
  Rng rng(1);
  auto s = set_similarity({random_matrix(3, 4, rng)}, {random_matrix(2, 4, rng)});
  EXPECT_DOUBLE_EQ(candidate_probabilities(s.x2y, 0.1).item(), 1.0);
  EXPECT_DOUBLE_EQ(candidate_probabilities(s.y2x, 0.1).item(), 1.0);
}

TEST(SetSimilarity, TwoByTwoExample) {
  auto p = candidate_probabilities(Tensor::matrix(2, 2, {1, 0, 0, 1}), 1.0);
  double e = std::exp(1.0);
  EXPECT_NEAR(p.at(0, 0), e / (e + 1), 1e-15);
  EXPECT_NEAR(p.at(1, 1), e / (e + 1), 1e-15);
}

TEST(SetSimilarity, DiagonalDominatesAsTemperatureShrinks) {
  // Matched sets identical, unmatched sets orthogonal.
  std::vector<Tensor> xs = {Tensor::matrix(1, 3, {1, 0, 0}), Tensor::matrix(1, 3, {0, 1, 0}),
                            Tensor::matrix(1, 3, {0, 0, 1})};
  auto s = set_similarity(xs, xs);
  double prev = 0;
  for (double gamma : {1.0, 0.1, 0.01}) {
    double p = candidate_probabilities(s.x2y, gamma).at(1, 1);
    EXPECT_GT(p, prev);
    prev = p;
  }
  EXPECT_GT(prev, 1 - 1e-12);
}

TEST(SetSimilarity, Errors) {
  Rng rng(1);
  EXPECT_THROW(set_similarity({random_matrix(2, 3, rng)}, {Tensor::zeros(Shape{0, 3})}), ContractViolation);
  EXPECT_THROW(set_similarity({random_matrix(2, 3, rng)}, {}), ContractViolation);
  EXPECT_THROW(candidate_probabilities(Tensor::matrix(1, 1, {0}), 0.0), ConfigError);
  EXPECT_THROW(alignment_loss({random_matrix(2, 3, rng)}, {random_matrix(2, 3, rng)}, -1.0), ConfigError);
}

TEST(AlignmentLoss, CorrectedSingletonIsZero) {
  Rng rng(1);
  auto loss = alignment_loss({random_matrix(3, 4, rng)}, {random_matrix(2, 4, rng)}, 0.1);
  EXPECT_EQ(loss.item(), 0.0);
}

TEST(AlignmentLoss, IdenticalEmbeddingsGiveTwoLogTwo) {
  auto e = Tensor::matrix(1, 3, {0.3, -0.1, 0.8});
  auto loss = alignment_loss({e, e}, {e, e}, 0.1);
  EXPECT_NEAR(loss.item(), 2 * std::log(2.0), 1e-12);
}

TEST(AlignmentLoss, LiteralSingletonHitsClamp) {
  Rng rng(1);
  auto x = random_matrix(3, 4, rng), y = random_matrix(2, 4, rng, -2, 2, true);
  auto lit = alignment_loss({x}, {y}, 0.1, AlignMode::kLiteral);
  EXPECT_NEAR(lit.item(), -std::log(kLiteralClamp), 1e-9);
  EXPECT_TRUE(std::isfinite(lit.item()));
  run_backward(lit);
  for (double g : y.grad()) EXPECT_TRUE(std::isfinite(g));
  EXPECT_EQ(alignment_loss({x}, {y}, 0.1, AlignMode::kCorrected).item(), 0.0);
}

TEST(AlignmentLoss, DecreasesAsDiagonalSimilarityRises) {
  double prev = INFINITY;
  for (double diag : {0.0, 0.2, 0.5, 0.9}) {
    SetSimilarity s{Tensor::matrix(2, 2, {diag, 0.1, 0.3, diag}), Tensor::matrix(2, 2, {diag, 0.2, -0.1, diag})};
    double loss = contrastive_loss(s, 0.5).item();
    EXPECT_LT(loss, prev);
    prev = loss;
  }
}

TEST(InstanceLosses, NonNegativeZeroAtSingletonAndGradientChecked) {
  ParameterStore store;
  Rng rng(7);
  auto proj = RawProjection::create(store, "io", 4, 3, rng);
  Rng in(8);
  std::vector<Tensor> vd = {random_matrix(3, 3, in), random_matrix(4, 3, in)};
  std::vector<Tensor> td = {random_matrix(2, 3, in), random_matrix(2, 3, in)};
  std::vector<Tensor> vr = {random_matrix(3, 4, in), random_matrix(4, 4, in)};
  std::vector<Tensor> tr = {random_matrix(2, 4, in), random_matrix(2, 4, in)};
  auto l = instance_losses(vd, td, vr, tr, proj, 0.5);
  EXPECT_GE(l.spatial.item(), 0.0);
  EXPECT_GE(l.object.item(), 0.0);
  auto one = instance_losses({vd[0]}, {td[0]}, {vr[0]}, {tr[0]}, proj, 0.5);
  EXPECT_EQ(one.spatial.item(), 0.0);
  EXPECT_EQ(one.object.item(), 0.0);
  GradCheckOptions opts;
  opts.tolerance = 1e-3;
  auto report = grad_check([&] { return instance_losses(vd, td, vr, tr, proj, 0.5).object; }, store, opts);
  EXPECT_TRUE(report.passed()) << report.table();
}
