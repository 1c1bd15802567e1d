#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "tploc/diffcore/gradcheck.hpp"
#include "tploc/diffcore/nn.hpp"
#include "tploc/diffcore/noise.hpp"
#include "tploc/diffcore/ops.hpp"
#include "tploc/diffcore/optim.hpp"
#include "tploc/diffcore/spectral.hpp"
#include "tploc/errors.hpp"

namespace tploc {
namespace {

// Independent O(T^2) oracle using std::complex, one column.
std::vector<std::complex<double>> direct_dft(const std::vector<double>& x) {
  std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      double angle = -2.0 * std::numbers::pi * static_cast<double>(m * t) / static_cast<double>(n);
      acc += x[t] * std::polar(1.0, angle);
    }
    out[m] = acc;
  }
  return out;
}

Tensor random_tensor(const Shape& shape, Rng& rng, double lo = -2.0, double hi = 2.0) {
  std::vector<double> v(shape_numel(shape));
  for (auto& x : v) x = rng.uniform(lo, hi);
  return Tensor(shape, std::move(v), true);
}

TEST(Backward, SquareAtThree) {
  Tensor x = Tensor::scalar(3.0, true);
  run_backward(mul(x, x));
  EXPECT_DOUBLE_EQ(x.grad()[0], 6.0);
}

TEST(Backward, TanhAtZero) {
  Tensor x = Tensor::scalar(0.0, true);
  run_backward(tanh(x));
  EXPECT_DOUBLE_EQ(x.grad()[0], 1.0);
}

TEST(Backward, TwoWaySoftmaxAtSymmetry) {
  // d softmax_0 / d a = p0 (1 - p0) = 0.25 at a == b.
  Tensor ab = Tensor::vector({0.7, 0.7}, true);
  run_backward(slice(softmax(ab, 0), 0, 0, 1));
  EXPECT_NEAR(ab.grad()[0], 0.25, 1e-15);
  EXPECT_NEAR(ab.grad()[1], -0.25, 1e-15);
}

TEST(Backward, NonScalarLossIsContractViolation) {
  Tensor x = Tensor::vector({1.0, 2.0}, true);
  EXPECT_THROW(run_backward(mul(x, x)), ContractViolation);
}

TEST(Backward, NonFiniteValuesAreNumericErrors) {
  Tensor x = Tensor::scalar(-1.0, true);
  EXPECT_THROW(log(x), NumericError);
  Tensor nan_leaf(Shape{}, {std::nan("")}, true);
  EXPECT_THROW(run_backward(nan_leaf), NumericError);
}

TEST(Backward, UnreachableParametersGetZeroGradient) {
  ParameterStore store;
  Rng rng(1);
  Tensor used = store.add("used", Shape{2}, Init::kXavier, rng);
  store.add("unused", Shape{3}, Init::kXavier, rng);
  auto grads = backward(sum(square(used)), store);
  ASSERT_EQ(grads.size(), 2u);
  for (double g : grads.at("unused")) EXPECT_EQ(g, 0.0);
  EXPECT_DOUBLE_EQ(grads.at("used")[0], 2.0 * used[0]);
}

TEST(Dft, ConstantSignalIsPureDc) {
  auto z = dft(Tensor::vector({1, 1, 1, 1}));
  std::vector<double> re(z.real.values().begin(), z.real.values().end());
  EXPECT_NEAR(re[0], 4.0, 1e-12);
  for (int m = 1; m < 4; ++m) EXPECT_NEAR(re[m], 0.0, 1e-12);
  for (double v : z.imag.values()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Dft, ImpulseHasFlatSpectrum) {
  auto z = dft(Tensor::vector({1, 0, 0, 0}));
  for (double v : z.real.values()) EXPECT_NEAR(v, 1.0, 1e-12);
  for (double v : z.imag.values()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Dft, HandSummedExample) {
  // [0,1,0,-1] -> [0, -2j, 0, 2j]
  auto z = dft(Tensor::vector({0, 1, 0, -1}));
  const double re[4] = {0, 0, 0, 0};
  const double im[4] = {0, -2, 0, 2};
  for (int m = 0; m < 4; ++m) {
    EXPECT_NEAR(z.real[m], re[m], 1e-12);
    EXPECT_NEAR(z.imag[m], im[m], 1e-12);
  }
}

TEST(Dft, EmptyInputRejected) {
  EXPECT_THROW(dft(Tensor::zeros(Shape{0})), EmptyInputError);
}

TEST(Idft, RoundTrip) {
  Tensor x = Tensor::vector({0.3, -1.2, 7.0});
  Tensor back = idft(dft(x));
  for (int t = 0; t < 3; ++t) EXPECT_NEAR(back[t], x[t], 1e-9);
}

TEST(Idft, DcOnlySpectrum) {
  Tensor back = idft({Tensor::vector({4, 0, 0, 0}), Tensor::vector({0, 0, 0, 0})});
  for (int t = 0; t < 4; ++t) EXPECT_NEAR(back[t], 1.0, 1e-12);
}

TEST(Idft, InvertsHandExample) {
  Tensor back = idft({Tensor::vector({0, 0, 0, 0}), Tensor::vector({0, -2, 0, 2})});
  const double expect[4] = {0, 1, 0, -1};
  for (int t = 0; t < 4; ++t) EXPECT_NEAR(back[t], expect[t], 1e-12);
}

TEST(Idft, MismatchedPartsRejected) {
  EXPECT_THROW(idft({Tensor::vector({1, 2, 3}), Tensor::vector({1, 2})}), ContractViolation);
}

TEST(Dft, MatchesDirectSummationAndParsevalUpTo64) {
  Rng rng(7);
  for (std::size_t n = 1; n <= 64; ++n) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform(-2.0, 2.0);
    auto z = dft(Tensor::vector(x));
    auto oracle = direct_dft(x);
    double energy_time = 0.0, energy_freq = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      ASSERT_NEAR(z.real[m], oracle[m].real(), 1e-9) << "T=" << n;
      ASSERT_NEAR(z.imag[m], oracle[m].imag(), 1e-9) << "T=" << n;
      energy_time += x[m] * x[m];
      energy_freq += z.real[m] * z.real[m] + z.imag[m] * z.imag[m];
    }
    EXPECT_NEAR(energy_time, energy_freq / static_cast<double>(n), 1e-9) << "T=" << n;
    Tensor back = idft(z);
    for (std::size_t t = 0; t < n; ++t) ASSERT_NEAR(back[t], x[t], 1e-9);
  }
}

TEST(Dft, ColumnsTransformIndependently) {
  Tensor x = Tensor::matrix(3, 2, {1, 5, 2, 6, 3, 7});
  auto z = dft(x);
  auto c0 = direct_dft({1, 2, 3});
  auto c1 = direct_dft({5, 6, 7});
  for (std::size_t m = 0; m < 3; ++m) {
    EXPECT_NEAR(z.real.at(m, 0), c0[m].real(), 1e-12);
    EXPECT_NEAR(z.imag.at(m, 1), c1[m].imag(), 1e-12);
  }
}

TEST(Attention, IdenticalKeysAverageValues) {
  Tensor q = Tensor::matrix(2, 2, {1, 2, -3, 0.5});
  Tensor k = Tensor::matrix(3, 2, {0.4, 0.1, 0.4, 0.1, 0.4, 0.1});
  Tensor v = Tensor::matrix(3, 2, {1, 2, 3, 4, 5, 9});
  Tensor out = attention(q, k, v);
  for (std::size_t r = 0; r < 2; ++r) {
    EXPECT_NEAR(out.at(r, 0), 3.0, 1e-12);
    EXPECT_NEAR(out.at(r, 1), 5.0, 1e-12);
  }
}

TEST(Attention, SingleKeyReturnsItsValue) {
  Tensor out = attention(Tensor::matrix(1, 2, {3, -1}), Tensor::matrix(1, 2, {0.2, 9}),
                         Tensor::matrix(1, 3, {7, 8, 9}));
  EXPECT_DOUBLE_EQ(out.at(0, 0), 7.0);
  EXPECT_DOUBLE_EQ(out.at(0, 2), 9.0);
}

TEST(Attention, TwoKeysWithLogitsZeroAndLn3) {
  // d = 1, so the logits are q k^T directly.
  Tensor w = attention_weights(Tensor::matrix(1, 1, {1.0}),
                               Tensor::matrix(2, 1, {0.0, std::log(3.0)}));
  EXPECT_NEAR(w.at(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(w.at(0, 1), 0.75, 1e-15);
}

TEST(Attention, DimensionMismatchRejected) {
  EXPECT_THROW(attention(Tensor::zeros(Shape{2, 3}), Tensor::zeros(Shape{2, 4}),
                         Tensor::zeros(Shape{2, 4})),
               ContractViolation);
}

TEST(GatedRecurrentStep, ZeroParametersGiveZeroHidden) {
  ParameterStore store;
  Rng rng(3);
  LstmCell cell = LstmCell::create(store, "cell", 4, 3, rng);
  for (auto& [name, _] : store.entries()) {
    store.assign(name, std::vector<double>(store.get(name).numel(), 0.0));
  }
  Tensor h = gated_recurrent_step(Tensor::matrix(1, 4, {1, -2, 3, 0.5}), Tensor::zeros(Shape{1, 3}),
                                  cell);
  for (double v : h.values()) EXPECT_EQ(v, 0.0);
}

TEST(GatedRecurrentStep, DeterministicAndBounded) {
  ParameterStore store;
  Rng rng(3);
  LstmCell cell = LstmCell::create(store, "cell", 4, 3, rng);
  Tensor x = Tensor::matrix(2, 4, {10, -20, 30, 5, 1, 1, 1, 1});
  Tensor h0 = Tensor::matrix(2, 3, {0.1, 0.2, 0.3, -0.1, 0, 0});
  Tensor a = gated_recurrent_step(x, h0, cell);
  Tensor b = gated_recurrent_step(x, h0, cell);
  for (std::size_t i = 0; i < a.numel(); ++i) {
    EXPECT_EQ(a[i], b[i]);
    EXPECT_LT(std::fabs(a[i]), 1.0);
  }
}

TEST(GatedRecurrentStep, InputGradientMatchesFiniteDifferences) {
  ParameterStore store;
  Rng rng(11);
  LstmCell cell = LstmCell::create(store, "cell", 4, 3, rng);
  Tensor x = random_tensor(Shape{2, 4}, rng);
  Tensor h = random_tensor(Shape{2, 3}, rng, -0.5, 0.5);
  Tensor w = random_tensor(Shape{2, 3}, rng);
  auto report = grad_check([&] { return sum(mul(w, gated_recurrent_step(x, h, cell))); },
                           {{"x", x}, {"h", h}}, {.step = 1e-6, .tolerance = 1e-5});
  EXPECT_TRUE(report.passed()) << report.table();
}

TEST(GatedRecurrentStep, ShapeMismatchRejected) {
  ParameterStore store;
  Rng rng(3);
  LstmCell cell = LstmCell::create(store, "cell", 4, 3, rng);
  EXPECT_THROW(gated_recurrent_step(Tensor::zeros(Shape{1, 5}), Tensor::zeros(Shape{1, 3}), cell),
               ContractViolation);
}

TEST(GradCheck, SumOfSquaresIsExact) {
  Rng rng(5);
  Tensor x = random_tensor(Shape{3, 4}, rng);
  auto report = grad_check([&] { return sum(square(x)); }, {{"x", x}});
  // Central differences are exact for quadratics up to rounding.
  EXPECT_LT(report.worst_rel_error(), 1e-9) << report.table();
}

// Every primitive op against central differences on random inputs in [-2, 2].
TEST(GradCheck, EveryPrimitiveOp) {
  Rng rng(2024);
  const GradCheckOptions opts{.step = 1e-6, .tolerance = 1e-5};
  struct Case {
    const char* name;
    std::function<Tensor(const Tensor&, const Tensor&)> f;
    Shape sa, sb;
    double lo = -2.0;
  };
  std::vector<Case> cases = {
      {"add", [](auto& a, auto& b) { return add(a, b); }, {3, 4}, {4}},
      {"sub", [](auto& a, auto& b) { return sub(a, b); }, {3, 4}, {3, 1}},
      {"mul", [](auto& a, auto& b) { return mul(a, b); }, {2, 3, 4}, {3, 4}},
      {"div", [](auto& a, auto& b) { return div(a, add_scalar(square(b), 0.5)); }, {3, 4}, {3, 4}},
      {"scale", [](auto& a, auto&) { return scale(a, -1.7); }, {5}, {1}},
      {"tanh", [](auto& a, auto&) { return tanh(a); }, {3, 4}, {1}},
      {"sigmoid", [](auto& a, auto&) { return sigmoid(a); }, {3, 4}, {1}},
      {"exp", [](auto& a, auto&) { return exp(a); }, {3, 4}, {1}},
      {"log", [](auto& a, auto&) { return log(a); }, {3, 4}, {1}, 0.1},
      {"softplus", [](auto& a, auto&) { return softplus(a); }, {3, 4}, {1}},
      {"relu", [](auto& a, auto&) { return relu(a); }, {3, 4}, {1}},
      {"abs", [](auto& a, auto&) { return abs(a); }, {3, 4}, {1}},
      {"sqrt", [](auto& a, auto&) { return sqrt(a); }, {3, 4}, {1}, 0.1},
      {"reciprocal", [](auto& a, auto&) { return reciprocal(a); }, {3, 4}, {1}, 0.2},
      {"clamp_min", [](auto& a, auto&) { return clamp_min(a, 0.3); }, {3, 4}, {1}},
      {"sum_axis", [](auto& a, auto&) { return sum_axis(a, 1); }, {2, 3, 4}, {1}},
      {"mean_axis", [](auto& a, auto&) { return mean_axis(a, 0, true); }, {2, 3, 4}, {1}},
      {"max_axis", [](auto& a, auto&) { return max_axis(a, 1); }, {2, 5, 3}, {1}},
      {"softmax", [](auto& a, auto&) { return softmax(a, 1); }, {2, 4, 3}, {1}},
      {"log_softmax", [](auto& a, auto&) { return log_softmax(a, 2); }, {2, 4, 3}, {1}},
      {"matmul", [](auto& a, auto& b) { return matmul(a, b); }, {3, 4}, {4, 2}},
      {"transpose", [](auto& a, auto&) { return transpose(a); }, {3, 4}, {1}},
      {"linear", [](auto& a, auto& b) { return linear(a, b, Tensor::vector({0.1, -0.2})); },
       {2, 3, 4}, {4, 2}},
      {"reshape", [](auto& a, auto&) { return reshape(a, Shape{6, 2}); }, {3, 4}, {1}},
      {"concat", [](auto& a, auto& b) { return concat({a, b, a}, 1); }, {3, 2}, {3, 4}},
      {"slice", [](auto& a, auto&) { return slice(a, 1, 1, 2); }, {3, 4, 2}, {1}},
      {"gather_rows", [](auto& a, auto&) { return gather_rows(a, {2, 0, 2, 1}); }, {3, 4}, {1}},
      {"l2_normalize_rows", [](auto& a, auto&) { return l2_normalize_rows(a); }, {3, 4}, {1}},
      {"cosine_matrix", [](auto& a, auto& b) { return cosine_matrix(a, b); }, {3, 4}, {5, 4}},
      {"attention",
       [](auto& a, auto& b) { return attention(a, b, scale(b, 0.5)); }, {3, 4}, {5, 4}},
      {"dft",
       [](auto& a, auto&) {
         auto z = dft(a);
         return concat({z.real, z.imag}, 1);
       },
       {7, 3}, {1}},
      {"idft",
       [](auto& a, auto& b) { return idft({a, b}); }, {6, 2}, {6, 2}},
  };
  for (const auto& c : cases) {
    Tensor a = random_tensor(c.sa, rng, c.lo, 2.0);
    Tensor b = random_tensor(c.sb, rng, c.lo, 2.0);
    Tensor probe;  // random weights turn any output into a scalar
    auto f = [&] {
      Tensor out = c.f(a, b);
      if (!probe.defined()) probe = random_tensor(out.shape(), rng).detach();
      return sum(mul(out, probe));
    };
    auto report = grad_check(f, {{"a", a}, {"b", b}}, opts);
    EXPECT_TRUE(report.passed()) << c.name << "\n" << report.table();
  }
}

TEST(Properties, SoftmaxSumsToOneAndTanhIsOpenBounded) {
  Rng rng(9);
  Tensor x = random_tensor(Shape{4, 7, 3}, rng, -50.0, 50.0);
  Tensor s = softmax(x, 1);
  for (std::size_t o = 0; o < 4; ++o)
    for (std::size_t i = 0; i < 3; ++i) {
      double total = 0.0;
      for (std::size_t l = 0; l < 7; ++l) total += s[(o * 7 + l) * 3 + i];
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  Tensor t = tanh(random_tensor(Shape{100}, rng, -15.0, 15.0));
  for (double v : t.values()) {
    EXPECT_GT(v, -1.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  ParameterStore store;
  Rng rng(1);
  Tensor w = store.add("w", Shape{3}, Init::kXavier, rng);
  std::vector<double> before(w.values().begin(), w.values().end());
  adam_step(store, {{"w", {0, 0, 0}}}, {});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(w[i], before[i]);
}

TEST(Adam, FirstStepMovesByLearningRateAgainstGradientSign) {
  ParameterStore store;
  Tensor w = store.add("w", Tensor::scalar(1.0));
  adam_step(store, {{"w", {-3.7}}}, {.learning_rate = 0.01});
  EXPECT_NEAR(w.item(), 1.01, 1e-8);
}

TEST(Adam, MissingGradientRejected) {
  ParameterStore store;
  store.add("w", Tensor::scalar(1.0));
  EXPECT_THROW(adam_step(store, {}, {}), ContractViolation);
}

TEST(Adam, SameSeedIsBitIdentical) {
  auto run = [] {
    ParameterStore store;
    Rng rng(42);
    Tensor w = store.add("w", Shape{4, 3}, Init::kXavier, rng);
    Tensor target = Tensor::matrix(4, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
    for (int i = 0; i < 20; ++i) {
      auto g = backward(sum(square(sub(w, target))), store);
      adam_step(store, g, {.learning_rate = 0.05});
    }
    return std::vector<double>(w.values().begin(), w.values().end());
  };
  EXPECT_EQ(run(), run());
}

TEST(ParameterStore, DuplicateNameRejected) {
  ParameterStore store;
  store.add("w", Tensor::scalar(1.0));
  EXPECT_THROW(store.add("w", Tensor::scalar(2.0)), ContractViolation);
}

TEST(Noise, FrozenDrawsReplay) {
  auto noise = NoiseSource::seeded(5);
  noise.set_recording(true);
  Tensor a = noise.draw(Shape{4});
  noise.freeze();
  Tensor b = noise.draw(Shape{4});
  noise.rewind();
  Tensor c = noise.draw(Shape{4});
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a[i], b[i]);
    EXPECT_EQ(a[i], c[i]);
  }
  auto zero = NoiseSource::zero();
  Tensor z = zero.draw(Shape{3});
  for (double v : z.values()) EXPECT_EQ(v, 0.0);
}

}  // namespace
}  // namespace tploc
