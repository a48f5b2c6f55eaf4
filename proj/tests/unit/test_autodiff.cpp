/* Copyright 2026 The arbires Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cmath>

#include "doctest.h"
#include "support/gradcheck.hpp"
#include "support/primitive_cases.hpp"

using namespace arbires;
using namespace arbires::ad;
using testing::gradcheck;
using testing::Leaf;
using testing::probe;
using testing::random_tensor;

namespace {

constexpr double kGate = 1e-4;

Leaf real(Shape s, std::uint64_t seed, double scale = 1.0) { return {random_tensor(std::move(s), seed, scale), false}; }

}  // namespace

TEST_CASE("relu value and subgradient") {
  Graph g;
  Var x = g.variable(Tensor({3}, std::vector<double>{-1.0, 0.0, 2.0}));
  Var y = relu(x);
  CHECK(y.value()[0] == 0.0);
  CHECK(y.value()[1] == 0.0);
  CHECK(y.value()[2] == 2.0);
  g.backward(scale(mean(y), 3.0));
  const Tensor& gx = g.grad(x);
  CHECK(gx[0] == 0.0);
  CHECK(gx[1] == 0.0);
  CHECK(gx[2] == 1.0);
}

TEST_CASE("gradient of sum x^2") {
  Graph g;
  Var x = g.variable(Tensor({2}, std::vector<double>{1.0, 2.0}));
  g.backward(scale(mean_square(x), 2.0));
  CHECK(g.grad(x)[0] == doctest::Approx(2.0));
  CHECK(g.grad(x)[1] == doctest::Approx(4.0));
}

TEST_CASE("backward contract errors") {
  Graph g;
  Var x = g.variable(Tensor({2}, 1.0));
  CHECK_THROWS_AS(g.grad(x), AdError);
  CHECK_THROWS_AS(g.backward(relu(x)), AdError);
  CHECK_THROWS_AS(add(x, g.variable(Tensor({3}, 1.0))), AdError);
  try {
    add(x, g.variable(Tensor({3}, 1.0)));
  } catch (const AdError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("[2]") != std::string::npos);
    CHECK(msg.find("[3]") != std::string::npos);
  }
}

TEST_CASE("disconnected parameter receives a zero adjoint") {
  ParamStore store;
  store.add("used", Tensor({2}, 1.5));
  store.add("unused", Tensor({3}, 2.0));
  Graph g;
  Var u = g.param(store, "used");
  g.param(store, "unused");
  g.backward(mean_square(u));
  CHECK(store.at("unused").has_grad);
  for (double v : store.at("unused").grad.values()) CHECK(v == 0.0);
  CHECK(store.at("used").grad[0] == doctest::Approx(1.5));
}

TEST_CASE("two-layer linear chain gradient is the hand-computed weight product") {
  // y = W2 W1 x with loss = mean(y) over 2 outputs; d loss / dx = 1/2 (W2 W1)^T 1.
  const Tensor w1({3, 2}, std::vector<double>{1, 2, -1, 0.5, 3, -2});
  const Tensor w2({2, 3}, std::vector<double>{0.5, -1, 2, 1, 1, -0.5});
  Graph g;
  Var x = g.variable(Tensor({1, 2, 1}, std::vector<double>{0.3, -0.7}));
  Var h = conv1x1(x, g.constant(w1), g.constant(Tensor({3}, 0.0)));
  Var y = conv1x1(h, g.constant(w2), g.constant(Tensor({2}, 0.0)));
  g.backward(mean(y));
  for (std::size_t j = 0; j < 2; ++j) {
    double expect = 0.0;
    for (std::size_t o = 0; o < 2; ++o)
      for (std::size_t k = 0; k < 3; ++k) expect += 0.5 * w2[o * 3 + k] * w1[k * 2 + j];
    CHECK(g.grad(x)[j] == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("spectral energy gradient w.r.t. complex weights matches finite differences") {
  const double err = gradcheck({real({1, 1, 6, 8}, 1), real({6, 5}, 2), real({6, 5}, 3)},
                               [](Graph&, const std::vector<Var>& v) {
                                 Var x = reshape(rfft(v[0], 2), {1, 1, 6, 5, 2});
                                 Var r = reshape(complex_from_parts(v[1], v[2]), {1, 1, 6, 5, 2});
                                 return mean_square(irfft(complex_mul(x, r), {6, 8}));
                               },
                               60);
  CHECK(err < kGate);
}

TEST_CASE("primitive finite-difference gate") {
  for (auto& c : testing::primitive_cases()) {
    CAPTURE(c.name);
    CHECK(gradcheck(c.leaves, c.fn, 40, 1e-5, c.training) < kGate);
  }
}

TEST_CASE("spectral ops reject misfit shapes") {
  Graph g;
  Var x = g.variable(Tensor({1, 2, 8, 5, 2}), true);
  CHECK_THROWS_AS(mode_truncate(x, {5, 2}), AdError);
  CHECK_THROWS_AS(irfft(x, {8, 10}), AdError);
  Var w = g.variable(Tensor({6, 2, 3, 4, 2}), true);
  CHECK_THROWS_AS(spectral_mix(mode_truncate(x, {3, 2}), w), AdError);
}

TEST_CASE("mode truncate then pad keeps exactly the low block") {
  Graph g;
  Tensor t = random_tensor({1, 8, 5, 2}, 4);
  Var x = g.constant(t, true);
  Var y = mode_pad(mode_truncate(x, {2, 2}), {8, 8});
  const Tensor& yv = y.value();
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      const bool kept = (i < 2 || i >= 6) && j < 2;
      for (std::size_t c = 0; c < 2; ++c) {
        const std::size_t idx = (i * 5 + j) * 2 + c;
        CHECK(yv[idx] == (kept ? t[idx] : 0.0));
      }
    }
}

TEST_CASE("batch norm updates running statistics only in training graphs") {
  Tensor rm({2}, 0.0), rv({2}, 1.0);
  {
    Graph g(false);
    batch_norm(g.constant(random_tensor({4, 2, 2, 2}, 1)), g.constant(Tensor({2}, 1.0)), g.constant(Tensor({2}, 0.0)),
               rm, rv);
  }
  CHECK(rm[0] == 0.0);
  CHECK(rv[0] == 1.0);
  Graph g(true);
  const Tensor x = random_tensor({4, 2, 2, 2}, 1);
  batch_norm(g.constant(x), g.constant(Tensor({2}, 1.0)), g.constant(Tensor({2}, 0.0)), rm, rv);
  double m = 0.0;
  for (std::size_t n = 0; n < 4; ++n)
    for (std::size_t i = 0; i < 4; ++i) m += x[(n * 2) * 4 + i];
  CHECK(rm[0] == doctest::Approx(0.1 * m / 16.0).epsilon(1e-14));
}

TEST_CASE("backward is linear in the loss") {
  const Tensor x0 = random_tensor({2, 2, 4, 4}, 1);
  auto grad_of = [&](double a, double b) {
    Graph g;
    Var x = g.variable(x0);
    Var l1 = mean_square(gelu(x));
    Var l2 = mean(interpolate(x, 8, 8, grid::ResampleMode::Bicubic, grid::Boundary::Periodic));
    Var l = add(scale(l1, a), scale(l2, b));
    g.backward(l);
    return g.grad(x);
  };
  const Tensor g1 = grad_of(1, 0), g2 = grad_of(0, 1), gm = grad_of(2.5, -0.75);
  for (std::size_t i = 0; i < g1.size(); ++i) CHECK(gm[i] == doctest::Approx(2.5 * g1[i] - 0.75 * g2[i]).epsilon(1e-12));
}

TEST_CASE("forward and backward are bitwise deterministic") {
  auto run = [] {
    Graph g;
    Var x = g.variable(random_tensor({2, 2, 8, 8}, 3));
    Var w = g.variable(random_tensor({3, 2, 3, 3}, 4));
    Var y = conv2d(x, w, g.constant(Tensor({3}, 0.1)), 1, 1);
    Var s = irfft(rfft(y, 2), {8, 8});
    Var l = mean_square(s);
    g.backward(l);
    return std::pair{l.value().item(), g.grad(w)};
  };
  const auto [l1, g1] = run();
  const auto [l2, g2] = run();
  CHECK(l1 == l2);
  CHECK(g1.storage() == g2.storage());
}

TEST_CASE("adam: zero gradient leaves the parameter unchanged") {
  ParamStore store;
  store.add("p", Tensor({1}, 0.7));
  store.at("p").grad = Tensor({1}, 0.0);
  store.at("p").has_grad = true;
  adam_step(store, {});
  CHECK(store.at("p").value[0] == 0.7);
  CHECK(store.at("p").step == 1);
}

TEST_CASE("adam: first step on theta^2 moves by lr") {
  ParamStore store;
  store.add("theta", Tensor({1}, 1.0));
  Graph g;
  g.backward(mean_square(g.param(store, "theta")));
  adam_step(store, {0.1});
  CHECK(store.at("theta").value[0] == doctest::Approx(0.9).epsilon(1e-7));
}

TEST_CASE("adam: converges on (theta - 3)^2") {
  ParamStore store;
  store.add("theta", Tensor({1}, 0.0));
  for (int i = 0; i < 200; ++i) {
    Graph g;
    Var t = g.param(store, "theta");
    g.backward(mean_square(sub(t, g.constant(Tensor({1}, 3.0)))));
    adam_step(store, {0.1});
  }
  CHECK(std::abs(store.at("theta").value[0] - 3.0) < 1e-2);
}

TEST_CASE("adam: missing gradient is reported by name") {
  ParamStore store;
  store.add("lonely", Tensor({1}, 0.0));
  try {
    adam_step(store, {});
    FAIL("expected AdError");
  } catch (const AdError& e) {
    CHECK(std::string(e.what()).find("lonely") != std::string::npos);
  }
}
