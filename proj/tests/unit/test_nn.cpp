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
#include <numbers>

#include "doctest.h"
#include "arbires/nn/layers.hpp"
#include "support/gradcheck.hpp"

using namespace arbires;
using namespace arbires::nn;
using arbires::testing::gradcheck;
using arbires::testing::gradcheck_params;
using arbires::testing::Leaf;
using arbires::testing::probe;
using arbires::testing::random_tensor;
using std::numbers::pi;

namespace {

// Sum of a few Fourier modes with |ky| < m, kx < m, sampled at cell centres.
ad::Tensor band_limited(std::size_t channels, std::size_t n, std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  ad::Tensor t({1, channels, n, n});
  for (std::size_t c = 0; c < channels; ++c)
    for (int ky = -static_cast<int>(m) + 1; ky < static_cast<int>(m); ++ky)
      for (int kx = 0; kx < static_cast<int>(m); ++kx) {
        const double a = nd(rng), b = nd(rng);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            const double th = 2 * pi * (kx * (j + 0.5) + ky * (i + 0.5)) / static_cast<double>(n);
            t[(c * n + i) * n + j] += a * std::cos(th) + b * std::sin(th);
          }
      }
  return t;
}

double max_abs_diff(const ad::Tensor& a, const ad::Tensor& b) {
  REQUIRE(a.shape() == b.shape());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("spectral conv with identity weights passes band-limited input") {
  const SpectralConv sc{"sc", 2, 2, {4, 4}};
  ParamStore store;
  Rng rng(1);
  sc.init(store, rng);
  ad::Tensor& wr = store.at("sc.wr").value;
  store.at("sc.wi").value.fill(0.0);
  wr.fill(0.0);
  for (std::size_t m = 0; m < 8 * 4; ++m)
    for (std::size_t c = 0; c < 2; ++c) wr[m * 4 + c * 2 + c] = 1.0;
  const ad::Tensor x = band_limited(2, 16, 4, 3);
  Graph g;
  CHECK(max_abs_diff(sc.forward(g, store, g.constant(x)).value(), x) <= 1e-10);

  store.at("sc.wr").value.fill(0.0);
  Graph g2;
  for (double v : sc.forward(g2, store, g2.constant(x)).value().values()) CHECK(v == 0.0);
}

TEST_CASE("spectral conv commutes with average pooling on band-limited input") {
  const SpectralConv sc{"sc", 3, 2, {6, 6}};
  ParamStore store;
  Rng rng(5);
  sc.init(store, rng);
  const ad::Tensor fine = band_limited(3, 64, 6, 9);
  Graph g;
  Var x64 = g.constant(fine);
  const ad::Tensor a = ad::avg_pool(sc.forward(g, store, x64), 2).value();
  const ad::Tensor b = sc.forward(g, store, ad::avg_pool(x64, 2)).value();
  CHECK(max_abs_diff(a, b) <= 1e-6);
}

TEST_CASE("spectral conv rejects modes beyond Nyquist") {
  const SpectralConv sc{"sc", 1, 1, {8, 8}};
  ParamStore store;
  Rng rng(1);
  sc.init(store, rng);
  Graph g;
  CHECK_NOTHROW(sc.forward(g, store, g.constant(ad::Tensor({1, 1, 16, 16}))));
  CHECK_THROWS_WITH_AS(sc.forward(g, store, g.constant(ad::Tensor({1, 1, 12, 12}))), doctest::Contains("Nyquist"),
                       ad::AdError);
}

TEST_CASE("fourier block: zero input, shapes, gradients") {
  const FourierBlock block("fb", 3, {3, 3});
  ParamStore store;
  Rng rng(2);
  block.init(store, rng);
  {
    Graph g;
    const ad::Tensor y = block.forward(g, store, g.constant(ad::Tensor({2, 3, 8, 8}))).value();
    const ad::Tensor& b = store.at("fb.pointwise.b").value;
    for (std::size_t c = 0; c < 3; ++c) {
      const double expect = 0.5 * b[c] * (1.0 + std::erf(b[c] / std::sqrt(2.0)));
      CHECK(y[c * 64 + 17] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  for (std::size_t layers : {1, 2, 5}) {
    Graph g;
    Var x = g.constant(random_tensor({1, 3, 12, 8}, 4));
    for (std::size_t l = 0; l < layers; ++l) x = block.forward(g, store, x);
    CHECK(x.shape() == ad::Shape{1, 3, 12, 8});
  }
  const ad::Tensor x = random_tensor({2, 3, 8, 8}, 6);
  CHECK(gradcheck_params(store, [&](Graph& g) { return probe(block.forward(g, store, g.constant(x))); }) <= 1e-4);
  CHECK(gradcheck({{x}}, [&](Graph& g, const std::vector<Var>& v) { return probe(block.forward(g, store, v[0])); }) <=
        1e-4);
  Graph g;
  CHECK_THROWS(block.forward(g, store, g.constant(ad::Tensor({1, 2, 8, 8}))));
}

TEST_CASE("spatio-temporal fourier block") {
  const FourierBlock block("fb3", 2, {2, 3, 3});
  ParamStore store;
  Rng rng(3);
  block.init(store, rng);
  const ad::Tensor x = random_tensor({1, 2, 5, 8, 8}, 8);
  Graph g;
  CHECK(block.forward(g, store, g.constant(x)).shape() == x.shape());
  CHECK(gradcheck_params(store, [&](Graph& gg) { return probe(block.forward(gg, store, gg.constant(x))); }) <= 1e-4);
}

TEST_CASE("meta upsampler mixes the three kernels") {
  const Upsampler up{"up", UpsampleMode::Meta, grid::Boundary::Periodic};
  ParamStore store;
  up.init(store);
  const ad::Tensor x = random_tensor({1, 2, 6, 6}, 10);
  auto interp = [&](grid::ResampleMode m) {
    Graph g;
    return ad::interpolate(g.constant(x), 12, 18, m, grid::Boundary::Periodic).value();
  };
  const ad::Tensor n = interp(grid::ResampleMode::Nearest), l = interp(grid::ResampleMode::Bilinear),
                   c = interp(grid::ResampleMode::Bicubic);
  {
    Graph g;
    const ad::Tensor y = up.forward(g, store, g.constant(x), 12, 18).value();
    double d = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) d = std::max(d, std::abs(y[i] - (n[i] + l[i] + c[i]) / 3.0));
    CHECK(d <= 1e-12);
  }
  store.at("up.logits").value = ad::Tensor({3}, std::vector<double>{30, -30, -30});
  {
    Graph g;
    CHECK(max_abs_diff(up.forward(g, store, g.constant(x), 12, 18).value(), n) <= 1e-9);
  }
  store.at("up.logits").value = random_tensor({3}, 12);
  CHECK(gradcheck_params(store, [&](Graph& g) { return probe(up.forward(g, store, g.constant(x), 12, 12)); }) <= 1e-4);
  CHECK(gradcheck({{x}}, [&](Graph& g, const std::vector<Var>& v) {
          return probe(up.forward(g, store, v[0], 12, 12));
        }) <= 1e-4);
  Graph g;
  CHECK_THROWS(up.forward(g, store, g.constant(x), 4, 6));
}

TEST_CASE("meta mixture weights are a strictly positive partition of unity") {
  const Upsampler up{"up", UpsampleMode::Meta};
  ParamStore store;
  up.init(store);
  for (std::uint64_t s = 0; s < 50; ++s) {
    store.at("up.logits").value = random_tensor({3}, s, 5.0);
    const auto w = up.mixture(store);
    double sum = 0.0;
    for (double v : w) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("multiscale reconstruction") {
  const MultiscaleReconstruct ms{"ms", 2, 3, 2};
  ParamStore store;
  Rng rng(4);
  ms.init(store, rng);
  const ad::Tensor x = random_tensor({1, 2, 8, 8}, 14);
  {
    Graph g;
    CHECK(ms.forward(g, store, g.constant(x)).shape() == x.shape());
  }
  CHECK(gradcheck_params(store, [&](Graph& g) { return probe(ms.forward(g, store, g.constant(x))); }) <= 1e-4);
  CHECK(gradcheck({{x}}, [&](Graph& g, const std::vector<Var>& v) { return probe(ms.forward(g, store, v[0])); }) <=
        1e-4);

  for (auto& [name, p] : store)
    if (name.rfind("ms.merge.b", 0) != 0) p.value.fill(0.0);
  store.at("ms.merge.b").value = ad::Tensor({2}, std::vector<double>{0.25, -1.5});
  Graph g;
  const ad::Tensor y = ms.forward(g, store, g.constant(x)).value();
  for (std::size_t i = 0; i < 64; ++i) {
    CHECK(y[i] == 0.25);
    CHECK(y[64 + i] == -1.5);
  }
  CHECK_THROWS(ms.forward(g, store, g.constant(ad::Tensor({1, 2, 6, 6}))));
}

TEST_CASE("softmax constraint") {
  {
    Graph g;
    const ad::Tensor y = softmax_constraint(g.constant(random_tensor({1, 1, 4, 4}, 1, 0.0)),
                                            g.constant(ad::Tensor({1, 1, 2, 2}, 2.0)), 2)
                             .value();
    for (double v : y.values()) CHECK(v == doctest::Approx(2.0).epsilon(1e-15));
  }
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t factor = std::size_t{2} << (trial % 3), h = 1 + trial % 4, w = 1 + (trial / 4) % 3;
    Graph g;
    Var a = g.constant(random_tensor({2, 2, h, w}, rng(), 3.0));
    Var y = g.constant(random_tensor({2, 2, h * factor, w * factor}, rng(), 4.0));
    CHECK(max_abs_diff(ad::avg_pool(softmax_constraint(y, a, factor), factor).value(), a.value()) <= 1e-6);
  }
  const ad::Tensor y = random_tensor({1, 2, 6, 4}, 30), a = random_tensor({1, 2, 3, 2}, 31);
  CHECK(gradcheck({{y}, {a}}, [](Graph&, const std::vector<Var>& v) { return probe(softmax_constraint(v[0], v[1], 2)); }) <=
        1e-4);
  Graph g;
  CHECK_THROWS(softmax_constraint(g.constant(ad::Tensor({1, 1, 6, 6})), g.constant(ad::Tensor({1, 1, 4, 4})), 2));
}

TEST_CASE("sobel preprocessing appends gradient channels") {
  ad::Tensor x({2, 1, 8, 8}, 3.0);
  const ad::Tensor y = with_sobel(x, grid::Boundary::Periodic);
  CHECK(y.shape() == ad::Shape{2, 3, 8, 8});
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t i = 0; i < 64; ++i) {
      CHECK(y[b * 192 + i] == 3.0);
      CHECK(y[b * 192 + 64 + i] == 0.0);
      CHECK(y[b * 192 + 128 + i] == 0.0);
    }
}

TEST_CASE("u-net shapes at full width") {
  const UNet net{"unet", 2, 2, 64};
  ParamStore store;
  Rng rng(1);
  net.init(store, rng);
  Graph g;
  UNet::Trace trace;
  Var y = net.forward(g, store, g.constant(random_tensor({1, 2, 64, 64}, 1)), &trace);
  CHECK(trace.bottleneck == ad::Shape{1, 512, 4, 4});
  CHECK(y.shape() == ad::Shape{1, 2, 64, 64});
  const auto w = net.widths();
  REQUIRE(trace.merged.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(trace.merged[i][1] == 2 * w[3 - i]);
  CHECK_THROWS_WITH(net.forward(g, store, g.constant(ad::Tensor({1, 2, 40, 40}))), doctest::Contains("16"));
}

TEST_CASE("u-net end-to-end gradient at toy width") {
  const UNet net{"unet", 1, 1, 2};
  ParamStore store;
  Rng rng(3);
  net.init(store, rng);
  for (std::uint64_t seed : {2, 3, 4, 5}) {
    const ad::Tensor x = random_tensor({4, 1, 16, 16}, seed);
    auto loss = [&](Graph& g) { return probe(net.forward(g, store, g.constant(x))); };
    std::string worst;
    const double err = gradcheck_params(store, loss, 4, 1e-5, false, &worst);
    CHECK_MESSAGE(err <= 1e-4, worst);
  }
  // With batch statistics every weight moves every pre-activation, so most
  // inputs put some ReLU or pooling switch within eps; this one does not.
  const ad::Tensor x = random_tensor({4, 1, 16, 16}, 3);
  auto loss = [&](Graph& g) { return probe(net.forward(g, store, g.constant(x))); };
  std::string worst;
  const double err = gradcheck_params(store, loss, 4, 1e-5, true, &worst);
  CHECK_MESSAGE(err <= 1e-4, worst);
}
