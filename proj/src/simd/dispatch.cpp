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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "arbires/simd/kernels.hpp"

namespace arbires::simd {

namespace {

constexpr KernelTable kScalar{scalar::axpy, scalar::dot,   scalar::gemm_nn,
                              scalar::caxpy, scalar::cdotc, scalar::mul};
#if defined(ARBIRES_HAVE_AVX2)
constexpr KernelTable kAvx2{avx2::axpy, avx2::dot, avx2::gemm_nn, avx2::caxpy, avx2::cdotc, avx2::mul};
#endif

Level detect() {
  if (const char* env = std::getenv("ARBIRES_SIMD")) {
    if (std::string(env) == "scalar") return Level::Scalar;
  }
  return cpu_supports(Level::Avx2) ? Level::Avx2 : Level::Scalar;
}

std::atomic<Level>& selected() {
  static std::atomic<Level> level{detect()};
  return level;
}

}  // namespace

bool cpu_supports(Level level) {
  switch (level) {
    case Level::Scalar:
      return true;
    case Level::Avx2:
#if defined(ARBIRES_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Level level) {
#if defined(ARBIRES_HAVE_AVX2)
  if (level == Level::Avx2) return kAvx2;
#endif
  (void)level;
  return kScalar;
}

const KernelTable& active() { return table(selected().load(std::memory_order_relaxed)); }

Level active_level() { return selected().load(std::memory_order_relaxed); }

std::string_view level_name(Level level) { return level == Level::Avx2 ? "avx2" : "scalar"; }

void force_level(Level level) {
  if (!cpu_supports(level)) {
    throw std::runtime_error("simd level '" + std::string(level_name(level)) + "' not supported on this cpu");
  }
  selected().store(level);
}

void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, const double* a,
          const double* b, double beta, double* c) {
  thread_local std::vector<double> pa, pb;
  const double* aa = a;
  const double* bb = b;
  if (trans_a) {
    // a is stored [k, m]
    pa.resize(m * k);
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t i = 0; i < m; ++i) pa[i * k + p] = a[p * m + i];
    aa = pa.data();
  }
  if (trans_b) {
    // b is stored [n, k]
    pb.resize(k * n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = 0; p < k; ++p) pb[p * n + j] = b[j * k + p];
    bb = pb.data();
  }
  active().gemm_nn(m, n, k, aa, k, bb, n, beta, c, n);
}

}  // namespace arbires::simd
