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

#pragma once

// Data-parallel inner loops used by the solver and the network layers.
//
// Every kernel exists as a portable scalar reference and, where the CPU
// supports it, an AVX2+FMA variant. The variant is chosen once at startup
// from CPUID; ARBIRES_SIMD=scalar in the environment forces the reference
// path. Vector variants reassociate sums, so results agree with the scalar
// path to rounding, not bitwise. Within one process the selection is fixed,
// so runs are reproducible.

#include <complex>
#include <cstddef>
#include <string_view>

namespace arbires::simd {

using cplx = std::complex<double>;

enum class Level { Scalar = 0, Avx2 = 1 };

struct KernelTable {
  // y[i] += a * x[i]
  void (*axpy)(std::size_t n, double a, const double* x, double* y);
  // sum_i x[i] * y[i]
  double (*dot)(std::size_t n, const double* x, const double* y);
  // C[M,N] = A[M,K] * B[K,N] + beta * C, all row-major with leading dims
  void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda,
                  const double* b, std::size_t ldb, double beta, double* c, std::size_t ldc);
  // y[i] += a * x[i] on complex arrays
  void (*caxpy)(std::size_t n, cplx a, const cplx* x, cplx* y);
  // sum_i conj(x[i]) * y[i]
  cplx (*cdotc)(std::size_t n, const cplx* x, const cplx* y);
  // y[i] = x[i] * w[i] (elementwise)
  void (*mul)(std::size_t n, const double* x, const double* w, double* y);
};

namespace scalar {
void axpy(std::size_t n, double a, const double* x, double* y);
double dot(std::size_t n, const double* x, const double* y);
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda,
             const double* b, std::size_t ldb, double beta, double* c, std::size_t ldc);
void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y);
cplx cdotc(std::size_t n, const cplx* x, const cplx* y);
void mul(std::size_t n, const double* x, const double* w, double* y);
}  // namespace scalar

#if defined(ARBIRES_HAVE_AVX2)
namespace avx2 {
void axpy(std::size_t n, double a, const double* x, double* y);
double dot(std::size_t n, const double* x, const double* y);
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda,
             const double* b, std::size_t ldb, double beta, double* c, std::size_t ldc);
void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y);
cplx cdotc(std::size_t n, const cplx* x, const cplx* y);
void mul(std::size_t n, const double* x, const double* w, double* y);
}  // namespace avx2
#endif

bool cpu_supports(Level level);
const KernelTable& table(Level level);

/// The table selected for this process.
const KernelTable& active();
Level active_level();
std::string_view level_name(Level level);

/// Overrides the process-wide selection. Intended for tests and benchmarks;
/// throws if the CPU lacks the requested level.
void force_level(Level level);

/// General matrix product on top of the active gemm_nn. Transposed operands
/// are packed into a scratch buffer first.
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, const double* a,
          const double* b, double beta, double* c);

}  // namespace arbires::simd
