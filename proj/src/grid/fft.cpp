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

#include "arbires/grid/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

namespace arbires::grid {

namespace fft {

namespace {

struct PlanKey {
  std::vector<int> dims;
  bool forward;
  bool aligned;
  bool operator<(const PlanKey& o) const {
    if (forward != o.forward) return forward < o.forward;
    if (aligned != o.aligned) return aligned < o.aligned;
    return dims < o.dims;
  }
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  // SIMD codelets need the arrays to share the planning alignment; the
  // choice depends only on the shape, so results stay reproducible.
  fftw_plan get(std::span<const std::size_t> dims, bool forward, bool aligned) {
    PlanKey key{{}, forward, aligned};
    for (std::size_t d : dims) key.dims.push_back(static_cast<int>(d));
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t n_real = real_size(dims);
    const std::size_t n_half = half_size(dims);
    double* r = fftw_alloc_real(n_real);
    fftw_complex* c = fftw_alloc_complex(n_half);
    const unsigned flags = aligned ? FFTW_ESTIMATE : (FFTW_ESTIMATE | FFTW_UNALIGNED);
    const int rank = static_cast<int>(key.dims.size());
    fftw_plan plan = forward ? fftw_plan_dft_r2c(rank, key.dims.data(), r, c, flags)
                             : fftw_plan_dft_c2r(rank, key.dims.data(), c, r, flags);
    fftw_free(r);
    fftw_free(c);
    if (plan == nullptr) throw GridError("fftw failed to create a plan");
    plans_.emplace(std::move(key), plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

template <class A, class B>
bool aligned(A* a, B* b) {
  return fftw_alignment_of(reinterpret_cast<double*>(a)) == 0 && fftw_alignment_of(reinterpret_cast<double*>(b)) == 0;
}

void check_dims(std::span<const std::size_t> dims) {
  if (dims.size() < 1 || dims.size() > 3) throw GridError("fft rank must be 1, 2 or 3");
  for (std::size_t d : dims)
    if (d == 0) throw GridError("fft dimension must be >= 1");
}

// Projects the self-conjugate last-axis columns of one plane onto their
// Hermitian part.
void hermitian_project(std::span<const std::size_t> dims, cplx* plane) {
  const std::size_t last = dims.back();
  const std::size_t wh = last / 2 + 1;
  std::size_t lead = 1;
  for (std::size_t a = 0; a + 1 < dims.size(); ++a) lead *= dims[a];

  auto mirror = [&](std::size_t idx) {
    // idx enumerates the leading axes in row-major order.
    std::size_t out = 0, stride = 1;
    for (std::size_t a = dims.size() - 1; a-- > 0;) {
      const std::size_t n = dims[a];
      const std::size_t coord = (idx / stride) % n;
      out += ((n - coord) % n) * stride;
      stride *= n;
    }
    return out;
  };

  std::size_t cols[2] = {0, 0};
  std::size_t ncols = 1;
  if (last % 2 == 0 && last / 2 != 0) cols[ncols++] = last / 2;
  for (std::size_t ci = 0; ci < ncols; ++ci) {
    const std::size_t j = cols[ci];
    for (std::size_t p = 0; p < lead; ++p) {
      const std::size_t q = mirror(p);
      if (q < p) continue;
      cplx& a = plane[p * wh + j];
      cplx& b = plane[q * wh + j];
      if (q == p) {
        a = cplx(a.real(), 0.0);
      } else {
        const cplx h = 0.5 * (a + std::conj(b));
        a = h;
        b = std::conj(h);
      }
    }
  }
}

}  // namespace

std::size_t half_size(std::span<const std::size_t> dims) {
  std::size_t n = dims.back() / 2 + 1;
  for (std::size_t a = 0; a + 1 < dims.size(); ++a) n *= dims[a];
  return n;
}

std::size_t real_size(std::span<const std::size_t> dims) {
  std::size_t n = 1;
  for (std::size_t d : dims) n *= d;
  return n;
}

double column_multiplicity(std::size_t j, std::size_t last_dim) {
  if (j == 0) return 1.0;
  if (last_dim % 2 == 0 && j == last_dim / 2) return 1.0;
  return 2.0;
}

void rfft(std::span<const std::size_t> dims, std::size_t batch, const double* in, cplx* out) {
  check_dims(dims);
  const std::size_t nr = real_size(dims), nh = half_size(dims);
  fftw_plan fast = cache().get(dims, true, true);
  fftw_plan slow = nullptr;
  for (std::size_t b = 0; b < batch; ++b) {
    double* src = const_cast<double*>(in + b * nr);
    auto* dst = reinterpret_cast<fftw_complex*>(out + b * nh);
    fftw_plan plan = fast;
    if (!aligned(src, dst)) {
      if (!slow) slow = cache().get(dims, true, false);
      plan = slow;
    }
    fftw_execute_dft_r2c(plan, src, dst);
  }
}

void irfft_consume(std::span<const std::size_t> dims, std::size_t batch, cplx* in, double* out) {
  check_dims(dims);
  const std::size_t nr = real_size(dims), nh = half_size(dims);
  fftw_plan fast = cache().get(dims, false, true);
  fftw_plan slow = nullptr;
  const double scale = 1.0 / static_cast<double>(nr);
  for (std::size_t b = 0; b < batch; ++b) {
    cplx* plane = in + b * nh;
    hermitian_project(dims, plane);
    double* o = out + b * nr;
    auto* src = reinterpret_cast<fftw_complex*>(plane);
    fftw_plan plan = fast;
    if (!aligned(o, src)) {
      if (!slow) slow = cache().get(dims, false, false);
      plan = slow;
    }
    fftw_execute_dft_c2r(plan, src, o);
    for (std::size_t i = 0; i < nr; ++i) o[i] *= scale;
  }
}

void irfft(std::span<const std::size_t> dims, std::size_t batch, const cplx* in, double* out) {
  thread_local std::vector<cplx> scratch;
  const std::size_t nh = half_size(dims);
  scratch.assign(in, in + batch * nh);
  irfft_consume(dims, batch, scratch.data(), out);
}

}  // namespace fft

Spectrum fft2(const Field& field) {
  field.require_finite("fft2 input");
  Spectrum spec(field.channels(), field.height(), field.width());
  const std::size_t dims[2] = {field.height(), field.width()};
  fft::rfft(dims, field.channels(), field.data().data(), spec.coeffs().data());
  return spec;
}

Field ifft2(const Spectrum& spec, std::size_t height, std::size_t width) {
  if (spec.height() != height || spec.width() != width) {
    throw GridError("ifft2: spectrum layout does not match requested " + std::to_string(height) + "x" +
                    std::to_string(width));
  }
  Field out(spec.channels(), height, width);
  const std::size_t dims[2] = {height, width};
  fft::irfft(dims, spec.channels(), spec.coeffs().data(), out.data().data());
  return out;
}

double full_spectrum_energy(const Spectrum& spec) {
  double e = 0.0;
  for (std::size_t c = 0; c < spec.channels(); ++c)
    for (std::size_t i = 0; i < spec.height(); ++i)
      for (std::size_t j = 0; j < spec.half_width(); ++j)
        e += fft::column_multiplicity(j, spec.width()) * std::norm(spec.at(c, i, j));
  return e;
}

}  // namespace arbires::grid
