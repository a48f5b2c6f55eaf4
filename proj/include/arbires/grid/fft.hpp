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

// Real-input discrete Fourier transforms over the trailing 2 or 3 axes.
//
// Convention: the forward transform is unnormalized,
//   X[k] = sum_n x[n] exp(-2 pi i k.n / N),
// and the inverse carries the 1/(H W) (or 1/(T H W)) factor, so
// sum |x|^2 = (1/(H W)) sum_{full spectrum} |X|^2.
//
// Only the half spectrum (last axis W/2 + 1 bins) is stored. The inverse
// treats the half spectrum as a real-linear map: the self-conjugate columns
// (k_x = 0 and, for even W, k_x = W/2) are Hermitian-projected before the
// complex-to-real transform, which equals taking the real part of the full
// inverse sum. For spectra of real fields this is the exact inverse.

#include <cstddef>
#include <span>

#include "arbires/grid/field.hpp"

namespace arbires::grid {

Spectrum fft2(const Field& field);
Field ifft2(const Spectrum& spec, std::size_t height, std::size_t width);

/// Sum of |X|^2 over the full (implied Hermitian) spectrum.
double full_spectrum_energy(const Spectrum& spec);

namespace fft {

/// Batched transforms over contiguous planes. dims holds the transformed
/// axis lengths (rank 2 or 3); the last one is the halved axis.
void rfft(std::span<const std::size_t> dims, std::size_t batch, const double* in, cplx* out);
void irfft(std::span<const std::size_t> dims, std::size_t batch, const cplx* in, double* out);
/// irfft that uses `in` as scratch and leaves it unspecified.
void irfft_consume(std::span<const std::size_t> dims, std::size_t batch, cplx* in, double* out);

/// Number of complex bins per transformed plane.
std::size_t half_size(std::span<const std::size_t> dims);
std::size_t real_size(std::span<const std::size_t> dims);

/// Weight 1 for self-conjugate last-axis columns, 2 otherwise; the
/// multiplicity of a half-spectrum bin in the full spectrum.
double column_multiplicity(std::size_t j, std::size_t last_dim);

}  // namespace fft

}  // namespace arbires::grid
