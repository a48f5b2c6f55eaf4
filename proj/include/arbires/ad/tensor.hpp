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

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace arbires::ad {

using Shape = std::vector<std::size_t>;
using cplx = std::complex<double>;

class AdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string shape_str(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

/// Dense row-major double array. Complex tensors carry a trailing axis of
/// length 2 holding (re, im), which is also the layout of std::complex.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  cplx* complex_data() { return reinterpret_cast<cplx*>(data_.data()); }
  const cplx* complex_data() const { return reinterpret_cast<const cplx*>(data_.data()); }

  void fill(double v);
  Tensor reshaped(Shape shape) const;

  double item() const;

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// Keeps freed tensor storage in the process heap instead of returning it
/// to the OS, so the large activations of each training step reuse pages
/// rather than fault in fresh zeroed ones. Process-wide; call once from main.
void retain_freed_memory();

}  // namespace arbires::ad
