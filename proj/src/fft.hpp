/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace orbitpool::detail {

using cvec = std::vector<std::complex<double>>;

/// In-place-capable 2-D complex transform of a fixed size. Execution is
/// thread-safe; plan creation is serialized internally.
class Fft2d {
 public:
  Fft2d(int rows, int cols);
  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }

  void forward(cvec& data) const;
  /// Includes the 1/(rows*cols) factor.
  void inverse(cvec& data) const;
  void inverse_unscaled(cvec& data) const;

 private:
  int rows_;
  int cols_;
  void execute(int direction, cvec& data) const;

  void* aligned_[2];  // forward, backward
  void* unaligned_[2];
};

/// Shared plan cache keyed by size.
std::shared_ptr<const Fft2d> fft_for(int rows, int cols);

}  // namespace orbitpool::detail
