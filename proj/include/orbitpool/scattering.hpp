/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <complex>
#include <iosfwd>
#include <memory>
#include <numbers>
#include <vector>

#include "orbitpool/descriptor.hpp"
#include "orbitpool/image.hpp"

namespace orbitpool {

/// Morlet-style Gabor: elliptical Gaussian envelope times a plane wave along
/// the rotation direction, with the DC leak removed.
struct MotherWavelet {
  double xi = 0.75 * std::numbers::pi;  // center frequency, rad/pixel
  double sigma = 0.8;                   // envelope width along the wave, pixels
  double slant = 0.5;                   // across-wave width is sigma / slant
};

struct FilterBankParams {
  int scales = 3;     // J
  int rotations = 8;  // L
  MotherWavelet mother;
  int patch_side = 32;  // patches the bank will be applied to
};

/// Complex kernel stored row-major over [-radius, radius]^2.
struct ComplexKernel {
  int radius = 0;
  std::vector<std::complex<double>> taps;

  int side() const noexcept { return 2 * radius + 1; }
  std::complex<double> at(int du, int dv) const {
    return taps[static_cast<std::size_t>(dv + radius) * side() + (du + radius)];
  }
};

enum class ConvolutionMethod { Auto, Direct, Frequency };

/// Immutable after construction and safe to share across threads.
class FilterBank {
 public:
  explicit FilterBank(const FilterBankParams& params = {});
  ~FilterBank();
  FilterBank(FilterBank&&) noexcept;
  FilterBank& operator=(FilterBank&&) noexcept;

  const FilterBankParams& params() const noexcept { return params_; }
  int scales() const noexcept { return params_.scales; }
  int rotations() const noexcept { return params_.rotations; }

  /// psi_{j,l}: dilation 2^j and rotation pi l / L of the mother wavelet.
  const ComplexKernel& filter(int j, int l) const;
  /// Gaussian of width sigma * 2^J.
  double lowpass_sigma() const noexcept;

  struct Spectra;
  /// Cached filter spectra on the symmetric-extension grid for `side`.
  const Spectra* spectra_for(int side) const;

 private:
  FilterBankParams params_;
  std::vector<ComplexKernel> filters_;
  std::unique_ptr<Spectra> spectra_;
};

struct ScatteringVector {
  int scales = 0;
  int rotations = 0;
  int order = 1;
  double order0 = 0.0;
  std::vector<double> order1;  // index j * L + l
  std::vector<double> order2;  // (j1,l1,j2,l2) with j2 > j1, lexicographic

  /// order1 then order2.
  std::vector<double> band_coefficients() const;
};

struct ScatteringPath {
  int order;
  int j1, l1, j2, l2;  // -1 where unused
};
std::vector<ScatteringPath> scattering_paths(int scales, int rotations, int order);

/// Convolution with symmetric (half-sample) boundary extension, returning the
/// same-size output. Both methods compute the same quantity.
std::vector<std::complex<double>> convolve(const std::vector<double>& image,
                                           int width, int height,
                                           const ComplexKernel& kernel,
                                           ConvolutionMethod method);

ScatteringVector scatter(const Image& patch, const FilterBank& bank, int order,
                         ConvolutionMethod method = ConvolutionMethod::Auto);

/// Square patch of side `side` around the keypoint, rotated into its frame,
/// resampled to out_side x out_side with box-filtered bilinear samples.
Image extract_patch(const Image& img, const Keypoint& kp, double side, int out_side);

struct ScatterConfig {
  int order = 2;
  double support_factor = 3.0;
  int common_side = 32;
};

bool patch_fits(const Image& img, const Keypoint& kp, double side);

ScatteringVector dsp_scatter(const Image& img, const Keypoint& kp,
                             const SizePrior& prior, const FilterBank& bank,
                             const ScatterConfig& cfg = {});

/// l1-normalized band coefficients (orders >= 1); uniform with a degenerate
/// flag when they all vanish.
Descriptor scattering_descriptor(const ScatteringVector& s, const Keypoint& kp);

/// One row per path: keypoint,order,j1,l1,j2,l2,value.
void write_scattering_csv(std::ostream& out, const ScatteringVector& s,
                          int keypoint_index = 0, bool header = true);

}  // namespace orbitpool
