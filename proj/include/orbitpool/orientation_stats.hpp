/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <iosfwd>
#include <numbers>
#include <utility>
#include <vector>

#include "orbitpool/image.hpp"

namespace orbitpool {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into [-pi, pi).
double wrap_angle(double delta);
/// Wraps an angle into [0, 2pi).
double wrap_positive(double angle);

/// Wrapped Gaussian on the circle, evaluated as a sum over the five nearest
/// Gaussian branches. For bandwidths up to 1 rad the truncation error is far
/// below 1e-12.
class CircularKernel {
 public:
  static constexpr int kWraps = 2;

  explicit CircularKernel(double bandwidth);

  double bandwidth() const noexcept { return bandwidth_; }
  double operator()(double delta) const;

 private:
  double bandwidth_;
  double norm_;
  double cutoff_;  // branches beyond this distance underflow to exactly 0
};

/// One-bin-width bandwidth for a B-bin histogram.
inline double default_bandwidth(int bins) { return kTwoPi / bins; }

/// Isotropic Gaussian density over pixel offsets, truncated at 3 sigma.
class SpatialKernel {
 public:
  explicit SpatialKernel(double sigma);

  double sigma() const noexcept { return sigma_; }
  double radius() const noexcept { return 3.0 * sigma_; }
  double operator()(double du, double dv) const;

 private:
  double sigma_;
  double inv_two_var_;
  double norm_;
};

struct OrientationHistogram {
  std::vector<double> bins;  // bin b centered at 2 pi b / B
  double total_mass = 0.0;   // pre-normalization sum
  bool degenerate = false;   // set by normalize() on zero mass

  int size() const noexcept { return static_cast<int>(bins.size()); }
};

/// K(alpha - orientation) * magnitude, or 0 at invalid pixels.
double pixel_likelihood(const GradientField& f, int u, int v, double alpha,
                        const CircularKernel& k);

/// Soft orientation votes from every valid pixel within `radius` of `center`
/// (and inside the spatial kernel's support), weighted by gradient magnitude
/// and spatial weight. Bin b sits at angle `reference + 2 pi b / B`, so a
/// nonzero reference expresses orientations relative to a canonical frame.
OrientationHistogram pooled_histogram(const GradientField& f, Point2 center,
                                      double radius, const SpatialKernel& spatial,
                                      const CircularKernel& k, int bins,
                                      double reference = 0.0);

/// l1 normalization; zero mass maps to the uniform histogram with the
/// degenerate flag set.
OrientationHistogram normalize(const OrientationHistogram& h);

/// Debug dump: center_u,center_v,b0..b{B-1}.
void write_histograms_csv(
    std::ostream& out,
    const std::vector<std::pair<Point2, OrientationHistogram>>& rows);

}  // namespace orbitpool
