/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "orbitpool/orientation_stats.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "orbitpool/csv.hpp"

namespace orbitpool {

double wrap_angle(double delta) {
  double d = std::fmod(delta + std::numbers::pi, kTwoPi);
  if (d < 0.0) d += kTwoPi;
  return d - std::numbers::pi;
}

double wrap_positive(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a >= kTwoPi ? 0.0 : a;
}

CircularKernel::CircularKernel(double bandwidth) : bandwidth_(bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw Error(ErrorCode::InvalidArgument, "kernel bandwidth must be > 0");
  norm_ = 1.0 / (bandwidth * std::sqrt(kTwoPi));
  // exp(-x) is exactly 0 in double for x > 745.2.
  cutoff_ = bandwidth * std::sqrt(2.0 * 746.0);
}

double CircularKernel::operator()(double delta) const {
  const double d = wrap_angle(delta);
  const double inv = 1.0 / (2.0 * bandwidth_ * bandwidth_);
  double sum = 0.0;
  for (int k = -kWraps; k <= kWraps; ++k) {
    const double x = d + kTwoPi * k;
    if (std::abs(x) > cutoff_) continue;
    sum += std::exp(-x * x * inv);
  }
  return norm_ * sum;
}

SpatialKernel::SpatialKernel(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw Error(ErrorCode::InvalidArgument, "spatial sigma must be > 0");
  inv_two_var_ = 1.0 / (2.0 * sigma * sigma);
  norm_ = 1.0 / (kTwoPi * sigma * sigma);
}

double SpatialKernel::operator()(double du, double dv) const {
  const double r2 = du * du + dv * dv;
  if (r2 > 9.0 * sigma_ * sigma_) return 0.0;
  return norm_ * std::exp(-r2 * inv_two_var_);
}

double pixel_likelihood(const GradientField& f, int u, int v, double alpha,
                        const CircularKernel& k) {
  if (u < 0 || v < 0 || u >= f.width || v >= f.height)
    throw Error(ErrorCode::OutOfBounds, "pixel outside gradient field");
  const auto i = f.index(u, v);
  if (!f.valid[i]) return 0.0;
  return k(alpha - f.orientation[i]) * f.magnitude[i];
}

OrientationHistogram pooled_histogram(const GradientField& f, Point2 center,
                                      double radius, const SpatialKernel& spatial,
                                      const CircularKernel& k, int bins,
                                      double reference) {
  if (bins < 1) throw Error(ErrorCode::InvalidArgument, "bin count must be >= 1");
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be > 0");
  const double reach = std::min(radius, spatial.radius());
  const int u0 = std::max(0, static_cast<int>(std::ceil(center.u - reach)));
  const int u1 = std::min(f.width - 1, static_cast<int>(std::floor(center.u + reach)));
  const int v0 = std::max(0, static_cast<int>(std::ceil(center.v - reach)));
  const int v1 = std::min(f.height - 1, static_cast<int>(std::floor(center.v + reach)));
  if (u0 > u1 || v0 > v1)
    throw Error(ErrorCode::OutOfBounds, "pooling window lies outside the image");

  OrientationHistogram h;
  h.bins.assign(bins, 0.0);
  const double r2 = radius * radius;
  for (int v = v0; v <= v1; ++v)
    for (int u = u0; u <= u1; ++u) {
      const double du = u - center.u, dv = v - center.v;
      if (du * du + dv * dv > r2) continue;
      const auto i = f.index(u, v);
      if (!f.valid[i]) continue;
      const double w = spatial(du, dv) * f.magnitude[i];
      if (w == 0.0) continue;
      for (int b = 0; b < bins; ++b)
        h.bins[b] += w * k(reference + kTwoPi * b / bins - f.orientation[i]);
    }
  for (double x : h.bins) h.total_mass += x;
  return h;
}

OrientationHistogram normalize(const OrientationHistogram& h) {
  OrientationHistogram out = h;
  double sum = 0.0;
  for (double x : h.bins) sum += x;
  if (!(sum > 0.0)) {
    std::fill(out.bins.begin(), out.bins.end(), 1.0 / h.bins.size());
    out.degenerate = true;
    return out;
  }
  for (double& x : out.bins) x /= sum;
  out.degenerate = h.degenerate;
  return out;
}

void write_histograms_csv(
    std::ostream& out,
    const std::vector<std::pair<Point2, OrientationHistogram>>& rows) {
  for (const auto& [c, h] : rows) {
    out << csv::num(c.u) << ',' << csv::num(c.v);
    for (double x : h.bins) out << ',' << csv::num(x);
    out << '\n';
  }
}

}  // namespace orbitpool
