/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <algorithm>
#include <cmath>

#include "orbitpool/descriptor.hpp"

namespace orbitpool {

namespace {

// Vertex offset of the parabola through (-1, a), (0, b), (1, c).
double parabola_peak(double a, double b, double c) {
  const double denom = a - 2.0 * b + c;
  if (denom == 0.0) return 0.0;
  return std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
}

}  // namespace

std::vector<Keypoint> detect_grid(const Image& img, const GridParams& p) {
  if (p.stride < 1) throw Error(ErrorCode::InvalidArgument, "grid stride must be >= 1");
  if (!(p.base_size > 0.0))
    throw Error(ErrorCode::InvalidArgument, "base size must be > 0");
  if (std::min(img.width(), img.height()) < 3.0 * p.base_size)
    throw Error(ErrorCode::TooSmall, "image smaller than one descriptor support");
  const double margin = p.margin < 0.0 ? p.base_size : p.margin;

  std::vector<Keypoint> out;
  for (int v = 0; v < img.height(); v += p.stride) {
    if (v < margin || v > img.height() - 1 - margin) continue;
    for (int u = 0; u < img.width(); u += p.stride) {
      if (u < margin || u > img.width() - 1 - margin) continue;
      out.push_back({double(u), double(v), p.base_size, 0.0});
    }
  }
  return out;
}

std::vector<Keypoint> detect_dog(const Image& img, const DogParams& p) {
  if (p.levels < 3) throw Error(ErrorCode::InvalidArgument, "DoG needs >= 3 levels");
  if (!(p.scale_step > 1.0) || !(p.sigma_min > 0.0))
    throw Error(ErrorCode::InvalidArgument, "invalid DoG scale parameters");
  if (std::min(img.width(), img.height()) < 8)
    throw Error(ErrorCode::TooSmall, "image smaller than one descriptor support");
  const int w = img.width(), h = img.height();

  std::vector<double> sigmas(p.levels + 1);
  std::vector<Image> gauss;
  gauss.reserve(sigmas.size());
  for (int i = 0; i <= p.levels; ++i) {
    sigmas[i] = p.sigma_min * std::pow(p.scale_step, i);
    const double prev = i == 0 ? std::min(p.pre_sigma, p.sigma_min) : sigmas[i - 1];
    const double inc = std::sqrt(sigmas[i] * sigmas[i] - prev * prev);
    gauss.push_back(gaussian_blur(i == 0 ? img : gauss.back(), inc));
  }
  std::vector<Image> dog;
  dog.reserve(p.levels);
  for (int i = 0; i < p.levels; ++i) {
    Image d(w, h);
    for (std::size_t k = 0; k < d.size(); ++k)
      d.values()[k] = gauss[i + 1].values()[k] - gauss[i].values()[k];
    dog.push_back(std::move(d));
  }

  const double edge_limit = (p.edge_ratio + 1.0) * (p.edge_ratio + 1.0) / p.edge_ratio;
  std::vector<Keypoint> out;
  for (int s = 1; s + 1 < p.levels; ++s) {
    const Image& d = dog[s];
    for (int v = 1; v < h - 1; ++v)
      for (int u = 1; u < w - 1; ++u) {
        const double x = d(u, v);
        if (std::abs(x) < p.contrast_threshold) continue;
        bool is_max = true, is_min = true;
        for (int ds = -1; ds <= 1 && (is_max || is_min); ++ds)
          for (int dv = -1; dv <= 1; ++dv)
            for (int du = -1; du <= 1; ++du) {
              if (ds == 0 && dv == 0 && du == 0) continue;
              const double y = dog[s + ds](u + du, v + dv);
              if (y >= x) is_max = false;
              if (y <= x) is_min = false;
            }
        if (!is_max && !is_min) continue;

        const double dxx = d(u + 1, v) + d(u - 1, v) - 2.0 * x;
        const double dyy = d(u, v + 1) + d(u, v - 1) - 2.0 * x;
        const double dxy = 0.25 * (d(u + 1, v + 1) - d(u + 1, v - 1) -
                                   d(u - 1, v + 1) + d(u - 1, v - 1));
        const double tr = dxx + dyy, det = dxx * dyy - dxy * dxy;
        if (det <= 0.0 || tr * tr / det >= edge_limit) continue;

        const double ou = parabola_peak(d(u - 1, v), x, d(u + 1, v));
        const double ov = parabola_peak(d(u, v - 1), x, d(u, v + 1));
        const double os = parabola_peak(dog[s - 1](u, v), x, dog[s + 1](u, v));
        const double sigma = sigmas[s] * std::pow(p.scale_step, os);
        out.push_back({u + ou, v + ov, p.size_factor * sigma, 0.0});
      }
  }
  return out;
}

std::vector<double> principal_orientations(const GradientField& f,
                                           const Keypoint& kp,
                                           const OrientationParams& p) {
  if (p.bins < 3 || p.max_peaks < 1)
    throw Error(ErrorCode::InvalidArgument, "invalid orientation parameters");
  const double side = p.support_factor * kp.base_size;
  const OrientationHistogram h =
      pooled_histogram(f, {kp.u, kp.v}, 0.5 * side, SpatialKernel(0.25 * side),
                       CircularKernel(default_bandwidth(p.bins)), p.bins);
  if (!(h.total_mass > 0.0)) return {};

  const int n = h.size();
  const double top = *std::max_element(h.bins.begin(), h.bins.end());
  struct Peak {
    double height;
    double angle;
  };
  std::vector<Peak> peaks;
  for (int b = 0; b < n; ++b) {
    const double left = h.bins[(b + n - 1) % n], mid = h.bins[b],
                 right = h.bins[(b + 1) % n];
    if (!(mid > left && mid >= right) || mid < p.peak_ratio * top) continue;
    const double offset = parabola_peak(left, mid, right);
    peaks.push_back({mid, wrap_positive(kTwoPi * (b + offset) / n)});
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.height != b.height) return a.height > b.height;
    return a.angle < b.angle;
  });
  std::vector<double> out;
  for (const Peak& pk : peaks) {
    if (static_cast<int>(out.size()) == p.max_peaks) break;
    out.push_back(pk.angle);
  }
  return out;
}

}  // namespace orbitpool
