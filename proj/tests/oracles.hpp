/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

// Slow, obviously-correct reference computations used to cross-check the
// library. Nothing here calls into the code it is meant to verify beyond the
// plain data types.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include "orbitpool/descriptor.hpp"
#include "orbitpool/harness.hpp"
#include "orbitpool/image.hpp"
#include "orbitpool/scattering.hpp"

namespace oracle {

using orbitpool::GradientField;
using orbitpool::Image;
using orbitpool::Keypoint;

constexpr double kPi = std::numbers::pi;

// dcb|abcd|cba
inline int reflect101(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

// Full 2-D Gaussian summation, no clamping.
inline Image direct_blur(const Image& img, double sigma) {
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  double total = 0.0;
  for (int dv = -r; dv <= r; ++dv)
    for (int du = -r; du <= r; ++du)
      total += std::exp(-(du * du + dv * dv) / (2.0 * sigma * sigma));
  Image out(img.width(), img.height());
  for (int v = 0; v < img.height(); ++v)
    for (int u = 0; u < img.width(); ++u) {
      double acc = 0.0;
      for (int dv = -r; dv <= r; ++dv)
        for (int du = -r; du <= r; ++du)
          acc += std::exp(-(du * du + dv * dv) / (2.0 * sigma * sigma)) *
                 img(reflect101(u + du, img.width()), reflect101(v + dv, img.height()));
      out(u, v) = acc / total;
    }
  return out;
}

inline double wrapped_gaussian(double delta, double eps, int wraps) {
  double s = 0.0;
  for (int k = -wraps; k <= wraps; ++k) {
    const double x = delta + 2.0 * kPi * k;
    s += std::exp(-x * x / (2.0 * eps * eps));
  }
  return s / (eps * std::sqrt(2.0 * kPi));
}

inline double spatial_weight(double du, double dv, double sigma) {
  const double r2 = du * du + dv * dv;
  if (r2 > 9.0 * sigma * sigma) return 0.0;
  return std::exp(-r2 / (2.0 * sigma * sigma)) / (2.0 * kPi * sigma * sigma);
}

// Every pixel of the field, no window bookkeeping.
inline std::vector<double> brute_histogram(const GradientField& f, double cu, double cv,
                                           double radius, double sigma, double eps,
                                           int bins, double reference = 0.0) {
  std::vector<double> h(bins, 0.0);
  for (int v = 0; v < f.height; ++v)
    for (int u = 0; u < f.width; ++u) {
      const double du = u - cu, dv = v - cv;
      if (du * du + dv * dv > radius * radius) continue;
      const auto i = f.index(u, v);
      if (!f.valid[i]) continue;
      for (int b = 0; b < bins; ++b) {
        double d = std::remainder(reference + 2.0 * kPi * b / bins - f.orientation[i], 2.0 * kPi);
        h[b] += spatial_weight(du, dv, sigma) * f.magnitude[i] * wrapped_gaussian(d, eps, 50);
      }
    }
  return h;
}

// One brute-force histogram per cell.
inline std::vector<double> brute_cells(const GradientField& f, const Keypoint& kp, double side,
                                       const orbitpool::DescriptorConfig& cfg) {
  const double sigma = cfg.spatial_fraction * side / cfg.cells;
  const double c = std::cos(kp.orientation), s = std::sin(kp.orientation);
  std::vector<double> out;
  for (int cy = 0; cy < cfg.cells; ++cy)
    for (int cx = 0; cx < cfg.cells; ++cx) {
      const double lx = (cx + 0.5) * side / cfg.cells - side / 2;
      const double ly = (cy + 0.5) * side / cfg.cells - side / 2;
      const auto h = brute_histogram(f, kp.u + c * lx - s * ly, kp.v + s * lx + c * ly,
                                     3.0 * sigma, sigma, cfg.effective_bandwidth(), cfg.bins,
                                     kp.orientation);
      out.insert(out.end(), h.begin(), h.end());
    }
  return out;
}

// Explicitly padded half-sample mirror image, then a plain double loop.
inline std::vector<std::complex<double>> dense_convolve(const std::vector<double>& x, int w,
                                                        int h,
                                                        const orbitpool::ComplexKernel& k) {
  const int r = k.radius, pw = w + 2 * r, ph = h + 2 * r;
  auto mirror = [](int i, int n) {
    for (;;) {
      if (i < 0) i = -i - 1;
      else if (i >= n) i = 2 * n - 1 - i;
      else return i;
    }
  };
  std::vector<double> pad(static_cast<std::size_t>(pw) * ph);
  for (int v = 0; v < ph; ++v)
    for (int u = 0; u < pw; ++u)
      pad[static_cast<std::size_t>(v) * pw + u] =
          x[static_cast<std::size_t>(mirror(v - r, h)) * w + mirror(u - r, w)];
  std::vector<std::complex<double>> out(static_cast<std::size_t>(w) * h);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      std::complex<double> acc = 0.0;
      for (int dv = -r; dv <= r; ++dv)
        for (int du = -r; du <= r; ++du)
          acc += pad[static_cast<std::size_t>(v - dv + r) * pw + (u - du + r)] * k.at(du, dv);
      out[static_cast<std::size_t>(v) * w + u] = acc;
    }
  return out;
}

// cos(freq * (u cos t + v sin t)) scaled into [0.1, 0.9].
inline Image sinusoid(int side, double freq, double theta, double phase = 0.0) {
  Image img(side, side);
  for (int v = 0; v < side; ++v)
    for (int u = 0; u < side; ++u)
      img(u, v) = 0.5 + 0.4 * std::cos(freq * (u * std::cos(theta) + v * std::sin(theta)) + phase);
  return img;
}

inline Image uniform_noise(int w, int h, unsigned seed) {
  std::mt19937 rng(seed);
  Image img(w, h);
  for (double& x : img.values()) x = (rng() >> 8) * (1.0 / 16777216.0);
  return img;
}

inline std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * (i + j);
    i = j + 1;
  }
  return r;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return saa > 0.0 && sbb > 0.0 ? sab / std::sqrt(saa * sbb) : 0.0;
}

// Textured patch whose gradient magnitudes stay far from the validity floor,
// so contrast changes cannot flip any pixel's validity.
inline Image conditioned_texture(int n, unsigned seed) {
  Image img = orbitpool::gaussian_blur(uniform_noise(n, n, seed), 1.5);
  for (int v = 0; v < n; ++v)
    for (int u = 0; u < n; ++u) img(u, v) = 0.3 * img(u, v) + 0.02 * u + 0.01 * v;
  return img;
}

inline double min_valid_magnitude(const GradientField& f) {
  double m = 1e300;
  for (int v = 1; v + 1 < f.height; ++v)
    for (int u = 1; u + 1 < f.width; ++u) m = std::min(m, f.magnitude[f.index(u, v)]);
  return m;
}

// Mean Spearman correlation between the finest order-1 scattering
// coefficients and axial 8-bin orientation histograms of the same patch.
// The histogram mirrors the scattering operator: gradients pre-smoothed at the
// mother envelope width, weights from the low-pass, default 8-bin bandwidth.
inline double kinship_rho(const orbitpool::FilterBank& bank, int patches, std::uint64_t seed) {
  using namespace orbitpool;
  const int n = bank.params().patch_side;
  const double c = 0.5 * (n - 1);
  const int L = bank.rotations();
  double rho = 0.0;
  for (int p = 0; p < patches; ++p) {
    const Image x = make_texture(TextureKind::FilteredNoise, n, seed + p);
    const auto s = scatter(x, bank, 1);
    const std::vector<double> fine(s.order1.begin(), s.order1.begin() + L);
    const GradientField f = compute_gradients(x, bank.params().mother.sigma);
    const auto h = pooled_histogram(f, {c, c}, n, SpatialKernel(bank.lowpass_sigma()),
                                    CircularKernel(2 * kPi / L), 2 * L);
    std::vector<double> axial(L);
    for (int b = 0; b < L; ++b) axial[b] = h.bins[b] + h.bins[b + L];
    rho += spearman(fine, axial);
  }
  return rho / patches;
}

inline double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-300});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

}  // namespace oracle
