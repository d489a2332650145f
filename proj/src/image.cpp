/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "orbitpool/image.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace orbitpool {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSnap = 1e-9;

// Mirror index into [0, n) without repeating the edge sample.
int reflect(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

double snap(double x) {
  const double r = std::round(x);
  return std::abs(x - r) < kSnap ? r : x;
}

}  // namespace

Image::Image(int width, int height, double fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1)
    throw Error(ErrorCode::InvalidArgument, "image dimensions must be >= 1");
  values_.assign(static_cast<std::size_t>(width) * height, fill);
}

Image::Image(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width < 1 || height < 1)
    throw Error(ErrorCode::InvalidArgument, "image dimensions must be >= 1");
  if (values_.size() != static_cast<std::size_t>(width) * height)
    throw Error(ErrorCode::InvalidArgument,
                "value count does not match width*height");
  for (double x : values_)
    if (!std::isfinite(x))
      throw Error(ErrorCode::InvalidArgument, "non-finite pixel value");
}

bool Image::in_unit_range() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](double x) { return x >= 0.0 && x <= 1.0; });
}

Mask::Mask(int width, int height, bool fill) : width_(width), height_(height) {
  if (width < 1 || height < 1)
    throw Error(ErrorCode::InvalidArgument, "mask dimensions must be >= 1");
  flags_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

bool Mask::at(double u, double v) const noexcept {
  const long iu = std::lround(u);
  const long iv = std::lround(v);
  if (iu < 0 || iv < 0 || iu >= width_ || iv >= height_) return false;
  return (*this)(static_cast<int>(iu), static_cast<int>(iv));
}

std::size_t Mask::count() const noexcept {
  return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), 1));
}

SimilarityTransform operator*(const SimilarityTransform& a,
                              const SimilarityTransform& b) {
  const double c = std::cos(a.rotation), s = std::sin(a.rotation);
  SimilarityTransform out;
  out.scale = a.scale * b.scale;
  out.rotation = a.rotation + b.rotation;
  out.tx = a.scale * (c * b.tx - s * b.ty) + a.tx;
  out.ty = a.scale * (s * b.tx + c * b.ty) + a.ty;
  return out;
}

SimilarityTransform SimilarityTransform::inverse() const {
  if (!(scale > 0.0))
    throw Error(ErrorCode::InvalidArgument, "similarity scale must be > 0");
  const double c = std::cos(rotation), s = std::sin(rotation);
  SimilarityTransform out;
  out.scale = 1.0 / scale;
  out.rotation = -rotation;
  out.tx = -(c * tx + s * ty) / scale;
  out.ty = -(-s * tx + c * ty) / scale;
  return out;
}

Point2 SimilarityTransform::apply(Point2 p, Point2 center) const {
  const double c = std::cos(rotation), s = std::sin(rotation);
  const double du = p.u - center.u, dv = p.v - center.v;
  return {center.u + scale * (c * du - s * dv) + tx,
          center.v + scale * (s * du + c * dv) + ty};
}

ContrastMap ContrastMap::affine(double gain, double offset) {
  if (!(gain > 0.0) || !std::isfinite(offset))
    throw Error(ErrorCode::InvalidArgument, "affine contrast needs gain > 0");
  return ContrastMap(Kind::Affine, gain, offset);
}

ContrastMap ContrastMap::gamma(double exponent) {
  if (!(exponent > 0.0) || !std::isfinite(exponent))
    throw Error(ErrorCode::InvalidArgument, "gamma must be > 0");
  return ContrastMap(Kind::Gamma, exponent, 0.0);
}

ContrastMap ContrastMap::table(std::vector<double> entries) {
  if (entries.size() < 2)
    throw Error(ErrorCode::InvalidArgument,
                "monotone table needs at least 2 entries");
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (!(entries[i] >= entries[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "table must be nondecreasing");
  ContrastMap m(Kind::Table, 0.0, 0.0);
  m.table_ = std::move(entries);
  return m;
}

double ContrastMap::operator()(double x) const {
  switch (kind_) {
    case Kind::Affine:
      return a_ * x + b_;
    case Kind::Gamma:
      return std::pow(std::clamp(x, 0.0, 1.0), a_);
    case Kind::Table: {
      const double t = std::clamp(x, 0.0, 1.0) * (table_.size() - 1);
      const auto i = std::min(static_cast<std::size_t>(t), table_.size() - 2);
      const double f = t - static_cast<double>(i);
      return table_[i] + f * (table_[i + 1] - table_[i]);
    }
  }
  return x;
}

std::vector<double> gaussian_taps(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    taps[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
    sum += taps[k + radius];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

Image gaussian_blur(const Image& img, double sigma) {
  if (!(sigma >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "blur sigma must be >= 0");
  if (sigma == 0.0) return img;

  const auto taps = gaussian_taps(sigma);
  const int r = static_cast<int>(taps.size() / 2);
  const int w = img.width(), h = img.height();
  const auto [lo_it, hi_it] =
      std::minmax_element(img.values().begin(), img.values().end());
  const double lo = *lo_it, hi = *hi_it;

  Image tmp(w, h);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += taps[k + r] * img(reflect(u + k, w), v);
      tmp(u, v) = acc;
    }
  Image out(w, h);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += taps[k + r] * tmp(u, reflect(v + k, h));
      out(u, v) = std::clamp(acc, lo, hi);
    }
  return out;
}

GradientField compute_gradients(const Image& img, double pre_sigma,
                                double mag_epsilon) {
  if (img.width() < 3 || img.height() < 3)
    throw Error(ErrorCode::TooSmall, "gradients need an image of at least 3x3");
  const Image smooth = gaussian_blur(img, pre_sigma);
  const int w = img.width(), h = img.height();

  GradientField f;
  f.width = w;
  f.height = h;
  f.magnitude.assign(img.size(), 0.0);
  f.orientation.assign(img.size(), 0.0);
  f.valid.assign(img.size(), 0);
  for (int v = 1; v < h - 1; ++v)
    for (int u = 1; u < w - 1; ++u) {
      const double gu = 0.5 * (smooth(u + 1, v) - smooth(u - 1, v));
      const double gv = 0.5 * (smooth(u, v + 1) - smooth(u, v - 1));
      const double m = std::hypot(gu, gv);
      const auto i = f.index(u, v);
      f.magnitude[i] = m;
      if (m < mag_epsilon) continue;
      double a = std::atan2(gv, gu);
      if (a < 0.0) a += kTwoPi;
      if (a >= kTwoPi) a = 0.0;
      f.orientation[i] = a;
      f.valid[i] = 1;
    }
  return f;
}

double bilinear(const Image& img, double u, double v) {
  const int w = img.width(), h = img.height();
  u = std::clamp(u, 0.0, static_cast<double>(w - 1));
  v = std::clamp(v, 0.0, static_cast<double>(h - 1));
  const int u0 = std::min(static_cast<int>(u), w - 1);
  const int v0 = std::min(static_cast<int>(v), h - 1);
  const int u1 = std::min(u0 + 1, w - 1), v1 = std::min(v0 + 1, h - 1);
  const double fu = u - u0, fv = v - v0;
  if (fu == 0.0 && fv == 0.0) return img(u0, v0);
  const double top = (1.0 - fu) * img(u0, v0) + fu * img(u1, v0);
  const double bot = (1.0 - fu) * img(u0, v1) + fu * img(u1, v1);
  return (1.0 - fv) * top + fv * bot;
}

WarpResult warp(const Image& img, const SimilarityTransform& g) {
  if (!(g.scale > 0.0))
    throw Error(ErrorCode::InvalidArgument, "warp scale must be > 0");
  const SimilarityTransform inv = g.inverse();
  const Point2 c = img.center();
  const int w = img.width(), h = img.height();

  WarpResult out{Image(w, h), Mask(w, h, false)};
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      const Point2 src = inv.apply({double(u), double(v)}, c);
      const double su = snap(src.u), sv = snap(src.v);
      if (!img.contains(su, sv)) continue;
      out.image(u, v) = bilinear(img, su, sv);
      out.mask.set(u, v, true);
    }
  return out;
}

Image apply_contrast_unclipped(const Image& img, const ContrastMap& c) {
  std::vector<double> values(img.values().begin(), img.values().end());
  for (double& x : values) x = c(x);
  return Image(img.width(), img.height(), std::move(values));
}

Image apply_contrast(const Image& img, const ContrastMap& c) {
  Image out = apply_contrast_unclipped(img, c);
  for (double& x : out.values()) x = std::clamp(x, 0.0, 1.0);
  return out;
}

}  // namespace orbitpool
