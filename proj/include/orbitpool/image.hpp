/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "orbitpool/error.hpp"

namespace orbitpool {

/// Gradient magnitudes below this (luminance per pixel) carry no orientation.
inline constexpr double kMagEpsilon = 1e-4;

struct Point2 {
  double u = 0.0;
  double v = 0.0;
};

/// Row-major luminance grid. Loaded images live in [0,1]; buffers produced by
/// the unclipped contrast path may leave that range.
class Image {
 public:
  Image() = default;
  Image(int width, int height, double fill = 0.0);
  Image(int width, int height, std::vector<double> values);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double operator()(int u, int v) const { return values_[index(u, v)]; }
  double& operator()(int u, int v) { return values_[index(u, v)]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  Point2 center() const noexcept {
    return {0.5 * (width_ - 1), 0.5 * (height_ - 1)};
  }
  bool contains(double u, double v) const noexcept {
    return u >= 0.0 && v >= 0.0 && u <= width_ - 1 && v <= height_ - 1;
  }
  bool in_unit_range() const noexcept;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int u, int v) const noexcept {
    return static_cast<std::size_t>(v) * width_ + u;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

/// Per-pixel boolean flag grid (co-visibility, warp domain).
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, bool fill);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool operator()(int u, int v) const {
    return flags_[static_cast<std::size_t>(v) * width_ + u] != 0;
  }
  void set(int u, int v, bool on) {
    flags_[static_cast<std::size_t>(v) * width_ + u] = on ? 1 : 0;
  }
  /// Nearest-pixel lookup; false outside the grid.
  bool at(double u, double v) const noexcept;
  std::size_t count() const noexcept;

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> flags_;
};

struct GradientField {
  int width = 0;
  int height = 0;
  std::vector<double> magnitude;
  std::vector<double> orientation;  // radians in [0, 2pi)
  std::vector<std::uint8_t> valid;

  std::size_t index(int u, int v) const noexcept {
    return static_cast<std::size_t>(v) * width + u;
  }
  bool is_valid(int u, int v) const noexcept { return valid[index(u, v)] != 0; }
};

/// Planar similarity acting about a center c: p -> c + s R(theta) (p - c) + t.
struct SimilarityTransform {
  double scale = 1.0;
  double rotation = 0.0;
  double tx = 0.0;
  double ty = 0.0;

  static SimilarityTransform identity() { return {}; }

  /// (a * b)(p) = a(b(p)).
  friend SimilarityTransform operator*(const SimilarityTransform& a,
                                       const SimilarityTransform& b);
  SimilarityTransform inverse() const;
  Point2 apply(Point2 p, Point2 center) const;
};

class ContrastMap {
 public:
  enum class Kind { Affine, Gamma, Table };

  static ContrastMap identity() { return affine(1.0, 0.0); }
  static ContrastMap affine(double gain, double offset);
  static ContrastMap gamma(double exponent);
  /// Piecewise-linear through entries placed at equally spaced inputs on [0,1].
  static ContrastMap table(std::vector<double> entries);

  Kind kind() const noexcept { return kind_; }
  double gain() const noexcept { return a_; }
  double offset() const noexcept { return b_; }
  double exponent() const noexcept { return a_; }
  const std::vector<double>& entries() const noexcept { return table_; }

  /// Unclipped scalar map.
  double operator()(double value) const;

 private:
  ContrastMap(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_ = Kind::Affine;
  double a_ = 1.0;
  double b_ = 0.0;
  std::vector<double> table_;
};

struct WarpResult {
  Image image;
  Mask mask;  // false where the source sample fell outside the input
};

// I/O. PGM (P5/P2), PPM (P6) and 8-bit PNG are read; RGB is reduced with
// Rec.601 weights.
Image load_image(const std::filesystem::path& path);
void write_pgm(const Image& img, const std::filesystem::path& path);
void write_pgm(const Mask& mask, const std::filesystem::path& path);
Mask load_mask(const std::filesystem::path& path);

/// Separable Gaussian, radius ceil(3 sigma), mirrored borders. Output is
/// clamped to the input's value range, which for loaded images is [0,1].
Image gaussian_blur(const Image& img, double sigma);
std::vector<double> gaussian_taps(double sigma);

GradientField compute_gradients(const Image& img, double pre_sigma = 1.0,
                                double mag_epsilon = kMagEpsilon);

WarpResult warp(const Image& img, const SimilarityTransform& g);

Image apply_contrast(const Image& img, const ContrastMap& c);
Image apply_contrast_unclipped(const Image& img, const ContrastMap& c);

double bilinear(const Image& img, double u, double v);

}  // namespace orbitpool
