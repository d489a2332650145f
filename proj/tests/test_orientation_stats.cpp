/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "orbitpool/orientation_stats.hpp"

using namespace orbitpool;
using oracle::kPi;

namespace {

Image ramp(int n, double gu, double gv) {
  Image img(n, n);
  for (int v = 0; v < n; ++v)
    for (int u = 0; u < n; ++u) img(u, v) = 0.2 + gu * u + gv * v;
  return img;
}

Image textured(int n, unsigned seed) { return gaussian_blur(oracle::uniform_noise(n, n, seed), 1.5); }

}  // namespace

TEST_CASE("wrapped gaussian has unit mass") {
  for (double eps : {0.05, 0.2, 0.3, 0.785, 1.0}) {
    const CircularKernel k(eps);
    const int n = 20000;
    double mass = 0.0;
    for (int i = 0; i < n; ++i) mass += k(2 * kPi * i / n);
    mass *= 2 * kPi / n;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("five wraps agree with fifty") {
  for (double eps : {0.1, 0.3, 0.6, 1.0})
    for (double d = -4.0; d <= 4.0; d += 0.173) {
      const CircularKernel k(eps);
      CHECK(std::abs(k(d) - oracle::wrapped_gaussian(d, eps, 50)) < 1e-12);
    }
  CHECK(CircularKernel(0.3)(kPi / 4) ==
        doctest::Approx(oracle::wrapped_gaussian(kPi / 4, 0.3, 50)).epsilon(1e-6));
}

TEST_CASE("kernel symmetry, periodicity and mode") {
  const CircularKernel k(0.4);
  for (double d : {0.1, 1.0, 2.5, 3.1}) {
    CHECK(k(d) == doctest::Approx(k(-d)).epsilon(1e-14));
    CHECK(k(d) == doctest::Approx(k(d + 2 * kPi)).epsilon(1e-12));
    CHECK(k(0.0) >= k(d));
  }
  CHECK(k(kPi) == doctest::Approx(k(-kPi)).epsilon(1e-14));
  CHECK_THROWS_AS(CircularKernel(0.0), Error);
}

TEST_CASE("pixel likelihood") {
  const GradientField flat = compute_gradients(Image(12, 12, 0.5));
  const CircularKernel k(0.2);
  CHECK(pixel_likelihood(flat, 5, 5, 0.0, k) == 0.0);

  const GradientField f = compute_gradients(ramp(24, 0.01, 0.0));
  const auto i = f.index(12, 12);
  const double m = f.magnitude[i];
  REQUIRE(f.valid[i]);
  CHECK(pixel_likelihood(f, 12, 12, f.orientation[i], k) == doctest::Approx(k(0.0) * m));
  // By hand: the nearest branches of the wrapped Gaussian at pi/2.
  double hand = 0.0;
  for (int w = -1; w <= 1; ++w) {
    const double x = kPi / 2 + 2 * kPi * w;
    hand += std::exp(-x * x / (2 * 0.2 * 0.2));
  }
  hand *= m / (0.2 * std::sqrt(2 * kPi));
  CHECK(pixel_likelihood(f, 12, 12, f.orientation[i] + kPi / 2, k) ==
        doctest::Approx(hand).epsilon(1e-12));
  CHECK_THROWS_AS(pixel_likelihood(f, 24, 0, 0.0, k), Error);
}

TEST_CASE("flat window pools to zero mass") {
  const GradientField f = compute_gradients(Image(30, 30, 0.3));
  const auto h = pooled_histogram(f, {15, 15}, 8, SpatialKernel(3), CircularKernel(0.5), 8);
  CHECK(h.total_mass == 0.0);
  for (double b : h.bins) CHECK(b == 0.0);
  const auto n = normalize(h);
  CHECK(n.degenerate);
  for (double b : n.bins) CHECK(b == doctest::Approx(1.0 / 8));
}

TEST_CASE("ramp window concentrates in bin zero with symmetric leakage") {
  const GradientField f = compute_gradients(ramp(40, 0.01, 0.0));
  const auto h = pooled_histogram(f, {20, 20}, 9, SpatialKernel(3), CircularKernel(2 * kPi / 8), 8);
  CHECK(std::max_element(h.bins.begin(), h.bins.end()) - h.bins.begin() == 0);
  CHECK(h.bins[1] == doctest::Approx(h.bins[7]).epsilon(1e-12));
  CHECK(h.bins[2] == doctest::Approx(h.bins[6]).epsilon(1e-12));
  CHECK(h.bins[0] > h.bins[1]);
  double sum = 0.0;
  for (double b : h.bins) sum += b;
  CHECK(h.total_mass == doctest::Approx(sum).epsilon(1e-15));
}

TEST_CASE("orthogonal ramps split evenly and match the brute-force oracle") {
  const GradientField f = compute_gradients(ramp(40, 0.01, 0.01));
  const double eps = 0.5;
  const auto h = pooled_histogram(f, {19.5, 20.0}, 7.5, SpatialKernel(2.5), CircularKernel(eps), 4);
  CHECK(h.bins[0] == doctest::Approx(h.bins[1]).epsilon(1e-6));
  const auto ref = oracle::brute_histogram(f, 19.5, 20.0, 7.5, 2.5, eps, 4);
  for (int b = 0; b < 4; ++b) CHECK(h.bins[b] == doctest::Approx(ref[b]).epsilon(1e-12));
}

TEST_CASE("pooled histogram agrees with the oracle on texture with a reference offset") {
  const GradientField f = compute_gradients(textured(48, 2));
  for (double ref_angle : {0.0, 0.7, 4.0}) {
    const auto h = pooled_histogram(f, {23.3, 25.8}, 10.0, SpatialKernel(2.7), CircularKernel(0.6),
                                    12, ref_angle);
    const auto o = oracle::brute_histogram(f, 23.3, 25.8, 10.0, 2.7, 0.6, 12, ref_angle);
    for (int b = 0; b < 12; ++b) CHECK(h.bins[b] == doctest::Approx(o[b]).epsilon(1e-12));
  }
}

TEST_CASE("pooled histogram clips at borders and rejects outside windows") {
  const GradientField f = compute_gradients(textured(20, 3));
  const auto h = pooled_histogram(f, {1, 1}, 6, SpatialKernel(2), CircularKernel(0.5), 8);
  const auto o = oracle::brute_histogram(f, 1, 1, 6, 2, 0.5, 8);
  for (int b = 0; b < 8; ++b) CHECK(h.bins[b] == doctest::Approx(o[b]).epsilon(1e-12));
  CHECK_THROWS_AS(pooled_histogram(f, {-30, 5}, 4, SpatialKernel(2), CircularKernel(0.5), 8), Error);
}

TEST_CASE("normalize arithmetic and idempotence") {
  OrientationHistogram h;
  h.bins = {2, 2, 4};
  const auto n = normalize(h);
  CHECK(n.bins[0] == doctest::Approx(0.25));
  CHECK(n.bins[2] == doctest::Approx(0.5));
  CHECK_FALSE(n.degenerate);
  OrientationHistogram scaled = h;
  for (double& b : scaled.bins) b *= 37.5;
  const auto ns = normalize(scaled);
  for (int b = 0; b < 3; ++b) CHECK(ns.bins[b] == doctest::Approx(n.bins[b]).epsilon(1e-15));
  const auto nn = normalize(n);
  for (int b = 0; b < 3; ++b) CHECK(nn.bins[b] == doctest::Approx(n.bins[b]).epsilon(1e-15));
  OrientationHistogram zero;
  zero.bins = {0, 0, 0, 0};
  const auto z = normalize(zero);
  CHECK(z.degenerate);
  CHECK(normalize(z).degenerate);
}

TEST_CASE("normalized histogram is invariant to affine contrast") {
  for (unsigned seed = 10; seed < 14; ++seed) {
    const Image x = oracle::conditioned_texture(40, seed);
    const GradientField f = compute_gradients(x);
    REQUIRE(oracle::min_valid_magnitude(f) > 4 * kMagEpsilon);
    const auto h0 = normalize(pooled_histogram(f, {20, 20}, 12, SpatialKernel(4), CircularKernel(0.785), 8));
    for (double a : {0.5, 2.0})
      for (double b : {-0.1, 0.1}) {
        const GradientField g = compute_gradients(apply_contrast_unclipped(x, ContrastMap::affine(a, b)));
        const auto h1 = normalize(pooled_histogram(g, {20, 20}, 12, SpatialKernel(4), CircularKernel(0.785), 8));
        CHECK(oracle::max_rel_diff(h0.bins, h1.bins) < 1e-6);
      }
  }
}

TEST_CASE("monotone contrast keeps the argmax bin") {
  // A smooth oriented pattern: magnitudes stay well above the validity floor.
  Image x(40, 40);
  for (int v = 0; v < 40; ++v)
    for (int u = 0; u < 40; ++u) x(u, v) = 0.5 + 0.3 * std::sin(0.15 * u + 0.06 * v);
  const GradientField f = compute_gradients(x);
  const auto argmax = [](const OrientationHistogram& h) {
    return std::max_element(h.bins.begin(), h.bins.end()) - h.bins.begin();
  };
  const auto h0 = pooled_histogram(f, {20, 20}, 9, SpatialKernel(3), CircularKernel(0.785), 8);
  for (double gamma : {0.5, 2.0}) {
    const GradientField g = compute_gradients(apply_contrast(x, ContrastMap::gamma(gamma)));
    const auto h1 = pooled_histogram(g, {20, 20}, 9, SpatialKernel(3), CircularKernel(0.785), 8);
    CHECK(argmax(h1) == argmax(h0));
  }
}

TEST_CASE("quarter-turn rotation shifts four bins by one") {
  const Image x = textured(41, 21);
  SimilarityTransform q;
  q.rotation = kPi / 2;
  const Image y = warp(x, q).image;
  const GradientField fx = compute_gradients(x), fy = compute_gradients(y);
  const auto hx = pooled_histogram(fx, {20, 20}, 12, SpatialKernel(4), CircularKernel(0.9), 4);
  const auto hy = pooled_histogram(fy, {20, 20}, 12, SpatialKernel(4), CircularKernel(0.9), 4);
  for (int b = 0; b < 4; ++b)
    CHECK(hy.bins[(b + 1) % 4] == doctest::Approx(hx.bins[b]).epsilon(1e-6));
}

TEST_CASE("spatial kernel is a truncated density") {
  const SpatialKernel s(4.0);
  double sum = 0.0;
  for (int v = -20; v <= 20; ++v)
    for (int u = -20; u <= 20; ++u) sum += s(u, v);
  CHECK(sum == doctest::Approx(1.0 - std::exp(-4.5)).epsilon(1e-2));
  CHECK(s(12.1, 0) == 0.0);
  CHECK(s(0, 0) == doctest::Approx(1.0 / (2 * kPi * 16)));
}

TEST_CASE("histogram csv dump") {
  OrientationHistogram h;
  h.bins = {0.5, 0.25, 0.25};
  std::ostringstream out;
  write_histograms_csv(out, {{{1.5, 2.0}, h}});
  const std::string s = out.str();
  CHECK(s == "1.5,2,0.5,0.25,0.25\n");
}
