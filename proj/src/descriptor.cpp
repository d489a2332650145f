/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "orbitpool/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "orbitpool/csv.hpp"

namespace orbitpool {

namespace {

constexpr double kAffinityFloor = 1e-12;

struct CellLayout {
  int cells;
  double sigma;
  double reach;
  std::vector<Point2> centers;  // image coordinates
};

CellLayout layout_cells(const Keypoint& kp, double side,
                        const DescriptorConfig& cfg) {
  if (!(side > 0.0)) throw Error(ErrorCode::InvalidArgument, "window side must be > 0");
  if (cfg.cells < 1 || cfg.bins < 1)
    throw Error(ErrorCode::InvalidArgument, "cells and bins must be >= 1");
  CellLayout l;
  l.cells = cfg.cells;
  l.sigma = cfg.spatial_fraction * side / cfg.cells;
  l.reach = 3.0 * l.sigma;
  const double c = std::cos(kp.orientation), s = std::sin(kp.orientation);
  for (int cy = 0; cy < cfg.cells; ++cy)
    for (int cx = 0; cx < cfg.cells; ++cx) {
      const double lx = ((cx + 0.5) / cfg.cells - 0.5) * side;
      const double ly = ((cy + 0.5) / cfg.cells - 0.5) * side;
      l.centers.push_back({kp.u + c * lx - s * ly, kp.v + s * lx + c * ly});
    }
  return l;
}

bool layout_fits(const CellLayout& l, int width, int height) {
  for (const Point2& p : l.centers)
    if (p.u - l.reach < 0.0 || p.v - l.reach < 0.0 ||
        p.u + l.reach > width - 1 || p.v + l.reach > height - 1)
      return false;
  return true;
}

}  // namespace

SizePrior::SizePrior(std::vector<Sample> samples) {
  if (samples.empty())
    throw Error(ErrorCode::InvalidArgument, "size prior needs at least one sample");
  std::map<double, double> merged;
  double total = 0.0;
  for (const Sample& s : samples) {
    if (!(s.multiplier > 0.0) || !(s.weight >= 0.0) || !std::isfinite(s.weight))
      throw Error(ErrorCode::InvalidArgument,
                  "size prior needs multipliers > 0 and weights >= 0");
    merged[s.multiplier] += s.weight;
    total += s.weight;
  }
  if (!(total > 0.0))
    throw Error(ErrorCode::InvalidArgument, "size prior weights sum to zero");
  for (const auto& [m, w] : merged) samples_.push_back({m, w / total});
}

SizePrior SizePrior::delta(double multiplier) {
  return SizePrior({{multiplier, 1.0}});
}

SizePrior SizePrior::uniform(std::vector<double> multipliers) {
  std::vector<Sample> s;
  for (double m : multipliers) s.push_back({m, 1.0});
  return SizePrior(std::move(s));
}

SizePrior SizePrior::standard() {
  return uniform({0.7, 0.85, 1.0, 1.15, 1.3});
}

bool support_fits(const GradientField& f, const Keypoint& kp, double side,
                  const DescriptorConfig& cfg) {
  return layout_fits(layout_cells(kp, side, cfg), f.width, f.height);
}

std::vector<double> cell_histograms(const GradientField& f, const Keypoint& kp,
                                    double side, const DescriptorConfig& cfg) {
  const CellLayout l = layout_cells(kp, side, cfg);
  if (!layout_fits(l, f.width, f.height))
    throw Error(ErrorCode::OutOfBounds, "descriptor support leaves the image");

  const int bins = cfg.bins;
  const SpatialKernel spatial(l.sigma);
  const CircularKernel kernel(cfg.effective_bandwidth());
  std::vector<double> raw(cfg.length(), 0.0);

  double u0 = f.width, u1 = 0.0, v0 = f.height, v1 = 0.0;
  for (const Point2& p : l.centers) {
    u0 = std::min(u0, p.u - l.reach);
    u1 = std::max(u1, p.u + l.reach);
    v0 = std::min(v0, p.v - l.reach);
    v1 = std::max(v1, p.v + l.reach);
  }
  const double r2 = l.reach * l.reach;
  std::vector<double> votes(bins);
  for (int v = static_cast<int>(std::ceil(v0)); v <= static_cast<int>(std::floor(v1)); ++v)
    for (int u = static_cast<int>(std::ceil(u0)); u <= static_cast<int>(std::floor(u1)); ++u) {
      const auto i = f.index(u, v);
      if (!f.valid[i]) continue;
      bool voted = false;
      for (std::size_t c = 0; c < l.centers.size(); ++c) {
        const double du = u - l.centers[c].u, dv = v - l.centers[c].v;
        if (du * du + dv * dv > r2) continue;
        const double w = spatial(du, dv) * f.magnitude[i];
        if (w == 0.0) continue;
        if (!voted) {
          for (int b = 0; b < bins; ++b)
            votes[b] = kernel(kp.orientation + kTwoPi * b / bins - f.orientation[i]);
          voted = true;
        }
        double* cell = raw.data() + c * bins;
        for (int b = 0; b < bins; ++b) cell[b] += w * votes[b];
      }
    }
  return raw;
}

Descriptor finalize_descriptor(std::vector<double> raw, const Keypoint& kp,
                               const DescriptorConfig& cfg) {
  Descriptor d;
  d.cells = cfg.cells;
  d.bins = cfg.bins;
  d.keypoint = kp;
  double sum = 0.0;
  for (double x : raw) sum += x;
  if (!(sum > 0.0)) {
    std::fill(raw.begin(), raw.end(), 1.0 / static_cast<double>(raw.size()));
    d.degenerate = true;
  } else {
    for (double& x : raw) x /= sum;
  }
  d.values = std::move(raw);
  return d;
}

Descriptor single_size_descriptor(const GradientField& f, const Keypoint& kp,
                                  double side, const DescriptorConfig& cfg) {
  return finalize_descriptor(cell_histograms(f, kp, side, cfg), kp, cfg);
}

std::vector<double> dsp_cell_histograms(const GradientField& f,
                                        const Keypoint& kp,
                                        const SizePrior& prior,
                                        const DescriptorConfig& cfg) {
  std::string offending;
  for (const auto& s : prior.samples()) {
    const double side = s.multiplier * kp.base_size * cfg.support_factor;
    if (!support_fits(f, kp, side, cfg))
      offending += (offending.empty() ? "" : ", ") + csv::num(s.multiplier);
  }
  if (!offending.empty())
    throw Error(ErrorCode::OutOfBounds,
                "descriptor support leaves the image at size multipliers: " + offending);

  std::vector<double> pooled(cfg.length(), 0.0);
  for (const auto& s : prior.samples()) {
    const double side = s.multiplier * kp.base_size * cfg.support_factor;
    const auto raw = cell_histograms(f, kp, side, cfg);
    for (std::size_t i = 0; i < raw.size(); ++i) pooled[i] += s.weight * raw[i];
  }
  return pooled;
}

Descriptor dsp_descriptor(const GradientField& f, const Keypoint& kp,
                          const SizePrior& prior, const DescriptorConfig& cfg) {
  return finalize_descriptor(dsp_cell_histograms(f, kp, prior, cfg), kp, cfg);
}

double bhattacharyya_affinity(std::span<const double> a,
                              std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::InvalidArgument, "descriptor length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::sqrt(a[i] * b[i]);
  return s;
}

double descriptor_distance(std::span<const double> a, std::span<const double> b,
                           Metric metric) {
  if (a.size() != b.size())
    throw Error(ErrorCode::InvalidArgument, "descriptor length mismatch");
  if (metric == Metric::Bhattacharyya)
    return std::max(0.0, -std::log(std::max(bhattacharyya_affinity(a, b), kAffinityFloor)));
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::string to_string(Metric m) {
  return m == Metric::Euclidean ? "euclidean" : "bhattacharyya";
}

Metric parse_metric(const std::string& name) {
  if (name == "euclidean") return Metric::Euclidean;
  if (name == "bhattacharyya") return Metric::Bhattacharyya;
  throw Error(ErrorCode::InvalidArgument, "unknown metric: " + name);
}

void write_descriptors_csv(std::ostream& out,
                           const std::vector<Descriptor>& descriptors,
                           const DescriptorConfig& cfg, Metric metric) {
  out << "# cells=" << cfg.cells << ",bins=" << cfg.bins
      << ",metric=" << to_string(metric) << '\n';
  for (const Descriptor& d : descriptors) {
    out << csv::num(d.keypoint.u) << ',' << csv::num(d.keypoint.v) << ','
        << csv::num(d.keypoint.base_size) << ',' << csv::num(d.keypoint.orientation)
        << ',' << (d.degenerate ? 1 : 0);
    for (double x : d.values) out << ',' << csv::num(x);
    out << '\n';
  }
}

}  // namespace orbitpool
