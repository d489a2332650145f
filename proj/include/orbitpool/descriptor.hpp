/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "orbitpool/image.hpp"
#include "orbitpool/orientation_stats.hpp"

namespace orbitpool {

struct Keypoint {
  double u = 0.0;
  double v = 0.0;
  double base_size = 1.0;    // sigma_0, pixels
  double orientation = 0.0;  // canonical reference, radians
};

/// Discrete measure over domain-size multipliers. Samples are kept sorted by
/// multiplier with duplicates merged and weights summing to one.
class SizePrior {
 public:
  struct Sample {
    double multiplier;
    double weight;
  };

  explicit SizePrior(std::vector<Sample> samples);

  static SizePrior delta(double multiplier = 1.0);
  static SizePrior uniform(std::vector<double> multipliers);
  /// Uniform over {0.7, 0.85, 1.0, 1.15, 1.3}.
  static SizePrior standard();

  const std::vector<Sample>& samples() const noexcept { return samples_; }
  double max_multiplier() const noexcept { return samples_.back().multiplier; }

 private:
  std::vector<Sample> samples_;
};

struct DescriptorConfig {
  int cells = 4;                  // C, cells per side
  int bins = 8;                   // B
  double bandwidth = 0.0;         // epsilon_alpha; <= 0 selects 2 pi / B
  double spatial_fraction = 0.5;  // spatial sigma = fraction * cell width
  double support_factor = 3.0;    // window side = factor * sigma_0 * lambda

  double effective_bandwidth() const {
    return bandwidth > 0.0 ? bandwidth : default_bandwidth(bins);
  }
  std::size_t length() const {
    return static_cast<std::size_t>(cells) * cells * bins;
  }
};

struct Descriptor {
  int cells = 0;
  int bins = 0;
  std::vector<double> values;
  bool degenerate = false;
  Keypoint keypoint;
};

enum class Metric { Euclidean, Bhattacharyya };

// Keypoint detection.

struct GridParams {
  int stride = 16;
  double base_size = 4.0;
  double margin = -1.0;  // < 0: use base_size
};

struct DogParams {
  int levels = 6;                   // number of difference-of-Gaussian layers
  double sigma_min = 1.6;
  double scale_step = 1.2599210498948732;  // 2^(1/3)
  double contrast_threshold = 0.008;
  double edge_ratio = 10.0;
  double size_factor = 4.0;         // sigma_0 = size_factor * detection sigma
  double pre_sigma = 0.5;           // assumed blur already present in the input
};

std::vector<Keypoint> detect_grid(const Image& img, const GridParams& p);
std::vector<Keypoint> detect_dog(const Image& img, const DogParams& p);

struct OrientationParams {
  int max_peaks = 2;
  int bins = 36;
  double peak_ratio = 0.8;
  double support_factor = 3.0;  // window side = factor * sigma_0
};

/// Principal orientations of the keypoint's support, strongest first (ties by
/// angle). Empty for flat support.
std::vector<double> principal_orientations(const GradientField& f,
                                           const Keypoint& kp,
                                           const OrientationParams& p = {});

// Descriptors.

/// True when every cell's pooling disk lies inside the field.
bool support_fits(const GradientField& f, const Keypoint& kp, double side,
                  const DescriptorConfig& cfg);

/// Un-normalized C x C x B cell histograms (cell-major, row by row in the
/// keypoint frame) for a window of side `side`.
std::vector<double> cell_histograms(const GradientField& f, const Keypoint& kp,
                                    double side, const DescriptorConfig& cfg);

/// l1-normalizes raw cell histograms into a descriptor.
Descriptor finalize_descriptor(std::vector<double> raw, const Keypoint& kp,
                               const DescriptorConfig& cfg);

Descriptor single_size_descriptor(const GradientField& f, const Keypoint& kp,
                                  double side, const DescriptorConfig& cfg = {});

/// Weighted average over sizes lambda * sigma_0 * support_factor of the raw
/// cell histograms, normalized once.
std::vector<double> dsp_cell_histograms(const GradientField& f,
                                        const Keypoint& kp,
                                        const SizePrior& prior,
                                        const DescriptorConfig& cfg);
Descriptor dsp_descriptor(const GradientField& f, const Keypoint& kp,
                          const SizePrior& prior,
                          const DescriptorConfig& cfg = {});

double bhattacharyya_affinity(std::span<const double> a,
                              std::span<const double> b);
double descriptor_distance(std::span<const double> a, std::span<const double> b,
                           Metric metric);
inline double descriptor_distance(const Descriptor& a, const Descriptor& b,
                                  Metric metric) {
  return descriptor_distance(a.values, b.values, metric);
}

std::string to_string(Metric m);
Metric parse_metric(const std::string& name);

/// Header "# cells=C,bins=B,metric=..." then one row per descriptor:
/// u,v,sigma0,alpha,degenerate,values...
void write_descriptors_csv(std::ostream& out,
                           const std::vector<Descriptor>& descriptors,
                           const DescriptorConfig& cfg, Metric metric);

}  // namespace orbitpool
