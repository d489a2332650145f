/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "orbitpool/descriptor.hpp"
#include "orbitpool/image.hpp"

namespace orbitpool {

struct AntiAliasSample {
  SimilarityTransform perturbation;
  double weight = 1.0;
};

/// Finite samples g_i of the nuisance group, each carrying a discrete
/// anti-aliasing measure over perturbations g (weights sum to one).
class GroupSampleSet {
 public:
  struct Entry {
    SimilarityTransform sample;
    std::vector<AntiAliasSample> anti_alias;
  };

  GroupSampleSet() = default;

  /// Adds g_i with the given perturbations; weights are normalized. An empty
  /// list means a delta at the identity.
  void add(const SimilarityTransform& sample,
           std::vector<AntiAliasSample> anti_alias = {});

  std::size_t size() const noexcept { return entries_.size(); }
  const Entry& operator[](std::size_t i) const { return entries_.at(i); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  /// The n rotations by 2 pi k / n, delta anti-aliasing.
  static GroupSampleSet rotations(int n);
  /// 4 rotations x 3 scales {2^-1/2, 1, 2^1/2} (rotation-major), each with a
  /// uniform 3x3 grid of perturbations (rotation +-0.1 rad, log-scale +-0.1).
  static GroupSampleSet standard();
  /// "rot<N>", "standard", or "rot<N>x<S>" (N rotations, S log-spaced scales
  /// spanning 2^-1/2..2^1/2), optionally suffixed ":aa" for the standard
  /// 3x3 perturbation grid.
  static GroupSampleSet parse(const std::string& spec);

 private:
  std::vector<Entry> entries_;
};

struct TemplateConfig {
  DescriptorConfig descriptor;
  double pre_sigma = 1.0;
  Metric metric = Metric::Bhattacharyya;
};

struct TemplateModel {
  std::string source;
  Keypoint keypoint;
  TemplateConfig config;
  std::vector<SimilarityTransform> samples;
  std::vector<Descriptor> descriptors;  // one per sample
};

struct SOAResult {
  double value = 0.0;
  std::size_t argmax = 0;  // zero-based; smallest index on ties
  std::vector<double> scores;
};

/// Descriptor of x warped by g (about the image center) at the warped
/// keypoint position, keeping the keypoint's size and reference orientation.
std::vector<double> warped_raw_descriptor(const Image& x, const Keypoint& kp,
                                          const SimilarityTransform& g,
                                          const TemplateConfig& cfg);

TemplateModel build_template(const Image& x, const Keypoint& kp,
                             const GroupSampleSet& samples,
                             const TemplateConfig& cfg = {},
                             std::string source = {});

/// Descriptor of an untransformed query at kp under the template's settings.
Descriptor query_descriptor(const Image& y, const Keypoint& kp,
                            const TemplateConfig& cfg);

/// Bhattacharyya affinity, or negative Euclidean distance.
double anti_aliased_score(const TemplateModel& t, std::size_t i,
                          const Descriptor& y, Metric metric);

SOAResult soa_likelihood(const TemplateModel& t, const Descriptor& y,
                         Metric metric);

void save_template(std::ostream& out, const TemplateModel& t);
TemplateModel load_template(std::istream& in);

}  // namespace orbitpool
