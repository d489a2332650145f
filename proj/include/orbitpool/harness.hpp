/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "orbitpool/descriptor.hpp"
#include "orbitpool/image.hpp"
#include "orbitpool/scattering.hpp"

namespace orbitpool {

// mt19937_64 with hand-rolled uniform/normal transforms: the standard
// distributions are implementation-defined, the engine is not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// splitmix64-style combination for deriving per-item seeds.
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b);

  double uniform();                      // [0,1)
  double uniform(double lo, double hi);  // [lo,hi)
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class TextureKind { Ramp, Checkerboard, FilteredNoise, Blobs };

Image make_texture(TextureKind kind, int size, std::uint64_t seed);
/// `count` seeded textures cycling through noise, blobs and checkerboards.
std::vector<Image> procedural_bases(int count, int size, std::uint64_t seed);

struct Rect {
  int u0 = 0, v0 = 0, width = 0, height = 0;
  bool contains(double u, double v) const {
    return u >= u0 && v >= v0 && u < u0 + width && v < v0 + height;
  }
};

enum class ContrastKind { None, Affine, Gamma };

struct SynthSpec {
  double scale_min = 1.0;
  double scale_max = 1.0;
  std::vector<double> scales;  // if nonempty: one pair per base per scale
  double rotation_min = 0.0;
  double rotation_max = 0.0;
  std::vector<ContrastKind> contrasts{ContrastKind::None};
  double occlusion = 0.0;  // occluder area fraction in [0, 0.5]
};

struct SyntheticPair {
  int id = 0;
  Image reference;
  Image transformed;
  SimilarityTransform ground_truth;  // reference -> transformed, about the center
  ContrastMap contrast = ContrastMap::identity();
  std::optional<Rect> occluder;
  Mask covisible;  // on the transformed image

  Point2 project(Point2 ref) const { return ground_truth.apply(ref, reference.center()); }
};

std::vector<SyntheticPair> synth_pairs(std::span<const Image> bases,
                                       const SynthSpec& spec, std::uint64_t seed);

void save_pair(const SyntheticPair& pair, const std::filesystem::path& dir);
SyntheticPair load_pair(const std::filesystem::path& dir);
/// Loads every pair_* subdirectory in name order.
std::vector<SyntheticPair> load_pairs(const std::filesystem::path& dir);
/// Every PGM/PPM/PNG file in name order.
std::vector<Image> load_bases(const std::filesystem::path& dir);

enum class DescriptorKind { Sift, DspSift, Scattering, DspScattering };
std::string to_string(DescriptorKind k);
DescriptorKind parse_kind(const std::string& name);

struct MatchConfig {
  DogParams dog;
  OrientationParams orientation;
  DescriptorConfig descriptor;
  SizePrior dsp_prior = SizePrior::standard();
  FilterBankParams bank;
  ScatterConfig scatter;
  double pre_sigma = 1.0;
  Metric metric = Metric::Euclidean;
  double ratio = 0.8;
  double radius = 3.0;
};

struct Feature {
  Keypoint keypoint;
  std::vector<double> values;
};

/// DoG keypoints, principal orientations, then descriptors of the requested
/// kind. Keypoints whose largest pooled support leaves the image are dropped
/// for both the single-size and pooled variants of a family.
std::vector<Feature> extract_features(const Image& img, DescriptorKind kind,
                                      const MatchConfig& cfg,
                                      const FilterBank& bank);

struct DescribeOptions {
  DescriptorKind kind = DescriptorKind::DspSift;
  bool use_dog = false;
  bool assign_orientation = false;  // grid keypoints keep alpha = 0 otherwise
  GridParams grid;
  MatchConfig settings;
};

struct DescribedImage {
  std::vector<Descriptor> descriptors;
  std::vector<ScatteringVector> scattering;  // scattering kinds only
};

/// Descriptors at grid or DoG keypoints; keypoints whose support does not fit
/// are skipped.
DescribedImage describe_image(const Image& img, const DescribeOptions& opts);

struct MatchRecord {
  std::size_t query = 0;
  std::size_t match = 0;
  Point2 query_pos;
  Point2 match_pos;
  Point2 projected;
  double distance = 0.0;
  double ratio = 1.0;
  bool query_covisible = false;
  bool match_covisible = false;
  bool correct = false;
};

struct MatchResult {
  std::vector<MatchRecord> records;
  std::size_t queries = 0;
  std::size_t valid_queries = 0;    // projection lands on co-visible pixels
  std::size_t correspondences = 0;  // valid queries with a target within radius
  bool warning = false;             // no features on one side
};

MatchResult match_features(const SyntheticPair& pair,
                           const std::vector<Feature>& reference,
                           const std::vector<Feature>& transformed,
                           const MatchConfig& cfg);
MatchResult match_pair(const SyntheticPair& pair, DescriptorKind kind,
                       const MatchConfig& cfg);
MatchResult match_pair(const SyntheticPair& pair, DescriptorKind kind,
                       const MatchConfig& cfg, const FilterBank& bank);

struct PrecisionRecall {
  double threshold = 0.0;
  std::size_t accepted = 0;
  std::size_t correct = 0;
  double precision = 0.0;
  double recall = 0.0;
};

/// Ratio-test sweep 0.60, 0.65, ..., 0.95.
std::vector<double> ratio_thresholds();
PrecisionRecall precision_recall(const MatchResult& m, double threshold);
/// Area under the step precision/recall curve traced by the thresholds.
double average_precision(const std::vector<PrecisionRecall>& curve);

struct PairRecord {
  int pair = 0;
  DescriptorKind kind = DescriptorKind::Sift;
  std::vector<PrecisionRecall> curve;
  std::size_t valid_queries = 0;
  std::size_t correspondences = 0;
  double ap = 0.0;
  bool warning = false;
};

struct KindSummary {
  DescriptorKind kind = DescriptorKind::Sift;
  double map = 0.0;
  bool flagged = false;  // every pair produced an empty match list
  std::vector<PrecisionRecall> pooled;  // summed over pairs
};

struct EvalReport {
  std::vector<PairRecord> records;  // ordered by (pair, kind)
  std::vector<KindSummary> summary;
  double runtime_seconds = 0.0;

  const KindSummary& summary_for(DescriptorKind k) const;
};

EvalReport evaluate(std::span<const SyntheticPair> pairs,
                    std::span<const DescriptorKind> kinds,
                    const MatchConfig& cfg, std::size_t threads = 0);

/// Header "pair,kind,threshold,precision,recall".
void write_report_csv(std::ostream& out, const EvalReport& report);
void write_report_csv(const EvalReport& report, const std::filesystem::path& path);
/// kind,map,flagged,precision@ratio,recall@ratio
void write_summary_csv(std::ostream& out, const EvalReport& report, double ratio);

}  // namespace orbitpool
