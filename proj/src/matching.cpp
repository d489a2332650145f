/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <cmath>
#include <limits>
#include <optional>

#include "orbitpool/harness.hpp"

namespace orbitpool {

std::string to_string(DescriptorKind k) {
  switch (k) {
    case DescriptorKind::Sift: return "sift";
    case DescriptorKind::DspSift: return "dsp-sift";
    case DescriptorKind::Scattering: return "sc";
    case DescriptorKind::DspScattering: return "dsp-sc";
  }
  return "?";
}

DescriptorKind parse_kind(const std::string& name) {
  if (name == "sift") return DescriptorKind::Sift;
  if (name == "dsp-sift") return DescriptorKind::DspSift;
  if (name == "sc") return DescriptorKind::Scattering;
  if (name == "dsp-sc") return DescriptorKind::DspScattering;
  throw Error(ErrorCode::InvalidArgument, "unknown descriptor kind: " + name);
}

std::vector<Feature> extract_features(const Image& img, DescriptorKind kind,
                                      const MatchConfig& cfg,
                                      const FilterBank& bank) {
  const GradientField f = compute_gradients(img, cfg.pre_sigma);
  const bool scattering =
      kind == DescriptorKind::Scattering || kind == DescriptorKind::DspScattering;
  const bool pooled = kind == DescriptorKind::DspSift || kind == DescriptorKind::DspScattering;
  const double sf = scattering ? cfg.scatter.support_factor : cfg.descriptor.support_factor;
  const double widest = cfg.dsp_prior.max_multiplier();
  const SizePrior single = SizePrior::delta(1.0);

  std::vector<Feature> out;
  for (const Keypoint& kp : detect_dog(img, cfg.dog)) {
    for (double alpha : principal_orientations(f, kp, cfg.orientation)) {
      Keypoint k = kp;
      k.orientation = alpha;
      const double side = widest * k.base_size * sf;
      if (scattering ? !patch_fits(img, k, side) : !support_fits(f, k, side, cfg.descriptor))
        continue;
      Feature feat{k, {}};
      if (scattering) {
        const auto s = dsp_scatter(img, k, pooled ? cfg.dsp_prior : single, bank, cfg.scatter);
        feat.values = scattering_descriptor(s, k).values;
      } else {
        feat.values = pooled ? dsp_descriptor(f, k, cfg.dsp_prior, cfg.descriptor).values
                             : single_size_descriptor(f, k, k.base_size * sf, cfg.descriptor).values;
      }
      out.push_back(std::move(feat));
    }
  }
  return out;
}

MatchResult match_features(const SyntheticPair& pair,
                           const std::vector<Feature>& reference,
                           const std::vector<Feature>& transformed,
                           const MatchConfig& cfg) {
  MatchResult r;
  r.queries = reference.size();
  if (reference.empty() || transformed.empty()) {
    r.warning = true;
    return r;
  }
  const double r2 = cfg.radius * cfg.radius;
  for (std::size_t q = 0; q < reference.size(); ++q) {
    const Keypoint& qk = reference[q].keypoint;
    double best = std::numeric_limits<double>::infinity(), second = best;
    std::size_t best_index = 0;
    for (std::size_t t = 0; t < transformed.size(); ++t) {
      const double d = descriptor_distance(reference[q].values, transformed[t].values, cfg.metric);
      if (d < best) {
        second = best;
        best = d;
        best_index = t;
      } else if (d < second) {
        second = d;
      }
    }
    MatchRecord m;
    m.query = q;
    m.match = best_index;
    m.query_pos = {qk.u, qk.v};
    const Keypoint& tk = transformed[best_index].keypoint;
    m.match_pos = {tk.u, tk.v};
    m.projected = pair.project(m.query_pos);
    m.distance = best;
    if (std::isinf(second))
      m.ratio = 0.0;
    else
      m.ratio = second > 0.0 ? best / second : 1.0;
    m.query_covisible = pair.covisible.at(m.projected.u, m.projected.v);
    m.match_covisible = pair.covisible.at(m.match_pos.u, m.match_pos.v);
    const double du = m.match_pos.u - m.projected.u, dv = m.match_pos.v - m.projected.v;
    m.correct = m.query_covisible && m.match_covisible && du * du + dv * dv <= r2;

    if (m.query_covisible) {
      ++r.valid_queries;
      for (const Feature& t : transformed) {
        const double eu = t.keypoint.u - m.projected.u, ev = t.keypoint.v - m.projected.v;
        if (eu * eu + ev * ev <= r2 && pair.covisible.at(t.keypoint.u, t.keypoint.v)) {
          ++r.correspondences;
          break;
        }
      }
    }
    r.records.push_back(m);
  }
  return r;
}

MatchResult match_pair(const SyntheticPair& pair, DescriptorKind kind,
                       const MatchConfig& cfg, const FilterBank& bank) {
  const auto ref = extract_features(pair.reference, kind, cfg, bank);
  const auto trans = extract_features(pair.transformed, kind, cfg, bank);
  return match_features(pair, ref, trans, cfg);
}

MatchResult match_pair(const SyntheticPair& pair, DescriptorKind kind,
                       const MatchConfig& cfg) {
  const bool scattering =
      kind == DescriptorKind::Scattering || kind == DescriptorKind::DspScattering;
  FilterBankParams params = cfg.bank;
  if (!scattering) params.scales = 1;  // unused; keep construction cheap
  return match_pair(pair, kind, cfg, FilterBank(params));
}

}  // namespace orbitpool

namespace orbitpool {

DescribedImage describe_image(const Image& img, const DescribeOptions& opts) {
  const MatchConfig& cfg = opts.settings;
  const bool scattering = opts.kind == DescriptorKind::Scattering ||
                          opts.kind == DescriptorKind::DspScattering;
  const bool pooled =
      opts.kind == DescriptorKind::DspSift || opts.kind == DescriptorKind::DspScattering;
  const SizePrior prior = pooled ? cfg.dsp_prior : SizePrior::delta(1.0);
  const double sf = scattering ? cfg.scatter.support_factor : cfg.descriptor.support_factor;
  const GradientField f = compute_gradients(img, cfg.pre_sigma);
  std::optional<FilterBank> bank;
  if (scattering) bank.emplace(cfg.bank);

  const auto keypoints = opts.use_dog ? detect_dog(img, cfg.dog) : detect_grid(img, opts.grid);
  DescribedImage out;
  for (const Keypoint& kp : keypoints) {
    std::vector<double> orientations{kp.orientation};
    if (opts.use_dog || opts.assign_orientation)
      orientations = principal_orientations(f, kp, cfg.orientation);
    for (double alpha : orientations) {
      Keypoint k = kp;
      k.orientation = alpha;
      const double side = prior.max_multiplier() * k.base_size * sf;
      if (scattering ? !patch_fits(img, k, side) : !support_fits(f, k, side, cfg.descriptor))
        continue;
      if (scattering) {
        out.scattering.push_back(dsp_scatter(img, k, prior, *bank, cfg.scatter));
        out.descriptors.push_back(scattering_descriptor(out.scattering.back(), k));
      } else {
        out.descriptors.push_back(dsp_descriptor(f, k, prior, cfg.descriptor));
      }
    }
  }
  return out;
}

}  // namespace orbitpool
