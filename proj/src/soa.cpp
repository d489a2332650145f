/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "orbitpool/soa.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <regex>

#include "orbitpool/csv.hpp"

namespace orbitpool {

namespace {

constexpr double kPerturbRotation = 0.1;
constexpr double kPerturbLogScale = 0.1;

std::vector<AntiAliasSample> standard_perturbations() {
  std::vector<AntiAliasSample> out;
  for (int r = -1; r <= 1; ++r)
    for (int s = -1; s <= 1; ++s) {
      SimilarityTransform g;
      g.rotation = r * kPerturbRotation;
      g.scale = std::exp(s * kPerturbLogScale);
      out.push_back({g, 1.0});
    }
  return out;
}

GroupSampleSet grid_set(int rotations, int scales, bool anti_alias) {
  if (rotations < 1 || scales < 1)
    throw Error(ErrorCode::InvalidArgument, "sample grid needs >= 1 rotation and scale");
  GroupSampleSet set;
  for (int r = 0; r < rotations; ++r)
    for (int s = 0; s < scales; ++s) {
      SimilarityTransform g;
      g.rotation = kTwoPi * r / rotations;
      const double t = scales == 1 ? 0.0 : -0.5 + static_cast<double>(s) / (scales - 1);
      g.scale = std::exp2(t);
      set.add(g, anti_alias ? standard_perturbations() : std::vector<AntiAliasSample>{});
    }
  return set;
}

}  // namespace

void GroupSampleSet::add(const SimilarityTransform& sample,
                         std::vector<AntiAliasSample> anti_alias) {
  if (!(sample.scale > 0.0))
    throw Error(ErrorCode::InvalidArgument, "group sample scale must be > 0");
  if (anti_alias.empty()) anti_alias.push_back({SimilarityTransform::identity(), 1.0});
  double total = 0.0;
  for (const auto& a : anti_alias) {
    if (!(a.weight >= 0.0) || !(a.perturbation.scale > 0.0))
      throw Error(ErrorCode::InvalidArgument, "anti-alias weights must be >= 0");
    total += a.weight;
  }
  if (!(total > 0.0))
    throw Error(ErrorCode::InvalidArgument, "anti-alias weights sum to zero");
  for (auto& a : anti_alias) a.weight /= total;
  entries_.push_back({sample, std::move(anti_alias)});
}

GroupSampleSet GroupSampleSet::rotations(int n) { return grid_set(n, 1, false); }

GroupSampleSet GroupSampleSet::standard() { return grid_set(4, 3, true); }

GroupSampleSet GroupSampleSet::parse(const std::string& spec) {
  if (spec == "standard" || spec == "default") return standard();
  static const std::regex re(R"(rot(\d+)(?:x(\d+))?(:aa)?)");
  std::smatch m;
  if (!std::regex_match(spec, m, re))
    throw Error(ErrorCode::InvalidArgument, "unknown sample spec: " + spec);
  const int rotations = std::stoi(m[1]);
  const int scales = m[2].matched ? std::stoi(m[2]) : 1;
  return grid_set(rotations, scales, m[3].matched);
}

std::vector<double> warped_raw_descriptor(const Image& x, const Keypoint& kp,
                                          const SimilarityTransform& g,
                                          const TemplateConfig& cfg) {
  const WarpResult w = warp(x, g);
  const Point2 p = g.apply({kp.u, kp.v}, x.center());
  Keypoint moved = kp;
  moved.u = p.u;
  moved.v = p.v;
  const double side = kp.base_size * cfg.descriptor.support_factor;
  const GradientField f = compute_gradients(w.image, cfg.pre_sigma);
  if (!support_fits(f, moved, side, cfg.descriptor))
    throw Error(ErrorCode::OutOfBounds, "warped descriptor support leaves the image");
  // Every pixel feeding the pooling disks, pre-smoothing taps and the central
  // difference included, must come from inside the warp's domain.
  const int cells = cfg.descriptor.cells;
  const double corner_cell = (0.5 - 0.5 / cells) * side * std::sqrt(2.0);
  const double reach = corner_cell + 3.0 * cfg.descriptor.spatial_fraction * side / cells +
                       std::ceil(3.0 * cfg.pre_sigma) + 1.0;
  for (int v = static_cast<int>(std::ceil(p.v - reach)); v <= static_cast<int>(p.v + reach); ++v)
    for (int u = static_cast<int>(std::ceil(p.u - reach)); u <= static_cast<int>(p.u + reach); ++u) {
      const double du = u - p.u, dv = v - p.v;
      if (du * du + dv * dv > reach * reach) continue;
      if (!w.mask.at(u, v))
        throw Error(ErrorCode::OutOfBounds, "warped support leaves the warp domain");
    }
  return cell_histograms(f, moved, side, cfg.descriptor);
}

TemplateModel build_template(const Image& x, const Keypoint& kp,
                             const GroupSampleSet& samples,
                             const TemplateConfig& cfg, std::string source) {
  if (samples.size() == 0)
    throw Error(ErrorCode::InvalidArgument, "template needs at least one sample");
  TemplateModel t;
  t.source = std::move(source);
  t.keypoint = kp;
  t.config = cfg;
  for (const auto& entry : samples.entries()) {
    std::vector<double> pooled(cfg.descriptor.length(), 0.0);
    for (const auto& aa : entry.anti_alias) {
      const auto raw = warped_raw_descriptor(x, kp, entry.sample * aa.perturbation, cfg);
      for (std::size_t i = 0; i < raw.size(); ++i) pooled[i] += aa.weight * raw[i];
    }
    t.samples.push_back(entry.sample);
    t.descriptors.push_back(finalize_descriptor(std::move(pooled), kp, cfg.descriptor));
  }
  return t;
}

Descriptor query_descriptor(const Image& y, const Keypoint& kp,
                            const TemplateConfig& cfg) {
  const GradientField f = compute_gradients(y, cfg.pre_sigma);
  return single_size_descriptor(f, kp, kp.base_size * cfg.descriptor.support_factor,
                                cfg.descriptor);
}

double anti_aliased_score(const TemplateModel& t, std::size_t i,
                          const Descriptor& y, Metric metric) {
  if (i >= t.descriptors.size())
    throw Error(ErrorCode::OutOfBounds, "template sample index out of range");
  const auto& d = t.descriptors[i].values;
  if (metric == Metric::Bhattacharyya) return bhattacharyya_affinity(d, y.values);
  return -descriptor_distance(d, y.values, Metric::Euclidean);
}

SOAResult soa_likelihood(const TemplateModel& t, const Descriptor& y,
                         Metric metric) {
  if (t.descriptors.empty())
    throw Error(ErrorCode::InvalidArgument, "empty template");
  SOAResult r;
  for (std::size_t i = 0; i < t.descriptors.size(); ++i) {
    r.scores.push_back(anti_aliased_score(t, i, y, metric));
    if (i == 0 || r.scores[i] > r.value) {
      r.value = r.scores[i];
      r.argmax = i;
    }
  }
  return r;
}

void save_template(std::ostream& out, const TemplateModel& t) {
  const auto& c = t.config;
  out << "# orbitpool-template,N=" << t.descriptors.size()
      << ",metric=" << to_string(c.metric) << ",cells=" << c.descriptor.cells
      << ",bins=" << c.descriptor.bins
      << ",bandwidth=" << csv::num(c.descriptor.bandwidth)
      << ",spatial_fraction=" << csv::num(c.descriptor.spatial_fraction)
      << ",support_factor=" << csv::num(c.descriptor.support_factor)
      << ",pre_sigma=" << csv::num(c.pre_sigma) << ",u=" << csv::num(t.keypoint.u)
      << ",v=" << csv::num(t.keypoint.v) << ",base_size=" << csv::num(t.keypoint.base_size)
      << ",orientation=" << csv::num(t.keypoint.orientation) << ",source=" << t.source
      << '\n';
  out << "index,scale,rotation,tx,ty,degenerate,values...\n";
  for (std::size_t i = 0; i < t.descriptors.size(); ++i) {
    const auto& g = t.samples[i];
    out << i << ',' << csv::num(g.scale) << ',' << csv::num(g.rotation) << ','
        << csv::num(g.tx) << ',' << csv::num(g.ty) << ','
        << (t.descriptors[i].degenerate ? 1 : 0);
    for (double x : t.descriptors[i].values) out << ',' << csv::num(x);
    out << '\n';
  }
}

TemplateModel load_template(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# orbitpool-template", 0) != 0)
    throw Error(ErrorCode::UnsupportedFormat, "missing template header");
  std::map<std::string, std::string> kv;
  for (const auto& field : csv::split(line.substr(2))) {
    const auto eq = field.find('=');
    if (eq != std::string::npos) kv[field.substr(0, eq)] = field.substr(eq + 1);
  }
  auto number = [&](const char* key) {
    const auto it = kv.find(key);
    if (it == kv.end())
      throw Error(ErrorCode::UnsupportedFormat, std::string("template header lacks ") + key);
    return std::stod(it->second);
  };

  TemplateModel t;
  try {
    t.config.metric = parse_metric(kv["metric"]);
    t.config.descriptor.cells = static_cast<int>(number("cells"));
    t.config.descriptor.bins = static_cast<int>(number("bins"));
    t.config.descriptor.bandwidth = number("bandwidth");
    t.config.descriptor.spatial_fraction = number("spatial_fraction");
    t.config.descriptor.support_factor = number("support_factor");
    t.config.pre_sigma = number("pre_sigma");
    t.keypoint = {number("u"), number("v"), number("base_size"), number("orientation")};
    t.source = kv["source"];
    const auto n = static_cast<std::size_t>(number("N"));
    std::getline(in, line);  // column names
    const std::size_t len = t.config.descriptor.length();
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::getline(in, line))
        throw Error(ErrorCode::UnsupportedFormat, "template truncated");
      const auto f = csv::split(line);
      if (f.size() != 6 + len)
        throw Error(ErrorCode::UnsupportedFormat, "template row has wrong length");
      t.samples.push_back({std::stod(f[1]), std::stod(f[2]), std::stod(f[3]), std::stod(f[4])});
      Descriptor d;
      d.cells = t.config.descriptor.cells;
      d.bins = t.config.descriptor.bins;
      d.degenerate = f[5] == "1";
      d.keypoint = t.keypoint;
      for (std::size_t k = 0; k < len; ++k) d.values.push_back(std::stod(f[6 + k]));
      t.descriptors.push_back(std::move(d));
    }
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::UnsupportedFormat, "malformed number in template");
  }
  return t;
}

}  // namespace orbitpool
