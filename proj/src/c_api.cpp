/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "orbitpool/orbitpool.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "orbitpool/csv.hpp"
#include "orbitpool/harness.hpp"
#include "orbitpool/parallel.hpp"
#include "orbitpool/soa.hpp"

struct op_image {
  orbitpool::Image image;
};

struct op_features {
  orbitpool::DescriptorKind kind;
  orbitpool::DescriptorConfig config;
  orbitpool::DescribedImage described;
};

struct op_template {
  orbitpool::TemplateModel model;
};

struct op_report {
  orbitpool::EvalReport report;
};

namespace {

using orbitpool::Error;
using orbitpool::ErrorCode;

thread_local std::string last_error;

op_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return OP_ERR_INVALID_ARGUMENT;
    case ErrorCode::NotFound: return OP_ERR_NOT_FOUND;
    case ErrorCode::UnsupportedFormat: return OP_ERR_UNSUPPORTED_FORMAT;
    case ErrorCode::Io: return OP_ERR_IO;
    case ErrorCode::OutOfBounds: return OP_ERR_OUT_OF_BOUNDS;
    case ErrorCode::TooSmall: return OP_ERR_TOO_SMALL;
  }
  return OP_ERR_INTERNAL;
}

template <class F>
op_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return OP_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return OP_ERR_INTERNAL;
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

// "-" is stdout; anything else is truncated and written.
template <class F>
void with_output(const char* path, F&& write) {
  require(path != nullptr, "null output path");
  if (std::string(path) == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, std::string("cannot open for writing: ") + path);
  write(out);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, std::string("write failed: ") + path);
}

orbitpool::DescriptorKind to_kind(op_kind k) {
  switch (k) {
    case OP_KIND_SIFT: return orbitpool::DescriptorKind::Sift;
    case OP_KIND_DSP_SIFT: return orbitpool::DescriptorKind::DspSift;
    case OP_KIND_SC: return orbitpool::DescriptorKind::Scattering;
    case OP_KIND_DSP_SC: return orbitpool::DescriptorKind::DspScattering;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown descriptor kind");
}

op_kind from_kind(orbitpool::DescriptorKind k) {
  switch (k) {
    case orbitpool::DescriptorKind::Sift: return OP_KIND_SIFT;
    case orbitpool::DescriptorKind::DspSift: return OP_KIND_DSP_SIFT;
    case orbitpool::DescriptorKind::Scattering: return OP_KIND_SC;
    case orbitpool::DescriptorKind::DspScattering: return OP_KIND_DSP_SC;
  }
  return OP_KIND_SIFT;
}

std::vector<orbitpool::ContrastKind> parse_contrasts(const char* list) {
  std::vector<orbitpool::ContrastKind> out;
  if (list == nullptr || *list == '\0') return {orbitpool::ContrastKind::None};
  for (const std::string& name : orbitpool::csv::split(list, ',')) {
    if (name == "none") out.push_back(orbitpool::ContrastKind::None);
    else if (name == "affine") out.push_back(orbitpool::ContrastKind::Affine);
    else if (name == "gamma") out.push_back(orbitpool::ContrastKind::Gamma);
    else throw Error(ErrorCode::InvalidArgument, "unknown contrast kind: " + name);
  }
  return out;
}

}  // namespace

extern "C" {

const char* op_version(void) { return "0.1.0"; }

const char* op_last_error(void) { return last_error.c_str(); }

const char* op_status_name(op_status status) {
  switch (status) {
    case OP_OK: return "ok";
    case OP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case OP_ERR_NOT_FOUND: return "not found";
    case OP_ERR_UNSUPPORTED_FORMAT: return "unsupported format";
    case OP_ERR_IO: return "i/o error";
    case OP_ERR_OUT_OF_BOUNDS: return "out of bounds";
    case OP_ERR_TOO_SMALL: return "too small";
    case OP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

op_status op_kind_parse(const char* name, op_kind* out) {
  return guarded([&] {
    require(name != nullptr && out != nullptr, "null argument");
    *out = from_kind(orbitpool::parse_kind(name));
  });
}

const char* op_kind_name(op_kind kind) {
  switch (kind) {
    case OP_KIND_SIFT: return "sift";
    case OP_KIND_DSP_SIFT: return "dsp-sift";
    case OP_KIND_SC: return "sc";
    case OP_KIND_DSP_SC: return "dsp-sc";
  }
  return "?";
}

op_status op_image_load(const char* path, op_image** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    *out = new op_image{orbitpool::load_image(path)};
  });
}

op_status op_image_create(int width, int height, const double* values, op_image** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    require(width > 0 && height > 0, "image dimensions must be positive");
    *out = nullptr;
    orbitpool::Image img(width, height);
    if (values != nullptr)
      std::copy(values, values + img.values().size(), img.values().begin());
    *out = new op_image{std::move(img)};
  });
}

void op_image_free(op_image* image) { delete image; }

int op_image_width(const op_image* image) { return image ? image->image.width() : 0; }

int op_image_height(const op_image* image) { return image ? image->image.height() : 0; }

const double* op_image_data(const op_image* image) {
  return image ? image->image.values().data() : nullptr;
}

op_status op_image_write_pgm(const op_image* image, const char* path) {
  return guarded([&] {
    require(image != nullptr && path != nullptr, "null argument");
    orbitpool::write_pgm(image->image, path);
  });
}

void op_describe_options_init(op_describe_options* opts) {
  if (opts == nullptr) return;
  const orbitpool::GridParams grid;
  const orbitpool::DescriptorConfig cfg;
  opts->kind = OP_KIND_DSP_SIFT;
  opts->detector = OP_DETECT_GRID;
  opts->grid_stride = grid.stride;
  opts->base_size = grid.base_size;
  opts->assign_orientation = 0;
  opts->sizes = nullptr;
  opts->n_sizes = 0;
  opts->cells = cfg.cells;
  opts->bins = cfg.bins;
}

op_status op_describe(const op_image* image, const op_describe_options* opts, op_features** out) {
  return guarded([&] {
    require(image != nullptr && opts != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    require(opts->cells > 0 && opts->bins > 0, "cells and bins must be positive");
    require(opts->grid_stride > 0 && opts->base_size > 0, "grid stride and size must be positive");
    orbitpool::DescribeOptions d;
    d.kind = to_kind(opts->kind);
    d.use_dog = opts->detector == OP_DETECT_DOG;
    d.assign_orientation = opts->assign_orientation != 0;
    d.grid.stride = opts->grid_stride;
    d.grid.base_size = opts->base_size;
    d.settings.descriptor.cells = opts->cells;
    d.settings.descriptor.bins = opts->bins;
    if (opts->sizes != nullptr && opts->n_sizes > 0)
      d.settings.dsp_prior = orbitpool::SizePrior::uniform(
          std::vector<double>(opts->sizes, opts->sizes + opts->n_sizes));
    auto features = std::make_unique<op_features>();
    features->kind = d.kind;
    features->config = d.settings.descriptor;
    features->described = orbitpool::describe_image(image->image, d);
    *out = features.release();
  });
}

void op_features_free(op_features* features) { delete features; }

size_t op_features_count(const op_features* features) {
  return features ? features->described.descriptors.size() : 0;
}

size_t op_features_dim(const op_features* features) {
  if (features == nullptr || features->described.descriptors.empty()) return 0;
  return features->described.descriptors.front().values.size();
}

op_status op_features_keypoint(const op_features* features, size_t index, double* u, double* v,
                               double* size, double* orientation, int* degenerate) {
  return guarded([&] {
    require(features != nullptr, "null argument");
    const auto& all = features->described.descriptors;
    if (index >= all.size()) throw Error(ErrorCode::OutOfBounds, "feature index out of range");
    const auto& d = all[index];
    if (u) *u = d.keypoint.u;
    if (v) *v = d.keypoint.v;
    if (size) *size = d.keypoint.base_size;
    if (orientation) *orientation = d.keypoint.orientation;
    if (degenerate) *degenerate = d.degenerate ? 1 : 0;
  });
}

const double* op_features_values(const op_features* features, size_t index) {
  if (features == nullptr || index >= features->described.descriptors.size()) return nullptr;
  return features->described.descriptors[index].values.data();
}

op_status op_features_write_csv(const op_features* features, const char* path) {
  return guarded([&] {
    require(features != nullptr, "null argument");
    with_output(path, [&](std::ostream& os) {
      orbitpool::write_descriptors_csv(os, features->described.descriptors, features->config,
                                       orbitpool::Metric::Euclidean);
    });
  });
}

op_status op_features_write_scattering_csv(const op_features* features, const char* path) {
  return guarded([&] {
    require(features != nullptr, "null argument");
    const auto& s = features->described.scattering;
    if (s.empty() && !features->described.descriptors.empty())
      throw Error(ErrorCode::InvalidArgument, "features carry no scattering coefficients");
    with_output(path, [&](std::ostream& os) {
      if (s.empty()) os << "keypoint,order,j1,l1,j2,l2,value\n";
      for (std::size_t i = 0; i < s.size(); ++i)
        orbitpool::write_scattering_csv(os, s[i], static_cast<int>(i), i == 0);
    });
  });
}

void op_synth_options_init(op_synth_options* opts) {
  if (opts == nullptr) return;
  opts->seed = 1;
  opts->scale_min = opts->scale_max = 1.0;
  opts->scales = nullptr;
  opts->n_scales = 0;
  opts->rotation_min = opts->rotation_max = 0.0;
  opts->contrasts = "none";
  opts->occlusion = 0.0;
  opts->procedural_count = 3;
  opts->procedural_size = 128;
}

op_status op_synth(const char* bases_dir, const char* out_dir, const op_synth_options* opts,
                   size_t* n_pairs) {
  return guarded([&] {
    require(out_dir != nullptr && opts != nullptr, "null argument");
    std::vector<orbitpool::Image> bases;
    if (bases_dir != nullptr) {
      bases = orbitpool::load_bases(bases_dir);
    } else {
      require(opts->procedural_count > 0 && opts->procedural_size > 0,
              "procedural base count and size must be positive");
      bases = orbitpool::procedural_bases(opts->procedural_count, opts->procedural_size,
                                          opts->seed);
    }
    orbitpool::SynthSpec spec;
    spec.scale_min = opts->scale_min;
    spec.scale_max = opts->scale_max;
    if (opts->scales != nullptr) spec.scales.assign(opts->scales, opts->scales + opts->n_scales);
    spec.rotation_min = opts->rotation_min;
    spec.rotation_max = opts->rotation_max;
    spec.contrasts = parse_contrasts(opts->contrasts);
    spec.occlusion = opts->occlusion;
    const auto pairs = orbitpool::synth_pairs(bases, spec, opts->seed);
    const std::filesystem::path root(out_dir);
    for (const auto& p : pairs) {
      char name[32];
      std::snprintf(name, sizeof name, "pair_%04d", p.id);
      orbitpool::save_pair(p, root / name);
    }
    if (n_pairs) *n_pairs = pairs.size();
  });
}

op_status op_match_pair_dir(const char* pair_dir, op_kind kind, double ratio,
                            const char* records_csv, op_match_summary* out) {
  return guarded([&] {
    require(pair_dir != nullptr, "null argument");
    require(ratio > 0.0 && ratio <= 1.0, "ratio must lie in (0, 1]");
    const auto pair = orbitpool::load_pair(pair_dir);
    orbitpool::MatchConfig cfg;
    cfg.ratio = ratio;
    const auto m = orbitpool::match_pair(pair, to_kind(kind), cfg);
    const auto pr = orbitpool::precision_recall(m, ratio);
    if (records_csv != nullptr) {
      with_output(records_csv, [&](std::ostream& os) {
        using orbitpool::csv::num;
        os << "query,match,qu,qv,mu,mv,pu,pv,distance,ratio,query_covisible,match_covisible,"
              "correct\n";
        for (const auto& r : m.records)
          os << r.query << ',' << r.match << ',' << num(r.query_pos.u) << ','
             << num(r.query_pos.v) << ',' << num(r.match_pos.u) << ',' << num(r.match_pos.v)
             << ',' << num(r.projected.u) << ',' << num(r.projected.v) << ','
             << num(r.distance) << ',' << num(r.ratio) << ',' << r.query_covisible << ','
             << r.match_covisible << ',' << r.correct << '\n';
      });
    }
    if (out) {
      out->queries = m.queries;
      out->valid_queries = m.valid_queries;
      out->correspondences = m.correspondences;
      out->accepted = pr.accepted;
      out->correct = pr.correct;
      out->precision = pr.precision;
      out->recall = pr.recall;
      out->warning = m.warning ? 1 : 0;
    }
  });
}

op_status op_eval(const char* pairs_dir, const op_kind* kinds, size_t n_kinds,
                  const char* report_csv, op_report** out) {
  return guarded([&] {
    require(pairs_dir != nullptr && kinds != nullptr && n_kinds > 0, "null argument");
    if (out) *out = nullptr;
    std::vector<orbitpool::DescriptorKind> ks;
    for (size_t i = 0; i < n_kinds; ++i) ks.push_back(to_kind(kinds[i]));
    const auto pairs = orbitpool::load_pairs(pairs_dir);
    if (pairs.empty()) throw Error(ErrorCode::NotFound, "no pairs found");
    auto report = std::make_unique<op_report>();
    report->report = orbitpool::evaluate(pairs, ks, orbitpool::MatchConfig{});
    if (report_csv != nullptr)
      with_output(report_csv, [&](std::ostream& os) {
        orbitpool::write_report_csv(os, report->report);
      });
    if (out) *out = report.release();
  });
}

void op_report_free(op_report* report) { delete report; }

size_t op_report_kind_count(const op_report* report) {
  return report ? report->report.summary.size() : 0;
}

op_status op_report_summary(const op_report* report, size_t index, op_kind* kind, double* map,
                            int* flagged) {
  return guarded([&] {
    require(report != nullptr, "null argument");
    const auto& s = report->report.summary;
    if (index >= s.size()) throw Error(ErrorCode::OutOfBounds, "summary index out of range");
    if (kind) *kind = from_kind(s[index].kind);
    if (map) *map = s[index].map;
    if (flagged) *flagged = s[index].flagged ? 1 : 0;
  });
}

double op_report_runtime(const op_report* report) {
  return report ? report->report.runtime_seconds : 0.0;
}

op_status op_report_write_summary(const op_report* report, const char* path) {
  return guarded([&] {
    require(report != nullptr, "null argument");
    with_output(path, [&](std::ostream& os) {
      orbitpool::write_summary_csv(os, report->report, orbitpool::MatchConfig{}.ratio);
    });
  });
}

void op_template_options_init(op_template_options* opts) {
  if (opts == nullptr) return;
  opts->samples = "standard";
  opts->u = opts->v = -1.0;
  opts->size = 0.0;
  opts->metric = OP_METRIC_BHATTACHARYYA;
}

op_status op_template_build(const op_image* image, const op_template_options* opts,
                            op_template** out) {
  return guarded([&] {
    require(image != nullptr && opts != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    const auto& img = image->image;
    const auto samples =
        orbitpool::GroupSampleSet::parse(opts->samples ? opts->samples : "standard");
    orbitpool::Keypoint kp;
    const auto c = img.center();
    kp.u = opts->u >= 0.0 ? opts->u : c.u;
    kp.v = opts->v >= 0.0 ? opts->v : c.v;
    kp.base_size = opts->size > 0.0 ? opts->size : std::min(img.width(), img.height()) / 12.0;
    kp.orientation = 0.0;
    orbitpool::TemplateConfig cfg;
    cfg.metric = opts->metric == OP_METRIC_EUCLIDEAN ? orbitpool::Metric::Euclidean
                                                     : orbitpool::Metric::Bhattacharyya;
    *out = new op_template{orbitpool::build_template(img, kp, samples, cfg)};
  });
}

op_status op_template_save(const op_template* tmpl, const char* path) {
  return guarded([&] {
    require(tmpl != nullptr, "null argument");
    with_output(path, [&](std::ostream& os) { orbitpool::save_template(os, tmpl->model); });
  });
}

op_status op_template_load(const char* path, op_template** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, std::string("cannot open: ") + path);
    *out = new op_template{orbitpool::load_template(in)};
  });
}

void op_template_free(op_template* tmpl) { delete tmpl; }

size_t op_template_size(const op_template* tmpl) {
  return tmpl ? tmpl->model.descriptors.size() : 0;
}

op_status op_soa(const op_template* tmpl, const op_image* query, op_soa_result* out,
                 double* scores, size_t scores_len) {
  return guarded([&] {
    require(tmpl != nullptr && query != nullptr && out != nullptr, "null argument");
    const auto& m = tmpl->model;
    const auto y = orbitpool::query_descriptor(query->image, m.keypoint, m.config);
    const auto r = orbitpool::soa_likelihood(m, y, m.config.metric);
    out->value = r.value;
    out->argmax = r.argmax;
    out->n_samples = r.scores.size();
    if (scores != nullptr)
      for (size_t i = 0; i < std::min(scores_len, r.scores.size()); ++i) scores[i] = r.scores[i];
  });
}

}  // extern "C"
