/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "orbitpool/orbitpool.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct Failure {
  int exit_code;
};

void check(op_status s, const char* what) {
  if (s == OP_OK) return;
  std::cerr << "orbitpool: " << what << ": " << op_status_name(s);
  const std::string detail = op_last_error();
  if (!detail.empty()) std::cerr << ": " << detail;
  std::cerr << '\n';
  // Bad argument values caught by the library are still usage errors.
  throw Failure{s == OP_ERR_INVALID_ARGUMENT ? kExitUsage : kExitData};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ImagePtr = std::unique_ptr<op_image, Deleter<op_image, op_image_free>>;
using FeaturesPtr = std::unique_ptr<op_features, Deleter<op_features, op_features_free>>;
using TemplatePtr = std::unique_ptr<op_template, Deleter<op_template, op_template_free>>;
using ReportPtr = std::unique_ptr<op_report, Deleter<op_report, op_report_free>>;

ImagePtr load(const std::string& path) {
  op_image* img = nullptr;
  check(op_image_load(path.c_str(), &img), "loading image");
  return ImagePtr(img);
}

op_kind kind_of(const std::string& name) {
  op_kind k;
  check(op_kind_parse(name.c_str(), &k), "parsing --kind");
  return k;
}

const std::vector<std::string> kKinds{"sift", "dsp-sift", "sc", "dsp-sc"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orbitpool: contrast-invariant orientation statistics, domain-size pooling and "
               "sampled-orbit likelihoods"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(op_version()));

  // describe
  auto* describe = app.add_subcommand("describe", "Write descriptors of an image as CSV");
  std::string d_image, d_kind = "dsp-sift", d_out = "-", d_paths;
  std::vector<double> d_sizes;
  int d_bins = 8, d_cells = 4, d_stride = 16;
  double d_size = 4.0;
  bool d_grid = false, d_dog = false, d_orient = false;
  describe->add_option("image", d_image, "PGM/PPM/PNG input")->required();
  describe->add_option("--kind", d_kind, "Descriptor kind")
      ->check(CLI::IsMember(kKinds))
      ->capture_default_str();
  auto* grid_flag = describe->add_flag("--grid", d_grid, "Regular grid keypoints (default)");
  auto* dog_flag = describe->add_flag("--dog", d_dog, "Difference-of-Gaussian keypoints");
  grid_flag->excludes(dog_flag);
  describe->add_option("--sizes", d_sizes, "Size multipliers of the pooling prior")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  describe->add_option("--bins", d_bins, "Orientation bins per cell")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  describe->add_option("--cells", d_cells, "Cells per side")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  describe->add_option("--stride", d_stride, "Grid spacing in pixels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  describe->add_option("--size", d_size, "Grid keypoint size in pixels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  describe->add_flag("--orient", d_orient, "Assign principal orientations to grid keypoints");
  describe->add_option("--out,-o", d_out, "Descriptor CSV ('-' for stdout)")->capture_default_str();
  describe->add_option("--paths", d_paths, "Per-path scattering coefficients CSV");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate synthetic image pairs");
  std::string s_bases, s_out, s_contrast = "none";
  std::uint64_t s_seed = 1;
  std::vector<double> s_scale_range{1.0, 1.0}, s_rot_range{0.0, 0.0}, s_scales;
  double s_occlusion = 0.0;
  int s_count = 3, s_size = 128;
  synth->add_option("--bases", s_bases, "Directory of base images (procedural if omitted)")
      ->check(CLI::ExistingDirectory);
  synth->add_option("--out", s_out, "Output directory")->required();
  synth->add_option("--seed", s_seed, "Random seed")->capture_default_str();
  synth->add_option("--scale-range", s_scale_range, "min,max scale")
      ->delimiter(',')
      ->expected(2);
  synth->add_option("--scales", s_scales, "Explicit scale list, one pair per base per scale")
      ->delimiter(',');
  synth->add_option("--rot-range", s_rot_range, "min,max rotation in radians")
      ->delimiter(',')
      ->expected(2);
  synth->add_option("--contrast", s_contrast, "Comma list of none, affine, gamma")
      ->capture_default_str();
  synth->add_option("--occlusion", s_occlusion, "Occluder area fraction")
      ->check(CLI::Range(0.0, 0.5))
      ->capture_default_str();
  synth->add_option("--count", s_count, "Procedural base count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth->add_option("--size", s_size, "Procedural base side in pixels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // match
  auto* match = app.add_subcommand("match", "Match the two images of one pair");
  std::string m_pair, m_kind = "dsp-sift", m_records;
  double m_ratio = 0.8;
  match->add_option("--pair", m_pair, "Pair directory")->required()->check(CLI::ExistingDirectory);
  match->add_option("--kind", m_kind, "Descriptor kind")
      ->check(CLI::IsMember(kKinds))
      ->capture_default_str();
  match->add_option("--ratio", m_ratio, "Ratio-test threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  match->add_option("--records", m_records, "Per-match CSV ('-' for stdout)");

  // eval
  auto* eval = app.add_subcommand("eval", "Precision/recall report over a directory of pairs");
  std::string e_pairs, e_out = "report.csv", e_summary;
  std::vector<std::string> e_kinds{"sift", "dsp-sift", "sc", "dsp-sc"};
  eval->add_option("--pairs", e_pairs, "Directory of pair_* directories")
      ->required()
      ->check(CLI::ExistingDirectory);
  eval->add_option("--kinds", e_kinds, "Descriptor kinds")
      ->delimiter(',')
      ->check(CLI::IsMember(kKinds));
  eval->add_option("--out", e_out, "Report CSV")->capture_default_str();
  eval->add_option("--summary", e_summary, "Per-kind summary CSV ('-' for stdout)");

  // soa
  auto* soa = app.add_subcommand("soa", "Sampled-orbit likelihood of a query under a template");
  std::string o_template, o_template_file, o_query, o_samples = "standard", o_metric = "bhattacharyya",
                                                    o_save;
  double o_u = -1.0, o_v = -1.0, o_size = 0.0;
  auto* tmpl_img = soa->add_option("--template", o_template, "Template image");
  auto* tmpl_file = soa->add_option("--template-file", o_template_file, "Saved template CSV");
  tmpl_img->excludes(tmpl_file);
  soa->add_option("--query", o_query, "Query image")->required();
  soa->add_option("--samples", o_samples, "'standard' or rot<N>[x<S>][:aa]")->capture_default_str();
  soa->add_option("--metric", o_metric, "Score metric")
      ->check(CLI::IsMember({"bhattacharyya", "euclidean"}))
      ->capture_default_str();
  soa->add_option("--u", o_u, "Keypoint column (default: image center)");
  soa->add_option("--v", o_v, "Keypoint row (default: image center)");
  soa->add_option("--size", o_size, "Keypoint size (default: min side / 12)");
  soa->add_option("--save-template", o_save, "Write the built template CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "orbitpool: " << e.what() << "\n\n";
    CLI::App* failed = &app;
    for (auto* sub : app.get_subcommands()) failed = sub;
    std::cerr << failed->help();
    return kExitUsage;
  }

  try {
    if (*describe) {
      auto img = load(d_image);
      op_describe_options opts;
      op_describe_options_init(&opts);
      opts.kind = kind_of(d_kind);
      opts.detector = d_dog ? OP_DETECT_DOG : OP_DETECT_GRID;
      opts.grid_stride = d_stride;
      opts.base_size = d_size;
      opts.assign_orientation = d_orient ? 1 : 0;
      opts.sizes = d_sizes.empty() ? nullptr : d_sizes.data();
      opts.n_sizes = d_sizes.size();
      opts.bins = d_bins;
      opts.cells = d_cells;
      op_features* raw = nullptr;
      check(op_describe(img.get(), &opts, &raw), "describing image");
      FeaturesPtr features(raw);
      check(op_features_write_csv(features.get(), d_out.c_str()), "writing descriptors");
      if (!d_paths.empty())
        check(op_features_write_scattering_csv(features.get(), d_paths.c_str()),
              "writing scattering paths");
      if (d_out != "-") std::cerr << op_features_count(features.get()) << " descriptors\n";
    } else if (*synth) {
      op_synth_options opts;
      op_synth_options_init(&opts);
      opts.seed = s_seed;
      opts.scale_min = s_scale_range[0];
      opts.scale_max = s_scale_range[1];
      opts.scales = s_scales.empty() ? nullptr : s_scales.data();
      opts.n_scales = s_scales.size();
      opts.rotation_min = s_rot_range[0];
      opts.rotation_max = s_rot_range[1];
      opts.contrasts = s_contrast.c_str();
      opts.occlusion = s_occlusion;
      opts.procedural_count = s_count;
      opts.procedural_size = s_size;
      size_t n = 0;
      check(op_synth(s_bases.empty() ? nullptr : s_bases.c_str(), s_out.c_str(), &opts, &n),
            "generating pairs");
      std::cout << n << " pairs written to " << s_out << '\n';
    } else if (*match) {
      op_match_summary s;
      check(op_match_pair_dir(m_pair.c_str(), kind_of(m_kind), m_ratio,
                              m_records.empty() ? nullptr : m_records.c_str(), &s),
            "matching pair");
      std::FILE* out = m_records == "-" ? stderr : stdout;
      std::fprintf(out,
                   "queries=%zu valid=%zu correspondences=%zu accepted=%zu correct=%zu "
                   "precision=%.6f recall=%.6f%s\n",
                   s.queries, s.valid_queries, s.correspondences, s.accepted, s.correct,
                   s.precision, s.recall, s.warning ? " warning=no-features" : "");
    } else if (*eval) {
      std::vector<op_kind> kinds;
      for (const auto& k : e_kinds) kinds.push_back(kind_of(k));
      op_report* raw = nullptr;
      check(op_eval(e_pairs.c_str(), kinds.data(), kinds.size(), e_out.c_str(), &raw),
            "evaluating pairs");
      ReportPtr report(raw);
      if (!e_summary.empty())
        check(op_report_write_summary(report.get(), e_summary.c_str()), "writing summary");
      for (size_t i = 0; i < op_report_kind_count(report.get()); ++i) {
        op_kind k;
        double map = 0.0;
        int flagged = 0;
        check(op_report_summary(report.get(), i, &k, &map, &flagged), "reading summary");
        std::fprintf(stderr, "%-8s mAP=%.4f%s\n", op_kind_name(k), map,
                     flagged ? " (no matches)" : "");
      }
      std::fprintf(stderr, "runtime %.2f s\n", op_report_runtime(report.get()));
    } else if (*soa) {
      if (o_template.empty() == o_template_file.empty()) {
        std::cerr << "orbitpool: soa needs exactly one of --template or --template-file\n\n"
                  << soa->help();
        return kExitUsage;
      }
      op_template* raw = nullptr;
      if (!o_template.empty()) {
        auto img = load(o_template);
        op_template_options opts;
        op_template_options_init(&opts);
        opts.samples = o_samples.c_str();
        opts.u = o_u;
        opts.v = o_v;
        opts.size = o_size;
        opts.metric = o_metric == "euclidean" ? OP_METRIC_EUCLIDEAN : OP_METRIC_BHATTACHARYYA;
        check(op_template_build(img.get(), &opts, &raw), "building template");
      } else {
        check(op_template_load(o_template_file.c_str(), &raw), "loading template");
      }
      TemplatePtr tmpl(raw);
      if (!o_save.empty()) check(op_template_save(tmpl.get(), o_save.c_str()), "saving template");
      auto query = load(o_query);
      std::vector<double> scores(op_template_size(tmpl.get()));
      op_soa_result r;
      check(op_soa(tmpl.get(), query.get(), &r, scores.data(), scores.size()), "scoring query");
      std::printf("value=%.9f argmax=%zu samples=%zu\n", r.value, r.argmax, r.n_samples);
      for (size_t i = 0; i < scores.size(); ++i) std::printf("score[%zu]=%.9f\n", i, scores[i]);
    }
  } catch (const Failure& f) {
    return f.exit_code;
  }
  return kExitOk;
}
