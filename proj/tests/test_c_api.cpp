/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "orbitpool/orbitpool.h"

namespace fs = std::filesystem;

namespace {

op_image* noise_image(int w, int h, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<double> raw(static_cast<std::size_t>(w) * h), out(raw.size());
  for (double& x : raw) x = (rng() >> 8) * (1.0 / 16777216.0);
  // 3x3 box smoothing keeps the texture above the gradient floor.
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      double s = 0.0;
      int n = 0;
      for (int dv = -1; dv <= 1; ++dv)
        for (int du = -1; du <= 1; ++du) {
          const int uu = u + du, vv = v + dv;
          if (uu < 0 || vv < 0 || uu >= w || vv >= h) continue;
          s += raw[static_cast<std::size_t>(vv) * w + uu];
          ++n;
        }
      out[static_cast<std::size_t>(v) * w + u] = s / n;
    }
  op_image* img = nullptr;
  REQUIRE(op_image_create(w, h, out.data(), &img) == OP_OK);
  return img;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("status names, versions and kinds") {
  CHECK(std::strlen(op_version()) > 0);
  CHECK(std::string(op_status_name(OP_OK)) == "ok");
  op_kind k;
  CHECK(op_kind_parse("dsp-sc", &k) == OP_OK);
  CHECK(k == OP_KIND_DSP_SC);
  CHECK(std::string(op_kind_name(OP_KIND_SIFT)) == "sift");
  CHECK(op_kind_parse("orb", &k) == OP_ERR_INVALID_ARGUMENT);
  CHECK(std::string(op_last_error()).find("orb") != std::string::npos);
  CHECK(op_kind_parse(nullptr, &k) == OP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("images through the C boundary") {
  const double px[6] = {0, 0.2, 0.4, 0.6, 0.8, 1.0};
  op_image* img = nullptr;
  REQUIRE(op_image_create(3, 2, px, &img) == OP_OK);
  CHECK(op_image_width(img) == 3);
  CHECK(op_image_height(img) == 2);
  CHECK(op_image_data(img)[4] == 0.8);
  TempDir dir("orbitpool_capi_img");
  const std::string file = (dir.path / "x.pgm").string();
  CHECK(op_image_write_pgm(img, file.c_str()) == OP_OK);
  op_image* back = nullptr;
  REQUIRE(op_image_load(file.c_str(), &back) == OP_OK);
  for (int i = 0; i < 6; ++i) CHECK(std::abs(op_image_data(back)[i] - px[i]) <= 0.5 / 255);
  op_image_free(back);
  op_image_free(img);
  op_image_free(nullptr);

  CHECK(op_image_load((dir.path / "missing.pgm").string().c_str(), &back) == OP_ERR_NOT_FOUND);
  std::ofstream(dir.path / "bad.gif") << "GIF89a";
  CHECK(op_image_load((dir.path / "bad.gif").string().c_str(), &back) == OP_ERR_UNSUPPORTED_FORMAT);
  CHECK(op_image_create(0, 2, px, &img) == OP_ERR_INVALID_ARGUMENT);
  REQUIRE(op_image_create(3, 2, nullptr, &img) == OP_OK);
  CHECK(op_image_data(img)[5] == 0.0);
  op_image_free(img);
  CHECK(op_image_create(3, 2, px, nullptr) == OP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("describe on a grid") {
  op_image* img = noise_image(64, 64, 1);
  op_describe_options opts;
  op_describe_options_init(&opts);
  CHECK(opts.kind == OP_KIND_DSP_SIFT);
  op_features* f = nullptr;
  REQUIRE(op_describe(img, &opts, &f) == OP_OK);
  CHECK(op_features_count(f) > 0);
  CHECK(op_features_dim(f) == 128);
  double u, v, size, alpha;
  int degenerate;
  REQUIRE(op_features_keypoint(f, 0, &u, &v, &size, &alpha, &degenerate) == OP_OK);
  CHECK(alpha == 0.0);
  const double* values = op_features_values(f, 0);
  double sum = 0.0;
  for (std::size_t i = 0; i < 128; ++i) sum += values[i];
  CHECK(sum == doctest::Approx(1.0));
  CHECK(op_features_keypoint(f, 100000, &u, &v, &size, &alpha, &degenerate) == OP_ERR_OUT_OF_BOUNDS);
  CHECK(op_features_values(f, 100000) == nullptr);
  TempDir dir("orbitpool_capi_desc");
  const std::string csv = (dir.path / "d.csv").string();
  CHECK(op_features_write_csv(f, csv.c_str()) == OP_OK);
  CHECK(op_features_write_scattering_csv(f, csv.c_str()) == OP_ERR_INVALID_ARGUMENT);
  op_features_free(f);

  const double sizes[] = {0.9, 1.1};
  opts.kind = OP_KIND_DSP_SC;
  opts.sizes = sizes;
  opts.n_sizes = 2;
  opts.grid_stride = 24;
  opts.base_size = 5;
  REQUIRE(op_describe(img, &opts, &f) == OP_OK);
  CHECK(op_features_dim(f) == 24 + 192);
  CHECK(op_features_write_scattering_csv(f, csv.c_str()) == OP_OK);
  op_features_free(f);

  op_image* tiny = noise_image(8, 8, 2);
  opts.kind = OP_KIND_SIFT;
  CHECK(op_describe(tiny, &opts, &f) == OP_ERR_TOO_SMALL);
  op_image_free(tiny);
  opts.bins = 0;
  CHECK(op_describe(img, &opts, &f) == OP_ERR_INVALID_ARGUMENT);
  op_image_free(img);
}

TEST_CASE("synthesize, match and evaluate through the C boundary") {
  TempDir dir("orbitpool_capi_eval");
  op_synth_options so;
  op_synth_options_init(&so);
  const double scales[] = {1.2};
  so.scales = scales;
  so.n_scales = 1;
  so.procedural_count = 2;
  so.seed = 42;
  size_t n = 0;
  REQUIRE(op_synth(nullptr, dir.path.string().c_str(), &so, &n) == OP_OK);
  CHECK(n == 2);
  CHECK(fs::exists(dir.path / "pair_0000" / "pair.json"));

  op_match_summary ms;
  const std::string records = (dir.path / "records.csv").string();
  REQUIRE(op_match_pair_dir((dir.path / "pair_0000").string().c_str(), OP_KIND_SIFT, 0.8,
                            records.c_str(), &ms) == OP_OK);
  CHECK(ms.queries > 0);
  CHECK(ms.correct <= ms.accepted);
  std::ifstream in(records);
  std::string header;
  std::getline(in, header);
  CHECK(header == "query,match,qu,qv,mu,mv,pu,pv,distance,ratio,query_covisible,match_covisible,correct");

  const op_kind kinds[] = {OP_KIND_SIFT, OP_KIND_DSP_SIFT};
  op_report* rep = nullptr;
  const std::string report = (dir.path / "report.csv").string();
  REQUIRE(op_eval(dir.path.string().c_str(), kinds, 2, report.c_str(), &rep) == OP_OK);
  CHECK(op_report_kind_count(rep) == 2);
  op_kind k;
  double map;
  int flagged;
  REQUIRE(op_report_summary(rep, 1, &k, &map, &flagged) == OP_OK);
  CHECK(k == OP_KIND_DSP_SIFT);
  CHECK(map > 0.0);
  CHECK(map <= 1.0);
  CHECK(flagged == 0);
  CHECK(op_report_runtime(rep) >= 0.0);
  CHECK(op_report_summary(rep, 2, &k, &map, &flagged) == OP_ERR_OUT_OF_BOUNDS);
  CHECK(op_report_write_summary(rep, (dir.path / "summary.csv").string().c_str()) == OP_OK);
  op_report_free(rep);

  CHECK(op_eval((dir.path / "nowhere").string().c_str(), kinds, 2, nullptr, &rep) == OP_ERR_NOT_FOUND);
  so.occlusion = 0.9;
  CHECK(op_synth(nullptr, dir.path.string().c_str(), &so, &n) == OP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("templates and sampled-orbit likelihood") {
  op_image* img = noise_image(65, 65, 3);
  op_template_options to;
  op_template_options_init(&to);
  to.samples = "rot4";
  op_template* t = nullptr;
  REQUIRE(op_template_build(img, &to, &t) == OP_OK);
  CHECK(op_template_size(t) == 4);
  op_soa_result r;
  double scores[4];
  REQUIRE(op_soa(t, img, &r, scores, 4) == OP_OK);
  CHECK(r.argmax == 0);
  CHECK(r.n_samples == 4);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(scores[0] == r.value);

  TempDir dir("orbitpool_capi_tmpl");
  const std::string file = (dir.path / "t.csv").string();
  REQUIRE(op_template_save(t, file.c_str()) == OP_OK);
  op_template* back = nullptr;
  REQUIRE(op_template_load(file.c_str(), &back) == OP_OK);
  op_soa_result r2;
  REQUIRE(op_soa(back, img, &r2, nullptr, 0) == OP_OK);
  CHECK(r2.value == r.value);
  op_template_free(back);
  op_template_free(t);

  to.samples = "bogus";
  CHECK(op_template_build(img, &to, &t) == OP_ERR_INVALID_ARGUMENT);
  CHECK(op_template_load((dir.path / "none.csv").string().c_str(), &t) == OP_ERR_NOT_FOUND);
  op_image_free(img);
}
