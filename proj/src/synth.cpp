/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "orbitpool/harness.hpp"
#include "orbitpool/orientation_stats.hpp"

namespace orbitpool {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t Rng::mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform(), u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(kTwoPi * u2);
  has_spare_ = true;
  return r * std::cos(kTwoPi * u2);
}

namespace {

Image stretch(const Image& img, double lo, double hi) {
  const auto [mn, mx] = std::minmax_element(img.values().begin(), img.values().end());
  Image out = img;
  const double range = *mx - *mn;
  for (double& x : out.values())
    x = range > 0.0 ? lo + (hi - lo) * (x - *mn) / range : 0.5 * (lo + hi);
  return out;
}

Image noise_image(int size, Rng& rng) {
  Image n(size, size);
  for (double& x : n.values()) x = rng.normal();
  return n;
}

}  // namespace

Image make_texture(TextureKind kind, int size, std::uint64_t seed) {
  if (size < 8) throw Error(ErrorCode::InvalidArgument, "texture size must be >= 8");
  Rng rng(seed);
  Image img(size, size);
  switch (kind) {
    case TextureKind::Ramp:
      for (int v = 0; v < size; ++v)
        for (int u = 0; u < size; ++u) img(u, v) = static_cast<double>(u) / (size - 1);
      return img;
    case TextureKind::Checkerboard: {
      const int period = 8 + static_cast<int>(rng.uniform() * 9);
      const int cells = size / period + 2;
      std::vector<double> shade(static_cast<std::size_t>(cells) * cells);
      for (double& s : shade) s = rng.uniform(0.1, 0.9);
      for (int v = 0; v < size; ++v)
        for (int u = 0; u < size; ++u)
          img(u, v) = shade[static_cast<std::size_t>(v / period) * cells + u / period];
      return gaussian_blur(img, 1.0);
    }
    case TextureKind::FilteredNoise: {
      const Image fine = gaussian_blur(noise_image(size, rng), 1.5);
      const Image coarse = gaussian_blur(noise_image(size, rng), 4.0);
      for (std::size_t i = 0; i < img.size(); ++i)
        img.values()[i] = fine.values()[i] + 4.0 * coarse.values()[i];
      return stretch(img, 0.05, 0.95);
    }
    case TextureKind::Blobs: {
      for (double& x : img.values()) x = 0.5;
      const int count = 10 + size * size / 400;
      for (int k = 0; k < count; ++k) {
        const double cu = rng.uniform(0, size), cv = rng.uniform(0, size);
        const double s = rng.uniform(2.0, 7.0);
        const double amp = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.2, 0.5);
        const int r = static_cast<int>(std::ceil(3 * s));
        for (int v = std::max(0, int(cv) - r); v < std::min(size, int(cv) + r + 1); ++v)
          for (int u = std::max(0, int(cu) - r); u < std::min(size, int(cu) + r + 1); ++u)
            img(u, v) += amp * std::exp(-((u - cu) * (u - cu) + (v - cv) * (v - cv)) / (2 * s * s));
      }
      for (double& x : img.values()) x = std::clamp(x, 0.0, 1.0);
      return img;
    }
  }
  return img;
}

std::vector<Image> procedural_bases(int count, int size, std::uint64_t seed) {
  static constexpr TextureKind cycle[] = {TextureKind::FilteredNoise, TextureKind::Blobs,
                                          TextureKind::Checkerboard};
  std::vector<Image> out;
  for (int i = 0; i < count; ++i)
    out.push_back(make_texture(cycle[i % 3], size, Rng::mix(seed, static_cast<std::uint64_t>(i))));
  return out;
}

std::vector<SyntheticPair> synth_pairs(std::span<const Image> bases,
                                       const SynthSpec& spec, std::uint64_t seed) {
  if (bases.empty()) throw Error(ErrorCode::InvalidArgument, "empty base list");
  auto in_scale_range = [](double s) { return s >= 0.5 && s <= 2.0; };
  if (!in_scale_range(spec.scale_min) || !in_scale_range(spec.scale_max) ||
      spec.scale_min > spec.scale_max ||
      !std::all_of(spec.scales.begin(), spec.scales.end(), in_scale_range))
    throw Error(ErrorCode::InvalidArgument, "scales must lie in [0.5, 2]");
  if (spec.rotation_min < -std::numbers::pi || spec.rotation_max > std::numbers::pi ||
      spec.rotation_min > spec.rotation_max)
    throw Error(ErrorCode::InvalidArgument, "rotations must lie in [-pi, pi]");
  if (!(spec.occlusion >= 0.0 && spec.occlusion <= 0.5))
    throw Error(ErrorCode::InvalidArgument, "occlusion fraction must lie in [0, 0.5]");
  if (spec.contrasts.empty())
    throw Error(ErrorCode::InvalidArgument, "at least one contrast kind is required");

  std::vector<SyntheticPair> pairs;
  int id = 0;
  for (const Image& base : bases) {
    const std::size_t per_base = spec.scales.empty() ? 1 : spec.scales.size();
    for (std::size_t k = 0; k < per_base; ++k, ++id) {
      Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(id)));
      SyntheticPair p;
      p.id = id;
      p.reference = base;
      const double log_s = rng.uniform(std::log(spec.scale_min), std::log(spec.scale_max));
      p.ground_truth.scale = spec.scales.empty() ? std::exp(log_s) : spec.scales[k];
      p.ground_truth.rotation = rng.uniform(spec.rotation_min, spec.rotation_max);
      if (spec.scale_min == spec.scale_max && spec.scales.empty())
        p.ground_truth.scale = spec.scale_min;
      if (spec.rotation_min == spec.rotation_max) p.ground_truth.rotation = spec.rotation_min;

      const auto kind = spec.contrasts[std::min(
          spec.contrasts.size() - 1,
          static_cast<std::size_t>(rng.uniform() * spec.contrasts.size()))];
      const double c1 = rng.uniform(), c2 = rng.uniform();
      if (kind == ContrastKind::Affine)
        p.contrast = ContrastMap::affine(0.6 + 0.8 * c1, -0.1 + 0.2 * c2);
      else if (kind == ContrastKind::Gamma)
        p.contrast = ContrastMap::gamma(0.6 + c1);

      WarpResult w = warp(base, p.ground_truth);
      p.transformed = kind == ContrastKind::None ? std::move(w.image)
                                                 : apply_contrast(w.image, p.contrast);
      p.covisible = std::move(w.mask);

      if (spec.occlusion > 0.0) {
        const int W = base.width(), H = base.height();
        Rect r;
        r.width = static_cast<int>(std::lround(std::sqrt(spec.occlusion) * W));
        r.height = static_cast<int>(std::lround(std::sqrt(spec.occlusion) * H));
        r.u0 = static_cast<int>(rng.uniform() * (W - r.width + 1));
        r.v0 = static_cast<int>(rng.uniform() * (H - r.height + 1));
        for (int v = r.v0; v < r.v0 + r.height; ++v)
          for (int u = r.u0; u < r.u0 + r.width; ++u) {
            p.transformed(u, v) = rng.uniform();
            p.covisible.set(u, v, false);
          }
        p.occluder = r;
      }
      pairs.push_back(std::move(p));
    }
  }
  return pairs;
}

namespace {

json contrast_json(const ContrastMap& c) {
  switch (c.kind()) {
    case ContrastMap::Kind::Affine:
      return {{"kind", "affine"}, {"gain", c.gain()}, {"offset", c.offset()}};
    case ContrastMap::Kind::Gamma:
      return {{"kind", "gamma"}, {"gamma", c.exponent()}};
    case ContrastMap::Kind::Table:
      return {{"kind", "table"}, {"entries", c.entries()}};
  }
  return {};
}

ContrastMap contrast_from_json(const json& j) {
  const std::string kind = j.at("kind");
  if (kind == "affine") return ContrastMap::affine(j.at("gain"), j.at("offset"));
  if (kind == "gamma") return ContrastMap::gamma(j.at("gamma"));
  return ContrastMap::table(j.at("entries").get<std::vector<double>>());
}

}  // namespace

void save_pair(const SyntheticPair& pair, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string());
  write_pgm(pair.reference, dir / "reference.pgm");
  write_pgm(pair.transformed, dir / "transformed.pgm");
  write_pgm(pair.covisible, dir / "mask.pgm");
  json meta = {
      {"id", pair.id},
      {"ground_truth",
       {{"scale", pair.ground_truth.scale},
        {"rotation", pair.ground_truth.rotation},
        {"tx", pair.ground_truth.tx},
        {"ty", pair.ground_truth.ty}}},
      {"contrast", contrast_json(pair.contrast)},
      {"occluder", nullptr}};
  if (pair.occluder)
    meta["occluder"] = {{"u0", pair.occluder->u0},
                        {"v0", pair.occluder->v0},
                        {"width", pair.occluder->width},
                        {"height", pair.occluder->height}};
  std::ofstream out(dir / "pair.json");
  out << meta.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::Io, "cannot write pair metadata in " + dir.string());
}

SyntheticPair load_pair(const fs::path& dir) {
  const fs::path meta_path = dir / "pair.json";
  std::ifstream in(meta_path);
  if (!in) throw Error(ErrorCode::NotFound, "not found: " + meta_path.string());
  SyntheticPair p;
  try {
    const json meta = json::parse(in);
    p.id = meta.at("id");
    const auto& g = meta.at("ground_truth");
    p.ground_truth = {g.at("scale"), g.at("rotation"), g.at("tx"), g.at("ty")};
    p.contrast = contrast_from_json(meta.at("contrast"));
    if (!meta.at("occluder").is_null()) {
      const auto& o = meta["occluder"];
      p.occluder = Rect{o.at("u0"), o.at("v0"), o.at("width"), o.at("height")};
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::UnsupportedFormat, "bad pair metadata: " + std::string(e.what()));
  }
  p.reference = load_image(dir / "reference.pgm");
  p.transformed = load_image(dir / "transformed.pgm");
  p.covisible = load_mask(dir / "mask.pgm");
  return p;
}

std::vector<SyntheticPair> load_pairs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::NotFound, "not found: " + dir.string());
  std::vector<fs::path> subdirs;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory() && e.path().filename().string().rfind("pair_", 0) == 0)
      subdirs.push_back(e.path());
  std::sort(subdirs.begin(), subdirs.end());
  std::vector<SyntheticPair> out;
  for (const auto& d : subdirs) out.push_back(load_pair(d));
  return out;
}

std::vector<Image> load_bases(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::NotFound, "not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    auto ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".pgm" || ext == ".ppm" || ext == ".png") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Image> out;
  for (const auto& f : files) out.push_back(load_image(f));
  return out;
}

}  // namespace orbitpool
