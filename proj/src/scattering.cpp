/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "orbitpool/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "fft.hpp"
#include "orbitpool/csv.hpp"

namespace orbitpool {

using detail::cvec;

struct FilterBank::Spectra {
  int side = 0;
  std::vector<cvec> filters;  // same order as filters_
};

namespace {

constexpr int kFrequencyThreshold = 32;

// Half-sample symmetric extension: ... x1 x0 | x0 x1 ... x{n-1} | x{n-1} ...
int sym(int i, int n) {
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

ComplexKernel make_filter(const MotherWavelet& m, int j, int l, int rotations) {
  const double sigma = m.sigma * std::ldexp(1.0, j);
  const double xi = m.xi / std::ldexp(1.0, j);
  const double theta = std::numbers::pi * l / rotations;
  const double c = std::cos(theta), s = std::sin(theta);

  ComplexKernel k;
  k.radius = static_cast<int>(std::ceil(4.0 * sigma));
  const int side = k.side();
  k.taps.resize(static_cast<std::size_t>(side) * side);
  std::vector<double> envelope(k.taps.size());
  std::complex<double> leak = 0.0;
  double mass = 0.0;
  for (int dv = -k.radius; dv <= k.radius; ++dv)
    for (int du = -k.radius; du <= k.radius; ++du) {
      const auto i = static_cast<std::size_t>(dv + k.radius) * side + (du + k.radius);
      const double along = c * du + s * dv;
      const double across = -s * du + c * dv;
      envelope[i] = std::exp(-(along * along + m.slant * m.slant * across * across) /
                             (2.0 * sigma * sigma));
      k.taps[i] = std::polar(1.0, xi * along);
      leak += envelope[i] * k.taps[i];
      mass += envelope[i];
    }
  const std::complex<double> beta = leak / mass;
  double l1 = 0.0;
  for (std::size_t i = 0; i < k.taps.size(); ++i) {
    k.taps[i] = envelope[i] * (k.taps[i] - beta);
    l1 += std::abs(k.taps[i]);
  }
  for (auto& t : k.taps) t /= l1;
  return k;
}

cvec kernel_spectrum(const ComplexKernel& k, int width, int height) {
  const int ew = 2 * width, eh = 2 * height;
  cvec spec(static_cast<std::size_t>(ew) * eh, 0.0);
  for (int dv = -k.radius; dv <= k.radius; ++dv)
    for (int du = -k.radius; du <= k.radius; ++du) {
      const int u = ((du % ew) + ew) % ew, v = ((dv % eh) + eh) % eh;
      spec[static_cast<std::size_t>(v) * ew + u] += k.at(du, dv);
    }
  detail::fft_for(eh, ew)->forward(spec);
  return spec;
}

cvec extended_spectrum(const std::vector<double>& x, int width, int height) {
  const int ew = 2 * width, eh = 2 * height;
  cvec ext(static_cast<std::size_t>(ew) * eh);
  for (int v = 0; v < eh; ++v)
    for (int u = 0; u < ew; ++u)
      ext[static_cast<std::size_t>(v) * ew + u] =
          x[static_cast<std::size_t>(sym(v, height)) * width + sym(u, width)];
  detail::fft_for(eh, ew)->forward(ext);
  return ext;
}

cvec apply_spectrum(const cvec& image_spec, const cvec& kernel_spec, int width,
                    int height) {
  const int ew = 2 * width, eh = 2 * height;
  thread_local cvec prod;
  prod.resize(image_spec.size());
  // Written out: operator* on std::complex goes through the NaN-aware __muldc3.
  for (std::size_t i = 0; i < prod.size(); ++i) {
    const double a = image_spec[i].real(), b = image_spec[i].imag();
    const double c = kernel_spec[i].real(), d = kernel_spec[i].imag();
    prod[i] = {a * c - b * d, a * d + b * c};
  }
  detail::fft_for(eh, ew)->inverse_unscaled(prod);
  const double scale = 1.0 / (static_cast<double>(ew) * eh);
  cvec out(static_cast<std::size_t>(width) * height);
  for (int v = 0; v < height; ++v)
    for (int u = 0; u < width; ++u)
      out[static_cast<std::size_t>(v) * width + u] =
          prod[static_cast<std::size_t>(v) * ew + u] * scale;
  return out;
}

cvec convolve_direct(const std::vector<double>& x, int width, int height,
                     const ComplexKernel& k) {
  cvec out(static_cast<std::size_t>(width) * height);
  for (int v = 0; v < height; ++v)
    for (int u = 0; u < width; ++u) {
      std::complex<double> acc = 0.0;
      for (int dv = -k.radius; dv <= k.radius; ++dv) {
        const std::size_t row = static_cast<std::size_t>(sym(v - dv, height)) * width;
        for (int du = -k.radius; du <= k.radius; ++du)
          acc += x[row + sym(u - du, width)] * k.at(du, dv);
      }
      out[static_cast<std::size_t>(v) * width + u] = acc;
    }
  return out;
}

std::vector<double> lowpass_weights(int width, int height, double sigma) {
  std::vector<double> w(static_cast<std::size_t>(width) * height);
  const double cu = 0.5 * (width - 1), cv = 0.5 * (height - 1);
  double sum = 0.0;
  for (int v = 0; v < height; ++v)
    for (int u = 0; u < width; ++u) {
      const double d2 = (u - cu) * (u - cu) + (v - cv) * (v - cv);
      sum += w[static_cast<std::size_t>(v) * width + u] = std::exp(-d2 / (2.0 * sigma * sigma));
    }
  for (double& x : w) x /= sum;
  return w;
}

std::vector<double> modulus(const cvec& z) {
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i)
    out[i] = std::sqrt(z[i].real() * z[i].real() + z[i].imag() * z[i].imag());
  return out;
}

double average(const std::vector<double>& weights, const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += weights[i] * x[i];
  return s;
}

// Applies every filter of a bank to one real map, sharing the map's spectrum.
class Convolver {
 public:
  Convolver(const FilterBank& bank, int width, int height, bool frequency)
      : bank_(bank), width_(width), height_(height), frequency_(frequency) {
    if (!frequency_) return;
    cached_ = bank.spectra_for(width == height ? width : -1);
    if (cached_ == nullptr) {
      for (int j = 0; j < bank.scales(); ++j)
        for (int l = 0; l < bank.rotations(); ++l)
          local_.push_back(kernel_spectrum(bank.filter(j, l), width, height));
    }
  }

  void load(const std::vector<double>& x) {
    input_ = &x;
    if (frequency_) spectrum_ = extended_spectrum(x, width_, height_);
  }

  std::vector<double> modulus_response(int j, int l) const {
    if (!frequency_) return modulus(convolve_direct(*input_, width_, height_, bank_.filter(j, l)));
    const std::size_t idx = static_cast<std::size_t>(j) * bank_.rotations() + l;
    const cvec& ks = cached_ ? cached_->filters[idx] : local_[idx];
    return modulus(apply_spectrum(spectrum_, ks, width_, height_));
  }

 private:
  const FilterBank& bank_;
  int width_, height_;
  bool frequency_;
  const FilterBank::Spectra* cached_ = nullptr;
  std::vector<cvec> local_;
  const std::vector<double>* input_ = nullptr;
  cvec spectrum_;
};

}  // namespace

FilterBank::FilterBank(const FilterBankParams& params) : params_(params) {
  if (params.scales < 1) throw Error(ErrorCode::InvalidArgument, "filter bank needs J >= 1");
  if (params.rotations < 2) throw Error(ErrorCode::InvalidArgument, "filter bank needs L >= 2");
  if (!(params.mother.sigma > 0.0) || !(params.mother.xi > 0.0) ||
      !(params.mother.slant > 0.0))
    throw Error(ErrorCode::InvalidArgument, "mother wavelet parameters must be > 0");
  if (params.patch_side < 1)
    throw Error(ErrorCode::InvalidArgument, "patch side must be >= 1");
  for (int j = 0; j < params.scales; ++j)
    for (int l = 0; l < params.rotations; ++l)
      filters_.push_back(make_filter(params.mother, j, l, params.rotations));
  if (2 * filters_.back().radius > params.patch_side)
    throw Error(ErrorCode::InvalidArgument,
                "largest filter support exceeds half the patch side");

  spectra_ = std::make_unique<Spectra>();
  spectra_->side = params.patch_side;
  for (const auto& f : filters_)
    spectra_->filters.push_back(kernel_spectrum(f, params.patch_side, params.patch_side));
}

FilterBank::~FilterBank() = default;
FilterBank::FilterBank(FilterBank&&) noexcept = default;
FilterBank& FilterBank::operator=(FilterBank&&) noexcept = default;

const ComplexKernel& FilterBank::filter(int j, int l) const {
  if (j < 0 || j >= params_.scales || l < 0 || l >= params_.rotations)
    throw Error(ErrorCode::OutOfBounds, "filter index out of range");
  return filters_[static_cast<std::size_t>(j) * params_.rotations + l];
}

double FilterBank::lowpass_sigma() const noexcept {
  return params_.mother.sigma * std::ldexp(1.0, params_.scales);
}

const FilterBank::Spectra* FilterBank::spectra_for(int side) const {
  return spectra_ && spectra_->side == side ? spectra_.get() : nullptr;
}

std::vector<double> ScatteringVector::band_coefficients() const {
  std::vector<double> out(order1);
  out.insert(out.end(), order2.begin(), order2.end());
  return out;
}

std::vector<ScatteringPath> scattering_paths(int scales, int rotations, int order) {
  std::vector<ScatteringPath> paths{{0, -1, -1, -1, -1}};
  for (int j = 0; j < scales; ++j)
    for (int l = 0; l < rotations; ++l) paths.push_back({1, j, l, -1, -1});
  if (order < 2) return paths;
  for (int j1 = 0; j1 < scales; ++j1)
    for (int l1 = 0; l1 < rotations; ++l1)
      for (int j2 = j1 + 1; j2 < scales; ++j2)
        for (int l2 = 0; l2 < rotations; ++l2) paths.push_back({2, j1, l1, j2, l2});
  return paths;
}

std::vector<std::complex<double>> convolve(const std::vector<double>& image,
                                           int width, int height,
                                           const ComplexKernel& kernel,
                                           ConvolutionMethod method) {
  if (image.size() != static_cast<std::size_t>(width) * height)
    throw Error(ErrorCode::InvalidArgument, "image buffer does not match its size");
  const bool frequency =
      method == ConvolutionMethod::Frequency ||
      (method == ConvolutionMethod::Auto && std::min(width, height) >= kFrequencyThreshold);
  if (!frequency) return convolve_direct(image, width, height, kernel);
  return apply_spectrum(extended_spectrum(image, width, height),
                        kernel_spectrum(kernel, width, height), width, height);
}

ScatteringVector scatter(const Image& patch, const FilterBank& bank, int order,
                         ConvolutionMethod method) {
  if (order != 1 && order != 2)
    throw Error(ErrorCode::InvalidArgument, "scattering order must be 1 or 2");
  const int w = patch.width(), h = patch.height();
  const int largest = bank.filter(bank.scales() - 1, 0).side();
  if (std::min(w, h) < largest)
    throw Error(ErrorCode::TooSmall, "patch smaller than the largest filter support");
  const bool frequency =
      method == ConvolutionMethod::Frequency ||
      (method == ConvolutionMethod::Auto && std::min(w, h) >= kFrequencyThreshold);

  const int J = bank.scales(), L = bank.rotations();
  const auto phi = lowpass_weights(w, h, bank.lowpass_sigma());
  const std::vector<double> x(patch.values().begin(), patch.values().end());

  ScatteringVector s;
  s.scales = J;
  s.rotations = L;
  s.order = order;
  s.order0 = average(phi, x);

  Convolver first(bank, w, h, frequency);
  first.load(x);
  Convolver second(bank, w, h, frequency);
  for (int j1 = 0; j1 < J; ++j1)
    for (int l1 = 0; l1 < L; ++l1) {
      const auto u1 = first.modulus_response(j1, l1);
      s.order1.push_back(average(phi, u1));
      if (order < 2 || j1 + 1 >= J) continue;
      second.load(u1);
      for (int j2 = j1 + 1; j2 < J; ++j2)
        for (int l2 = 0; l2 < L; ++l2)
          s.order2.push_back(average(phi, second.modulus_response(j2, l2)));
    }
  // order2 was filled in (j1,l1,j2,l2) lexicographic order already.
  return s;
}

bool patch_fits(const Image& img, const Keypoint& kp, double side) {
  const double c = std::cos(kp.orientation), s = std::sin(kp.orientation);
  const double half = 0.5 * side;
  for (int cy = -1; cy <= 1; cy += 2)
    for (int cx = -1; cx <= 1; cx += 2) {
      const double lx = cx * half, ly = cy * half;
      if (!img.contains(kp.u + c * lx - s * ly, kp.v + s * lx + c * ly)) return false;
    }
  return true;
}

Image extract_patch(const Image& img, const Keypoint& kp, double side, int out_side) {
  if (!(side > 0.0) || out_side < 1)
    throw Error(ErrorCode::InvalidArgument, "patch side must be > 0");
  if (!patch_fits(img, kp, side))
    throw Error(ErrorCode::OutOfBounds, "patch leaves the image");
  const double step = side / out_side;
  const int n = std::max(1, static_cast<int>(std::ceil(step)));
  const double c = std::cos(kp.orientation), s = std::sin(kp.orientation);

  Image out(out_side, out_side);
  for (int j = 0; j < out_side; ++j)
    for (int i = 0; i < out_side; ++i) {
      double acc = 0.0;
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
          const double lx = ((i + 0.5) / out_side - 0.5) * side + ((a + 0.5) / n - 0.5) * step;
          const double ly = ((j + 0.5) / out_side - 0.5) * side + ((b + 0.5) / n - 0.5) * step;
          acc += bilinear(img, kp.u + c * lx - s * ly, kp.v + s * lx + c * ly);
        }
      out(i, j) = acc / (n * n);
    }
  return out;
}

ScatteringVector dsp_scatter(const Image& img, const Keypoint& kp,
                             const SizePrior& prior, const FilterBank& bank,
                             const ScatterConfig& cfg) {
  std::string offending;
  for (const auto& smp : prior.samples())
    if (!patch_fits(img, kp, smp.multiplier * kp.base_size * cfg.support_factor))
      offending += (offending.empty() ? "" : ", ") + csv::num(smp.multiplier);
  if (!offending.empty())
    throw Error(ErrorCode::OutOfBounds,
                "scattering patch leaves the image at size multipliers: " + offending);

  ScatteringVector pooled;
  bool first = true;
  for (const auto& smp : prior.samples()) {
    const Image patch = extract_patch(
        img, kp, smp.multiplier * kp.base_size * cfg.support_factor, cfg.common_side);
    const ScatteringVector s = scatter(patch, bank, cfg.order);
    if (first) {
      pooled = s;
      pooled.order0 = 0.0;
      std::fill(pooled.order1.begin(), pooled.order1.end(), 0.0);
      std::fill(pooled.order2.begin(), pooled.order2.end(), 0.0);
      first = false;
    }
    pooled.order0 += smp.weight * s.order0;
    for (std::size_t i = 0; i < s.order1.size(); ++i) pooled.order1[i] += smp.weight * s.order1[i];
    for (std::size_t i = 0; i < s.order2.size(); ++i) pooled.order2[i] += smp.weight * s.order2[i];
  }
  return pooled;
}

Descriptor scattering_descriptor(const ScatteringVector& s, const Keypoint& kp) {
  DescriptorConfig cfg;
  cfg.cells = 1;
  cfg.bins = static_cast<int>(s.order1.size() + s.order2.size());
  return finalize_descriptor(s.band_coefficients(), kp, cfg);
}

void write_scattering_csv(std::ostream& out, const ScatteringVector& s,
                          int keypoint_index, bool header) {
  if (header) out << "keypoint,order,j1,l1,j2,l2,value\n";
  const auto paths = scattering_paths(s.scales, s.rotations, s.order);
  std::vector<double> values{s.order0};
  values.insert(values.end(), s.order1.begin(), s.order1.end());
  values.insert(values.end(), s.order2.begin(), s.order2.end());
  for (std::size_t i = 0; i < paths.size() && i < values.size(); ++i) {
    const auto& p = paths[i];
    out << keypoint_index << ',' << p.order << ',' << p.j1 << ',' << p.l1 << ','
        << p.j2 << ',' << p.l2 << ',' << csv::num(values[i]) << '\n';
  }
}

}  // namespace orbitpool
