#include "exinf/doubleslit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "exinf/error.hpp"

namespace exinf {

namespace {

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

DetectorPattern normalize_intensity(std::vector<double> centers, std::vector<double> intensity) {
  double total = 0.0;
  for (double v : intensity) total += v;
  if (!(total > 0.0)) throw InvalidArgument("detector pattern has zero total intensity");
  std::vector<double> prob(intensity.size());
  for (std::size_t i = 0; i < prob.size(); ++i) prob[i] = intensity[i] / total;
  return DetectorPattern{std::move(centers), std::move(prob), std::move(intensity)};
}

// Vertex of the parabola through (i-1, i, i+1), as an offset in bins.
double parabolic_offset(const std::vector<double>& p, std::size_t i) {
  const double curvature = p[i - 1] - 2.0 * p[i] + p[i + 1];
  if (curvature == 0.0) return 0.0;
  return std::clamp(0.5 * (p[i - 1] - p[i + 1]) / curvature, -0.5, 0.5);
}

}  // namespace

void SlitConfig::validate() const {
  if (!positive_finite(separation)) throw InvalidArgument("slit separation must be > 0");
  if (!positive_finite(screen_distance)) throw InvalidArgument("screen distance must be > 0");
  if (!positive_finite(wavenumber)) throw InvalidArgument("wavenumber must be > 0");
  if (!positive_finite(screen_halfwidth)) throw InvalidArgument("screen halfwidth must be > 0");
  if (bins < 16) throw InvalidArgument("bins must be >= 16, got " + std::to_string(bins));
  const double weight = std::norm(alpha1) + std::norm(alpha2);
  if (std::abs(weight - 1.0) > 1e-10) {
    throw InvalidArgument("|alpha1|^2 + |alpha2|^2 must be 1, got " + std::to_string(weight));
  }
  if (mode.kind == VisibilityMode::Kind::partial && !(mode.eta >= 0.0 && mode.eta <= 1.0)) {
    throw InvalidArgument("partial visibility eta must lie in [0, 1]");
  }
}

double SlitConfig::wavelength() const { return 2.0 * std::numbers::pi / wavenumber; }

std::vector<double> SlitConfig::bin_centers() const {
  const double width = 2.0 * screen_halfwidth / static_cast<double>(bins);
  std::vector<double> x(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    x[b] = -screen_halfwidth + (static_cast<double>(b) + 0.5) * width;
  }
  return x;
}

std::vector<Complex> slit_field(int slit_index, const SlitConfig& config) {
  config.validate();
  if (slit_index != 1 && slit_index != 2) throw InvalidArgument("slit index must be 1 or 2");
  const double y = (slit_index == 1 ? 0.5 : -0.5) * config.separation;
  const auto x = config.bin_centers();
  std::vector<Complex> psi(x.size());
  for (std::size_t b = 0; b < x.size(); ++b) {
    const double r = std::hypot(config.screen_distance, x[b] - y);
    psi[b] = std::polar(1.0 / std::sqrt(r), config.wavenumber * r);
  }
  return psi;
}

DetectorPattern pattern_particle(const SlitConfig& config) {
  const auto psi1 = slit_field(1, config);
  const auto psi2 = slit_field(2, config);
  const double w1 = std::norm(config.alpha1);
  const double w2 = std::norm(config.alpha2);
  std::vector<double> intensity(psi1.size());
  for (std::size_t b = 0; b < intensity.size(); ++b) {
    intensity[b] = w1 * std::norm(psi1[b]) + w2 * std::norm(psi2[b]);
  }
  return normalize_intensity(config.bin_centers(), std::move(intensity));
}

DetectorPattern pattern_wave(const SlitConfig& config) {
  const auto psi1 = slit_field(1, config);
  const auto psi2 = slit_field(2, config);
  std::vector<double> intensity(psi1.size());
  for (std::size_t b = 0; b < intensity.size(); ++b) {
    intensity[b] = std::norm(config.alpha1 * psi1[b] + config.alpha2 * psi2[b]);
  }
  return normalize_intensity(config.bin_centers(), std::move(intensity));
}

DetectorPattern pattern_partial(const SlitConfig& config) {
  if (config.mode.kind != VisibilityMode::Kind::partial) {
    throw InvalidArgument("pattern_partial needs a partial visibility mode");
  }
  const double eta = config.mode.eta;
  const DetectorPattern wave = pattern_wave(config);
  const DetectorPattern particle = pattern_particle(config);
  DetectorPattern out{wave.bin_centers, std::vector<double>(wave.probabilities.size()),
                      std::vector<double>(wave.intensity.size())};
  for (std::size_t b = 0; b < out.probabilities.size(); ++b) {
    out.probabilities[b] = eta * wave.probabilities[b] + (1.0 - eta) * particle.probabilities[b];
    out.intensity[b] = eta * wave.intensity[b] + (1.0 - eta) * particle.intensity[b];
  }
  return out;
}

DetectorPattern detector_pattern(const SlitConfig& config) {
  switch (config.mode.kind) {
    case VisibilityMode::Kind::individual:
      return pattern_particle(config);
    case VisibilityMode::Kind::full:
      return pattern_wave(config);
    case VisibilityMode::Kind::partial:
      return pattern_partial(config);
  }
  throw InvalidArgument("unknown visibility mode");
}

FringeMetrics fringe_metrics(const DetectorPattern& pattern) {
  const auto& p = pattern.probabilities;
  const auto& x = pattern.bin_centers;
  FringeMetrics out;
  if (p.size() < 3) return out;
  const double dx = x[1] - x[0];

  std::vector<std::size_t> maxima, minima;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    if (p[i] > p[i - 1] && p[i] >= p[i + 1]) maxima.push_back(i);
    if (p[i] < p[i - 1] && p[i] <= p[i + 1]) minima.push_back(i);
  }
  out.maxima = maxima.size();
  if (maxima.size() >= 3) {
    const double first = x[maxima.front()] + parabolic_offset(p, maxima.front()) * dx;
    const double last = x[maxima.back()] + parabolic_offset(p, maxima.back()) * dx;
    out.spacing = (last - first) / static_cast<double>(maxima.size() - 1);
  }
  if (maxima.empty() || minima.empty()) return out;

  const double center = 0.5 * (x.front() + x.back());
  const std::size_t peak = *std::min_element(
      maxima.begin(), maxima.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(x[a] - center) < std::abs(x[b] - center);
      });
  double trough_sum = 0.0;
  int troughs = 0;
  const auto right = std::upper_bound(minima.begin(), minima.end(), peak);
  if (right != minima.end()) {
    trough_sum += p[*right];
    ++troughs;
  }
  if (right != minima.begin()) {
    trough_sum += p[*std::prev(right)];
    ++troughs;
  }
  const double i_max = p[peak];
  const double i_min = trough_sum / troughs;
  out.visibility = (i_max + i_min) > 0.0 ? (i_max - i_min) / (i_max + i_min) : 0.0;
  return out;
}

std::vector<std::uint64_t> sample_hits(const DetectorPattern& pattern, std::uint64_t n,
                                       std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("sample_hits: need at least one draw");
  const auto& p = pattern.probabilities;
  if (p.empty()) throw InvalidArgument("sample_hits: empty pattern");
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t b = 0; b < p.size(); ++b) {
    if (!(p[b] >= 0.0)) throw InvalidArgument("sample_hits: negative probability");
    acc += p[b];
    cdf[b] = acc;
  }
  if (!(acc > 0.0)) throw InvalidArgument("sample_hits: pattern has no weight");

  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> counts(p.size(), 0);
  for (std::uint64_t k = 0; k < n; ++k) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) it = std::prev(cdf.end());
    ++counts[static_cast<std::size_t>(it - cdf.begin())];
  }
  return counts;
}

}  // namespace exinf
