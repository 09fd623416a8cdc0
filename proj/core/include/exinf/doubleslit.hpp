#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "exinf/grid.hpp"

namespace exinf {

/// Which slits the screen "sees" when an event happens.
///
/// individual: each slit state is a basis vector on its own (particle picture).
/// full: the alpha-superposition is the basis vector (wave picture).
/// partial: convex mixture eta * full + (1 - eta) * individual.
struct VisibilityMode {
  enum class Kind { individual, full, partial };
  Kind kind = Kind::full;
  double eta = 1.0;

  static VisibilityMode individual() { return {Kind::individual, 0.0}; }
  static VisibilityMode full() { return {Kind::full, 1.0}; }
  static VisibilityMode partial(double eta) { return {Kind::partial, eta}; }
};

/// Two point slits at (0, +d/2) and (0, -d/2), a screen along x at distance L.
struct SlitConfig {
  double separation = 1.0;        ///< d
  double screen_distance = 50.0;  ///< L
  double wavenumber = 1.0;        ///< kappa; energy kappa^2
  double screen_halfwidth = 10.0; ///< screen spans [-W, W]
  std::size_t bins = 256;
  Complex alpha1{1.0 / 1.4142135623730951, 0.0};
  Complex alpha2{1.0 / 1.4142135623730951, 0.0};
  VisibilityMode mode = VisibilityMode::full();

  /// Throws InvalidArgument on any broken invariant (bins >= 16,
  /// |alpha1|^2 + |alpha2|^2 = 1 within 1e-10, eta in [0, 1], lengths > 0).
  void validate() const;
  double wavelength() const;
  /// Midpoints of `bins` equal bins covering [-W, W].
  std::vector<double> bin_centers() const;
};

struct DetectorPattern {
  std::vector<double> bin_centers;
  std::vector<double> probabilities;  ///< nonnegative, sums to 1
  std::vector<double> intensity;      ///< before normalization
};

/// e^{i kappa r} / sqrt(r) at every bin center, r the distance from slit 1 or 2.
std::vector<Complex> slit_field(int slit_index, const SlitConfig& config);

/// |a1|^2 |psi1|^2 + |a2|^2 |psi2|^2.
DetectorPattern pattern_particle(const SlitConfig& config);

/// |a1 psi1 + a2 psi2|^2.
DetectorPattern pattern_wave(const SlitConfig& config);

/// eta * wave + (1 - eta) * particle. Throws InvalidArgument unless the mode is partial.
DetectorPattern pattern_partial(const SlitConfig& config);

/// Dispatches on config.mode.
DetectorPattern detector_pattern(const SlitConfig& config);

struct FringeMetrics {
  /// Mean distance between consecutive interior maxima, refined to sub-bin
  /// precision; absent unless there are at least three maxima.
  std::optional<double> spacing;
  /// (I_max - I_min)/(I_max + I_min) for the maximum nearest the screen
  /// center and its neighbouring minima; 0 without a maximum and a minimum.
  double visibility = 0.0;
  std::size_t maxima = 0;
};

FringeMetrics fringe_metrics(const DetectorPattern& pattern);

/// Counts per bin of n seeded inverse-CDF draws. Same seed, same counts.
std::vector<std::uint64_t> sample_hits(const DetectorPattern& pattern, std::uint64_t n,
                                       std::uint64_t seed);

}  // namespace exinf
