// synth.hpp - two-spiral toy domains under scale / rotation / translation.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>

#include "ssma/dataset.hpp"

namespace ssma {

/// x -> scale * R(rotation_deg) * x + translation.
struct Deformation {
  double scale = 1.0;
  double rotation_deg = 0.0;
  Eigen::Vector2d translation = Eigen::Vector2d::Zero();

  Eigen::Matrix2d linear() const;
  Deformation inverse() const;
  /// The single map equal to applying `first`, then `*this`.
  Deformation after(const Deformation& first) const;
};

Eigen::MatrixXd apply_deformation(const Eigen::MatrixXd& points,
                                  const Deformation& deform);

/// Archimedean spiral r = inner_radius + growth * tau, tau in
/// [tau_begin, tau_end].
struct SpiralShape {
  double inner_radius = 0.5;
  double growth = 0.4;
  double tau_begin = 0.0;
  double tau_end = 3.0 * 3.14159265358979323846;
  double noise_sd = 0.05;

  bool operator==(const SpiralShape&) const = default;
};

/// Named deformation presets for the three toy settings (s, sr, srt).
Deformation toy_setting(const std::string& name);

/// Two 2-D domains "1" and "2", each with n_per_class * classes labeled
/// samples. Classes are contiguous equal-arc-length bands of the spiral;
/// positions are uniform in arc length within a band. Domain "2" is an
/// independent draw of the same generator passed through `deform`.
MultiDomainDataset make_spiral_pair(Index n_per_class, int classes,
                                    const Deformation& deform,
                                    std::uint64_t seed,
                                    const SpiralShape& shape = {});

/// Arc length from tau_begin to tau, in closed form.
double spiral_arc_length(const SpiralShape& shape, double tau);
/// Inverse of spiral_arc_length on [tau_begin, tau_end].
double spiral_tau_at_length(const SpiralShape& shape, double length);

}  // namespace ssma
