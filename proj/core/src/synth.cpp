#include "ssma/synth.hpp"

#include <cmath>
#include <numbers>

#include "ssma/error.hpp"
#include "ssma/random.hpp"

namespace ssma {

Eigen::Matrix2d Deformation::linear() const {
  const double theta = rotation_deg * std::numbers::pi / 180.0;
  // Exact values at multiples of 90 degrees keep the toy presets free of
  // 1e-17 residue from cos(pi/2).
  double c = std::cos(theta), s = std::sin(theta);
  if (std::fmod(rotation_deg, 90.0) == 0.0) {
    c = std::round(c);
    s = std::round(s);
  }
  Eigen::Matrix2d rot;
  rot << c, -s, s, c;
  return scale * rot;
}

Deformation Deformation::inverse() const {
  if (!(scale > 0.0)) throw ParameterError("deformation scale must be > 0");
  Deformation inv;
  inv.scale = 1.0 / scale;
  inv.rotation_deg = -rotation_deg;
  inv.translation = -(inv.linear() * translation);
  return inv;
}

Deformation Deformation::after(const Deformation& first) const {
  Deformation out;
  out.scale = scale * first.scale;
  out.rotation_deg = rotation_deg + first.rotation_deg;
  out.translation = linear() * first.translation + translation;
  return out;
}

Eigen::MatrixXd apply_deformation(const Eigen::MatrixXd& points,
                                  const Deformation& deform) {
  if (points.rows() != 2)
    throw ValidationError("deformation expects 2-row points, got " +
                          std::to_string(points.rows()) + " rows");
  if (!(deform.scale > 0.0))
    throw ParameterError("deformation scale must be > 0");
  return (deform.linear() * points).colwise() + deform.translation;
}

Deformation toy_setting(const std::string& name) {
  Deformation d;
  if (name == "none") return d;
  if (name == "s" || name == "sr" || name == "srt") d.scale = 2.0;
  if (name == "sr" || name == "srt") d.rotation_deg = 90.0;
  if (name == "srt") d.translation = Eigen::Vector2d(4.0, 4.0);
  if (name != "s" && name != "sr" && name != "srt")
    throw ParameterError("unknown toy setting '" + name +
                         "' (expected none, s, sr or srt)");
  return d;
}

double spiral_arc_length(const SpiralShape& shape, double tau) {
  const double a = shape.inner_radius, b = shape.growth;
  if (b == 0.0) return a * (tau - shape.tau_begin);
  auto primitive = [&](double t) {
    const double u = a + b * t;
    const double h = std::sqrt(u * u + b * b);
    return (0.5 * u * h + 0.5 * b * b * std::log(u + h)) / b;
  };
  return primitive(tau) - primitive(shape.tau_begin);
}

double spiral_tau_at_length(const SpiralShape& shape, double length) {
  double lo = shape.tau_begin, hi = shape.tau_end;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (spiral_arc_length(shape, mid) < length ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

DomainDataset draw_spiral(const std::string& id, Index n_per_class,
                          int classes, const SpiralShape& shape, Rng& rng) {
  const double total = spiral_arc_length(shape, shape.tau_end);
  const double band = total / classes;
  DomainDataset dom;
  dom.id = id;
  dom.name = "spiral " + id;
  dom.features.resize(2, n_per_class * classes);
  Index col = 0;
  for (int c = 0; c < classes; ++c) {
    for (Index i = 0; i < n_per_class; ++i, ++col) {
      const double s = band * (c + rng.uniform());
      const double tau = spiral_tau_at_length(shape, s);
      const double r = shape.inner_radius + shape.growth * tau;
      const double nx = rng.normal(), ny = rng.normal();
      dom.features(0, col) = r * std::cos(tau) + shape.noise_sd * nx;
      dom.features(1, col) = r * std::sin(tau) + shape.noise_sd * ny;
      dom.labels.push_back(c + 1);
    }
  }
  return dom;
}

}  // namespace

MultiDomainDataset make_spiral_pair(Index n_per_class, int classes,
                                    const Deformation& deform,
                                    std::uint64_t seed,
                                    const SpiralShape& shape) {
  if (classes < 2) throw ParameterError("spiral needs at least 2 classes");
  if (n_per_class < 1) throw ParameterError("n_per_class must be >= 1");
  if (!(shape.tau_end > shape.tau_begin) || shape.inner_radius < 0.0 ||
      shape.growth < 0.0 || shape.noise_sd < 0.0)
    throw ParameterError("invalid spiral shape");

  Rng first(derive_seed(seed, "spiral/1"));
  Rng second(derive_seed(seed, "spiral/2"));
  auto d1 = draw_spiral("1", n_per_class, classes, shape, first);
  auto d2 = draw_spiral("2", n_per_class, classes, shape, second);
  d2.features = apply_deformation(d2.features, deform);
  return MultiDomainDataset({std::move(d1), std::move(d2)}, classes);
}

}  // namespace ssma
