#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hyposym/error.hpp"
#include "hyposym/grid_region.hpp"
#include "hyposym/radial.hpp"
#include "hyposym/surface.hpp"

namespace hyposym {

struct CorpusParams {
  double r = 1.0;      // sphere radius
  double a = 1.0;      // ellipsoid equatorial semi-axis
  double c = 0.5;      // ellipsoid polar semi-axis
  double R0 = 2.0;     // torus centre-line radius
  double rho = 0.5;    // torus tube radius
  double eps = 0.1;    // perturbed_sphere amplitude
  double shift = 0.0;  // vertical translation applied to both sheets
  int dim = 2;
};

// What a corpus entry is known to do. The CLI compares observed verdicts
// against these flags.
struct ExpectedProfile {
  bool main_assumption = true;
  bool condition_S = true;
  bool condition_Sprime = true;
  bool symmetric = true;
};

struct CorpusInfo {
  std::string name;
  std::string kind;  // "surface" or "curve"
  std::string parameters;
  ExpectedProfile expected;
};

inline const std::vector<CorpusInfo>& corpus_list() {
  static const std::vector<CorpusInfo> list = {
      {"sphere", "surface", "r, shift", {true, true, true, true}},
      {"ellipsoid", "surface", "a, c, shift", {true, true, true, true}},
      {"torus", "surface", "R0, rho, shift", {true, false, true, true}},
      {"perturbed_sphere", "surface", "eps", {false, true, true, false}},
      {"slanted_tube", "curve", "(fixed shape)", {true, false, false, false}},
      {"circle", "curve", "r", {true, true, true, true}},
      {"ellipse", "curve", "a, c", {true, true, true, true}},
  };
  return list;
}

inline const CorpusInfo& corpus_info(const std::string& name) {
  for (const auto& e : corpus_list())
    if (e.name == name) return e;
  throw Error("unknown-surface", name);
}

namespace detail {

inline void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error("invalid-parameter", std::string(what) + " must be positive");
}

inline RadialProfile shifted(RadialProfile p, double shift) {
  if (shift != 0.0) {
    auto F = p.F;
    p.F = [F, shift](double s) { return F(s) + shift; };
  }
  return p;
}

inline RadialProfile negated(RadialProfile p) {
  auto F = p.F, dF = p.dF, d2F = p.d2F;
  return {[F](double s) { return -F(s); }, [dF](double s) { return -dF(s); }, [d2F](double s) { return -d2F(s); },
          -p.d2F_at_zero};
}

// 1 - (s/a)^2 in factored form, accurate near s = a.
inline double cap_gap(double s, double a) { return std::max(0.0, (1.0 - s / a) * (1.0 + s / a)); }

// c * sqrt(1 - (s/a)^2)
inline RadialProfile elliptic_cap(double a, double c) {
  RadialProfile p;
  p.F = [a, c](double s) { return c * std::sqrt(cap_gap(s, a)); };
  p.dF = [a, c](double s) { return -c * s / (a * a * std::sqrt(std::max(1e-300, cap_gap(s, a)))); };
  p.d2F = [a, c](double s) {
    const double w = std::max(1e-300, cap_gap(s, a));
    return -c / (a * a * w * std::sqrt(w));
  };
  p.d2F_at_zero = -c / (a * a);
  return p;
}

inline std::shared_ptr<const GridRegion> disk_region(double radius, double h, int dim) {
  const double m = radius + 6.0 * h;
  auto ind = [radius](Vec2 x) { return norm(x) < radius; };
  return std::make_shared<const GridRegion>(build_region(ind, {{-m, -m}, {m, m}}, h, dim));
}

inline DoubleGraphSurface radial_double_graph(const RadialProfile& up, const RadialProfile& lo, double radius,
                                              double h, int dim, double shift, std::string label) {
  auto s = make_double_graph(disk_region(radius, h, dim), radial_height(shifted(up, shift), dim),
                             radial_height(shifted(lo, shift), dim), 0.0, std::move(label));
  s.collar_area = [up, lo, radius, dim](double delta) {
    return radial_band_area(up, radius, delta, +1, dim) + radial_band_area(lo, radius, delta, +1, dim);
  };
  return s;
}

} // namespace detail

inline DoubleGraphSurface make_sphere(double r, double h, double shift = 0.0, int dim = 2) {
  detail::require_positive(r, "r");
  const auto up = detail::elliptic_cap(r, r);
  auto s = detail::radial_double_graph(up, detail::negated(up), r, h, dim, shift, "sphere");
  s.interior_ball_radius = r;
  return s;
}

inline DoubleGraphSurface make_ellipsoid(double a, double c, double h, double shift = 0.0, int dim = 2) {
  detail::require_positive(a, "a");
  detail::require_positive(c, "c");
  const auto up = detail::elliptic_cap(a, c);
  auto s = detail::radial_double_graph(up, detail::negated(up), a, h, dim, shift, "ellipsoid");
  s.interior_ball_radius = std::min(c * c / a, a * a / c);
  return s;
}

inline DoubleGraphSurface make_perturbed_sphere(double eps, double h, double shift = 0.0, int dim = 2) {
  detail::require_positive(eps, "eps");
  const auto cap = detail::elliptic_cap(1.0, 1.0);
  RadialProfile up = cap;
  up.F = [F = cap.F, eps](double s) { return F(s) + eps * (1 - s * s) * (1 - s * s); };
  up.dF = [dF = cap.dF, eps](double s) { return dF(s) - 4.0 * eps * s * (1 - s * s); };
  up.d2F = [d2F = cap.d2F, eps](double s) { return d2F(s) - 4.0 * eps * (1 - 3 * s * s); };
  up.d2F_at_zero = cap.d2F_at_zero - 4.0 * eps;
  return detail::radial_double_graph(up, detail::negated(cap), 1.0, h, dim, shift, "perturbed_sphere");
}

// Torus of revolution about the vertical axis; projection is the annulus
// R0 - rho < |x'| < R0 + rho.
inline DoubleGraphSurface make_torus(double R0, double rho, double h, double shift = 0.0) {
  detail::require_positive(R0, "R0");
  detail::require_positive(rho, "rho");
  if (rho >= R0) throw Error("invalid-parameter", "torus needs rho < R0");
  RadialProfile up;
  auto gap = [R0, rho](double s) { return std::max(0.0, (rho - (s - R0)) * (rho + (s - R0))); };
  up.F = [gap](double s) { return std::sqrt(gap(s)); };
  up.dF = [gap, R0](double s) { return -(s - R0) / std::sqrt(std::max(1e-300, gap(s))); };
  up.d2F = [gap, rho](double s) {
    const double w = std::max(1e-300, gap(s));
    return -rho * rho / (w * std::sqrt(w));
  };
  const auto lo = detail::negated(up);
  const double outer = R0 + rho, inner = R0 - rho, m = outer + 6.0 * h;
  auto ind = [inner, outer](Vec2 x) {
    const double s = norm(x);
    return s > inner && s < outer;
  };
  auto region = std::make_shared<const GridRegion>(build_region(ind, {{-m, -m}, {m, m}}, h, 2));
  auto s = make_double_graph(region, radial_height(detail::shifted(up, shift), 2),
                             radial_height(detail::shifted(lo, shift), 2), 0.0, "torus");
  s.collar_area = [up, lo, inner, outer](double delta) {
    return radial_band_area(up, outer, delta, +1, 2) + radial_band_area(lo, outer, delta, +1, 2) +
           radial_band_area(up, inner, delta, -1, 2) + radial_band_area(lo, inner, delta, -1, 2);
  };
  s.interior_ball_radius = rho;
  return s;
}

inline DoubleGraphSurface corpus_surface(const std::string& name, const CorpusParams& p, double h) {
  if (name == "sphere") return make_sphere(p.r, h, p.shift, p.dim);
  if (name == "ellipsoid") return make_ellipsoid(p.a, p.c, h, p.shift, p.dim);
  if (name == "perturbed_sphere") return make_perturbed_sphere(p.eps, h, p.shift, p.dim);
  if (name == "torus") return make_torus(p.R0, p.rho, h, p.shift);
  if (name == "slanted_tube" || name == "circle" || name == "ellipse")
    throw Error("not-a-surface", name + " is a plane curve");
  throw Error("unknown-surface", name);
}

} // namespace hyposym
