#pragma once

#include <cmath>
#include <functional>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hyposym/surface.hpp"

namespace hyposym {

// Height profile F(s) of a rotationally symmetric sheet, s = |x'|.
struct RadialProfile {
  std::function<double(double)> F;
  std::function<double(double)> dF;
  std::function<double(double)> d2F;
  double d2F_at_zero = 0.0;  // limit of F'(s)/s as s -> 0 (equals F''(0))
};

// f(x') = F(|x'|) with gradient F' x/s and Hessian F'' x^ x^T + (F'/s)(I - x^ x^T).
inline HeightFunction radial_height(RadialProfile p, int dim) {
  HeightFunction f;
  f.value = [p](Vec2 x) { return p.F(norm(x)); };
  f.gradient = [p](Vec2 x) {
    const double s = norm(x);
    if (s < 1e-12) return Vec2{0.0, 0.0};
    return p.dF(s) / s * x;
  };
  f.hessian = [p, dim](Vec2 x) {
    const double s = norm(x);
    Mat2 m;
    if (s < 1e-12) {
      m.xx = p.d2F_at_zero;
      m.yy = dim == 2 ? p.d2F_at_zero : 0.0;
      return m;
    }
    const double a = p.d2F(s);
    if (dim == 1) {
      m.xx = a;
      return m;
    }
    const double b = p.dF(s) / s;
    const Vec2 u = x / s;
    m.xx = a * u.x * u.x + b * (1.0 - u.x * u.x);
    m.xy = (a - b) * u.x * u.y;
    m.yy = a * u.y * u.y + b * (1.0 - u.y * u.y);
    return m;
  };
  return f;
}

// Area of the graph of F over the radial band lying within delta of the
// boundary radius s_edge; inward = +1 for an outer edge (band s_edge-delta..s_edge),
// -1 for an inner edge. Uses s = s_edge -/+ u^2, which removes the square-root
// blow-up of F' at the edge.
inline double radial_band_area(const RadialProfile& p, double s_edge, double delta, int inward, int dim) {
  auto integrand = [&](double u) {
    const double s = s_edge - inward * u * u;
    const double d = p.dF(s);
    const double jac = dim == 2 ? 2.0 * std::numbers::pi * s : 1.0;
    return jac * std::sqrt(1.0 + d * d) * 2.0 * u;
  };
  using boost::math::quadrature::gauss_kronrod;
  // One-dimensional band: one edge point on each side of the axis.
  const double copies = dim == 1 ? 2.0 : 1.0;
  return copies * gauss_kronrod<double, 31>::integrate(integrand, 0.0, std::sqrt(delta), 8, 1e-10);
}

} // namespace hyposym
