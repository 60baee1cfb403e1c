#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

namespace hyposym {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator/(const Vec2& a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
constexpr double norm2(const Vec2& a) { return dot(a, a); }

inline Vec2 normalized(const Vec2& a) {
  const double n = norm(a);
  return n > 0.0 ? a / n : Vec2{};
}

// Symmetric 2x2 matrix.
struct Mat2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  friend constexpr Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.xx + b.xx, a.xy + b.xy, a.yy + b.yy};
  }
  friend constexpr Mat2 operator*(double s, const Mat2& a) { return {s * a.xx, s * a.xy, s * a.yy}; }
};

constexpr Vec2 operator*(const Mat2& m, const Vec2& v) {
  return {m.xx * v.x + m.xy * v.y, m.xy * v.x + m.yy * v.y};
}
constexpr double trace(const Mat2& m) { return m.xx + m.yy; }

// Eigenvalues of a symmetric 2x2 matrix, ascending.
inline std::pair<double, double> eigenvalues(const Mat2& m) {
  const double mean = 0.5 * (m.xx + m.yy);
  const double half_diff = 0.5 * (m.xx - m.yy);
  const double r = std::hypot(half_diff, m.xy);
  return {mean - r, mean + r};
}

} // namespace hyposym
