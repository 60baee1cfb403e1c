#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "hyposym/grid_region.hpp"

using namespace hyposym;
using Catch::Approx;

namespace {

GridRegion unit_disk(double h) {
  return build_region([](Vec2 p) { return norm2(p) < 1.0; }, {{-1.1, -1.1}, {1.1, 1.1}}, h);
}

GridRegion annulus(double h) {
  return build_region(
      [](Vec2 p) {
        const double s = norm(p);
        return s > 1.5 && s < 2.5;
      },
      {{-2.6, -2.6}, {2.6, 2.6}}, h);
}

// Test-only oracle: does the open ball B(c, rho) contain a grid cell of the
// opposite side? Exhaustive scan over all cells.
bool ball_hits_opposite(const GridRegion& r, Vec2 c, double rho, bool interior, double slack) {
  const auto& g = r.grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (r.inside(k) == interior) continue;
    if (norm(g.center(k) - c) < rho - slack) return true;
  }
  return false;
}

} // namespace

TEST_CASE("unit disk measure and boundary distance", "[grid]") {
  const auto disk = unit_disk(0.01);
  CHECK(measure(disk) == Approx(std::numbers::pi).margin(0.05));
  // dist_boundary is positive exactly on inside cells and tracks 1 - |x|.
  const auto& g = disk.grid();
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK((disk.dist(k) > 0.0) == disk.inside(k));
    worst = std::max(worst, std::abs(disk.dist(k) - (1.0 - norm(g.center(k)))));
  }
  CHECK(worst < 0.01);
}

TEST_CASE("annulus boundary samples sit on both circles", "[grid]") {
  const double h = 0.01;
  const auto ring = annulus(h);
  int inner = 0, outer = 0;
  for (const auto& b : ring.boundary()) {
    const double s = norm(b.point);
    if (std::abs(s - 1.5) < 2 * h) {
      ++inner;
      // Outward normal at the inner circle points toward the axis.
      CHECK(dot(b.outward, b.point / s) == Approx(-1.0).margin(1e-3));
    } else {
      CHECK(std::abs(s - 2.5) < 2 * h);
      ++outer;
      CHECK(dot(b.outward, b.point / s) == Approx(1.0).margin(1e-3));
    }
  }
  CHECK(inner > 0);
  CHECK(outer > 0);
}

TEST_CASE("build_region error paths", "[grid]") {
  CHECK_THROWS_MATCHES(build_region([](Vec2) { return false; }, {{-1, -1}, {1, 1}}, 0.05),
                       Error, Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == "empty-region"; }));
  auto two_blobs = [](Vec2 p) { return norm2(p - Vec2{-1, 0}) < 0.25 || norm2(p - Vec2{1, 0}) < 0.25; };
  CHECK_THROWS_MATCHES(build_region(two_blobs, {{-2, -1}, {2, 1}}, 0.05), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == "disconnected-region"; }));
  CHECK_THROWS_AS(build_region([](Vec2) { return true; }, {{-1, -1}, {1, 1}}, 0.05), Error);
}

TEST_CASE("erosion of disk and annulus", "[grid]") {
  const double h = 0.01;
  const auto disk = unit_disk(h);
  const auto half = erode(disk, 0.5);
  CHECK(measure(half) == Approx(std::numbers::pi / 4).margin(0.05));
  CHECK(erode(disk, 2.0).mask.empty());

  const auto ring = annulus(h);
  const auto eroded = erode(ring, 0.25);
  const auto& g = ring.grid();
  double rmin = 1e9, rmax = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!eroded.mask[k]) continue;
    rmin = std::min(rmin, norm(g.center(k)));
    rmax = std::max(rmax, norm(g.center(k)));
  }
  CHECK(rmin == Approx(1.75).margin(2 * h));
  CHECK(rmax == Approx(2.25).margin(2 * h));
}

TEST_CASE("erosion measure is linear in delta", "[grid]") {
  const double h = 0.01;
  const auto disk = unit_disk(h);
  // Oracle: |R \ R_delta| = pi (1 - (1 - delta)^2).
  const double d1 = 0.1, d2 = 0.05;
  const double collar1 = measure_difference(disk.mask(), erode(disk, d1).mask);
  const double collar2 = measure_difference(disk.mask(), erode(disk, d2).mask);
  CHECK(collar1 == Approx(0.597).margin(0.05));
  CHECK(std::abs(collar2 / d2 - collar1 / d1) / (collar1 / d1) < 0.10);
  CHECK(measure_difference(disk.mask(), disk.mask()) == 0.0);

  const auto other = build_region([](Vec2 p) { return norm2(p) < 1.0; }, {{-1.2, -1.2}, {1.2, 1.2}}, h);
  CHECK_THROWS_MATCHES(difference(disk.mask(), other.mask()), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == "grid-mismatch"; }));
}

TEST_CASE("erosion is monotone", "[grid][property]") {
  const auto ring = annulus(0.02);
  double previous = measure(ring);
  for (double delta : {0.02, 0.05, 0.1, 0.2, 0.3, 0.45, 0.6}) {
    const auto e = erode(ring, delta);
    const double m = measure(e);
    CHECK(m <= previous);
    for (std::size_t k = 0; k < e.mask.bits.size(); ++k)
      if (e.mask[k]) CHECK(ring.inside(k));
    previous = m;
  }
}

TEST_CASE("dist_boundary balls contain only inside cells", "[grid][property]") {
  const double h = 0.02;
  const auto ring = annulus(h);
  const auto& g = ring.grid();
  // Every 37th inside cell: ball of radius dist - 2h holds no outside cell.
  for (std::size_t k = 0; k < g.size(); k += 37) {
    if (!ring.inside(k)) continue;
    const double rho = ring.dist(k) - 2 * h;
    if (rho <= 0) continue;
    CHECK_FALSE(ball_hits_opposite(ring, g.center(k), rho, true, 0.0));
  }
}

TEST_CASE("ball condition radii", "[grid]") {
  const double h = 0.01;
  const auto disk = unit_disk(h);
  const auto in = ball_condition_radius(disk, BallSide::interior);
  CHECK(in.radius == Approx(1.0).margin(0.05));
  const auto out = ball_condition_radius(disk, BallSide::exterior);
  CHECK(out.capped);

  const auto ring = annulus(h);
  const auto ring_in = ball_condition_radius(ring, BallSide::interior);
  const auto ring_out = ball_condition_radius(ring, BallSide::exterior);
  CHECK(ring_in.radius == Approx(0.5).margin(0.05));
  CHECK(ring_out.radius == Approx(1.5).margin(0.05));
  CHECK_FALSE(ring_out.capped);

  const auto square = build_region([](Vec2 p) { return std::abs(p.x) < 0.5 && std::abs(p.y) < 0.5; },
                                   {{-0.6, -0.6}, {0.6, 0.6}}, h);
  const auto sq = ball_condition_radius(square, BallSide::interior);
  CHECK(sq.no_c11);
  CHECK(sq.radius < 0.05);
}

TEST_CASE("ball radius agrees with brute-force ball test on the annulus", "[grid][oracle]") {
  const double h = 0.02;
  const auto ring = annulus(h);
  const auto est = ball_condition_radius(ring, BallSide::interior);
  // At the estimated radius every sampled boundary point admits a ball free
  // of outside cells (up to one cell), and at radius + 3h some point does not.
  bool all_ok = true, some_fail = false;
  std::size_t idx = 0;
  for (const auto& b : ring.boundary()) {
    if (idx++ % 11) continue;
    all_ok &= !ball_hits_opposite(ring, b.point - est.radius * b.outward, est.radius, true, h);
    const double big = est.radius + 3 * h;
    some_fail |= ball_hits_opposite(ring, b.point - big * b.outward, big, true, h);
  }
  CHECK(all_ok);
  CHECK(some_fail);
}

TEST_CASE("one-dimensional interval region", "[grid]") {
  const double h = 0.01;
  const auto seg = build_region([](Vec2 p) { return p.x > -0.7 && p.x < 0.9; }, {{-1, 0}, {1, 0}}, h, 1);
  CHECK(measure(seg) == Approx(1.6).margin(2 * h));
  CHECK(seg.boundary().size() == 2);
  CHECK(measure(erode(seg, 0.2)) == Approx(1.2).margin(2 * h));
  CHECK(ball_condition_radius(seg, BallSide::interior).radius == Approx(0.8).margin(0.02));
}
