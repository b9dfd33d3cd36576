#pragma once

// Geometry of the three compact model manifolds used throughout the library:
// the unit-length circle S1 = R/Z, the flat torus T2 = R^2/Z^2 and the round
// sphere S2 of radius 1/(2*pi) (equator length 1). All measures are
// normalized so the whole manifold has measure 1.

#include <array>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "hyperifs/rng.hpp"

namespace hyperifs {

enum class Manifold { Circle, Torus2, Sphere2 };

std::string_view to_string(Manifold m);
/// Accepts "circle", "torus" / "torus2", "sphere" / "sphere2".
Manifold manifold_from_string(std::string_view name);

inline constexpr double kSphereRadius = 1.0 / (2.0 * std::numbers::pi);

/// Largest admissible ball radius; 1/2 on all three manifolds.
constexpr double injectivity_bound(Manifold) { return 0.5; }

/// Number of stored coordinates: 1 (circle chart), 2 (torus chart),
/// 3 (sphere embedding).
constexpr std::size_t coordinate_count(Manifold m) {
  switch (m) {
    case Manifold::Circle: return 1;
    case Manifold::Torus2: return 2;
    case Manifold::Sphere2: return 3;
  }
  return 0;
}

/// Reduce into [0, 1).
double wrap_unit(double x);
/// Signed representative of x mod 1 in [-1/2, 1/2).
double wrap_signed(double x);

class Point {
 public:
  static Point circle(double x);
  static Point torus(double x, double y);
  /// Any nonzero vector; rescaled onto the sphere of radius kSphereRadius.
  static Point sphere(double x, double y, double z);
  static Point from_coords(Manifold m, std::span<const double> coords);

  Manifold manifold() const { return manifold_; }
  std::span<const double> coords() const { return {c_.data(), coordinate_count(manifold_)}; }
  double operator[](std::size_t i) const { return c_[i]; }
  const std::array<double, 3>& raw() const { return c_; }

  bool operator==(const Point& o) const = default;

 private:
  Point(Manifold m, std::array<double, 3> c) : manifold_(m), c_(c) {}

  Manifold manifold_ = Manifold::Circle;
  std::array<double, 3> c_{};
};

/// Geodesic ball B(center, radius) with 0 < radius < 1/2.
class Ball {
 public:
  Ball(Point center, double radius);

  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  Manifold manifold() const { return center_.manifold(); }

 private:
  Point center_;
  double radius_;
};

/// Positively oriented open arc (start, start + length) of the circle.
struct OpenArc {
  double start = 0.0;
  double length = 1.0;

  bool full() const { return length >= 1.0; }
  bool contains(double x) const;
  /// Whether the closed arc [center - radius, center + radius] lies inside.
  bool contains_closed(double center, double radius) const;
  /// Closed complement [start + length, start + 1] as (start, length).
  double complement_start() const;
  double complement_length() const { return full() ? 0.0 : 1.0 - length; }
};

/// Geodesic distance. Throws DomainError for points on different manifolds.
double dist(const Point& p, const Point& q);

/// Normalized measure of a ball of radius r, 0 < r <= 1/2.
double ball_measure(Manifold m, double r);

struct MeasureEstimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 for closed forms
  bool exact = true;
};

/// m(B(x,rx) ∩ B(y,ry)). Exact on all three manifolds: arc overlap on the
/// circle, lens areas summed over lattice translates on the torus, the
/// two-cap lens formula on the sphere. Containment returns ball_measure of
/// the smaller radius verbatim.
MeasureEstimate ball_intersection_measure(const Point& x, double rx, const Point& y, double ry);

/// Seeded Monte Carlo estimates (uniform sampling of the whole manifold).
MeasureEstimate monte_carlo_ball_measure(Manifold m, double r, std::size_t samples, std::uint64_t seed);
/// Samples uniformly inside B(x, rx) and scales the hit fraction by m(B(x, rx)).
MeasureEstimate monte_carlo_intersection(const Point& x, double rx, const Point& y, double ry,
                                         std::size_t samples, std::uint64_t seed);

Point sample_uniform(Manifold m, Rng& rng);
/// Uniform (w.r.t. normalized measure) in the closed ball B(center, r).
Point sample_in_ball(const Point& center, double r, Rng& rng);

/// Point at geodesic distance s from c in the tangent direction with angle
/// `heading` (circle: sign of cos(heading) picks the side).
Point geodesic_offset(const Point& c, double s, double heading);

/// Finite δ-net of the closed ball: every point of the ball is within δ of
/// the returned set, which is δ-chain-connected and includes the boundary.
/// Circle: uniform grid; torus/sphere: (geodesic) polar grid.
std::vector<Point> net(const Point& x, double r, double delta);

/// Partition of the manifold into cells of diameter O(ε), used for density
/// and coverage bookkeeping.
class CellGrid {
 public:
  CellGrid(Manifold m, double epsilon);

  Manifold manifold() const { return manifold_; }
  std::size_t size() const { return cell_count_; }
  std::size_t cell_of(const Point& p) const;
  /// Normalized measure of a cell.
  double cell_measure(std::size_t cell) const;

 private:
  Manifold manifold_;
  double epsilon_;
  std::size_t per_axis_ = 0;              // circle / torus
  std::vector<std::size_t> band_offset_;  // sphere: first cell of each band
  std::vector<std::size_t> band_cells_;   // sphere: cells per band
  std::size_t cell_count_ = 0;
};

}  // namespace hyperifs
