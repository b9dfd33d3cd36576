#include "hyperifs/geom.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hyperifs/errors.hpp"

namespace hyperifs {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Vec3 = std::array<double, 3>;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Vec3 unit_of(const Point& p) {
  const auto& c = p.raw();
  const double n = norm(c);
  return {c[0] / n, c[1] / n, c[2] / n};
}

// Orthonormal tangent frame at unit vector u.
std::pair<Vec3, Vec3> tangent_frame(const Vec3& u) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (std::abs(u[i]) < std::abs(u[k])) k = i;
  Vec3 helper{0.0, 0.0, 0.0};
  helper[k] = 1.0;
  const double proj = dot(helper, u);
  Vec3 e1{helper[0] - proj * u[0], helper[1] - proj * u[1], helper[2] - proj * u[2]};
  const double n1 = norm(e1);
  for (double& v : e1) v /= n1;
  return {e1, cross(u, e1)};
}

void require_radius(double r, const char* what) {
  if (!(r > 0.0) || r > 0.5) throw DomainError(std::string(what) + ": radius must lie in (0, 1/2]");
}

void require_same(const Point& p, const Point& q) {
  if (p.manifold() != q.manifold()) throw DomainError("points lie on different manifolds");
}

double interval_overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

double planar_lens(double d, double r1, double r2) {
  if (d >= r1 + r2) return 0.0;
  const double lo = std::min(r1, r2);
  if (d <= std::abs(r1 - r2)) return kPi * lo * lo;
  const double a1 = std::acos(std::clamp((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1), -1.0, 1.0));
  const double a2 = std::acos(std::clamp((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2), -1.0, 1.0));
  const double k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
  return r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * std::sqrt(std::max(0.0, k));
}

// Area (normalized by 4*pi) of the intersection of two spherical caps with
// angular radii t1, t2 whose centers are phi apart, unit sphere. The lens
// area follows from Gauss-Bonnet on the two boundary arcs.
double cap_lens_fraction(double t1, double t2, double phi) {
  const auto cap = [](double t) { return 0.5 * (1.0 - std::cos(t)); };
  if (phi >= t1 + t2) return 0.0;
  if (phi <= std::abs(t1 - t2)) return cap(std::min(t1, t2));
  if (phi + t1 + t2 >= kTwoPi) return cap(t1) + cap(t2) - 1.0;
  const double c1 = std::cos(t1), c2 = std::cos(t2), cp = std::cos(phi);
  const double s1 = std::sin(t1), s2 = std::sin(t2), sp = std::sin(phi);
  const double vertex = std::acos(std::clamp((cp - c1 * c2) / (s1 * s2), -1.0, 1.0));
  const double half1 = std::acos(std::clamp((c2 - c1 * cp) / (s1 * sp), -1.0, 1.0));
  const double half2 = std::acos(std::clamp((c1 - c2 * cp) / (s2 * sp), -1.0, 1.0));
  const double area = 2.0 * (kPi - vertex) - 2.0 * half1 * c1 - 2.0 * half2 * c2;
  return std::clamp(area / (4.0 * kPi), 0.0, 1.0);
}

}  // namespace

std::string_view to_string(Manifold m) {
  switch (m) {
    case Manifold::Circle: return "circle";
    case Manifold::Torus2: return "torus";
    case Manifold::Sphere2: return "sphere";
  }
  return "unknown";
}

Manifold manifold_from_string(std::string_view name) {
  if (name == "circle" || name == "S1") return Manifold::Circle;
  if (name == "torus" || name == "torus2" || name == "T2") return Manifold::Torus2;
  if (name == "sphere" || name == "sphere2" || name == "S2") return Manifold::Sphere2;
  throw InputError("unknown manifold '" + std::string(name) + "'");
}

double wrap_unit(double x) {
  double w = x - std::floor(x);
  if (w >= 1.0) w = 0.0;
  return w;
}

double wrap_signed(double x) {
  double w = wrap_unit(x + 0.5) - 0.5;
  return w;
}

Point Point::circle(double x) { return Point(Manifold::Circle, {wrap_unit(x), 0.0, 0.0}); }

Point Point::torus(double x, double y) {
  return Point(Manifold::Torus2, {wrap_unit(x), wrap_unit(y), 0.0});
}

Point Point::sphere(double x, double y, double z) {
  const double n = std::sqrt(x * x + y * y + z * z);
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("sphere point needs a finite nonzero vector");
  const double s = kSphereRadius / n;
  return Point(Manifold::Sphere2, {x * s, y * s, z * s});
}

Point Point::from_coords(Manifold m, std::span<const double> c) {
  if (c.size() != coordinate_count(m))
    throw InputError("expected " + std::to_string(coordinate_count(m)) + " coordinates for " +
                     std::string(to_string(m)));
  switch (m) {
    case Manifold::Circle: return circle(c[0]);
    case Manifold::Torus2: return torus(c[0], c[1]);
    case Manifold::Sphere2: return sphere(c[0], c[1], c[2]);
  }
  throw InputError("bad manifold");
}

bool OpenArc::contains(double x) const {
  if (full()) return true;
  const double u = wrap_unit(x - start);
  return u > 0.0 && u < length;
}

bool OpenArc::contains_closed(double center, double radius) const {
  if (full()) return true;
  if (2.0 * radius >= length) return false;
  const double u = wrap_unit(center - radius - start);
  return u > 0.0 && u + 2.0 * radius < length;
}

double OpenArc::complement_start() const { return wrap_unit(start + length); }

Ball::Ball(Point center, double radius) : center_(center), radius_(radius) {
  if (!(radius > 0.0) || !(radius < injectivity_bound(center.manifold())))
    throw DomainError("ball radius must lie in (0, 1/2)");
}

double dist(const Point& p, const Point& q) {
  require_same(p, q);
  switch (p.manifold()) {
    case Manifold::Circle: {
      const double d = std::abs(p[0] - q[0]);
      return std::min(d, 1.0 - d);
    }
    case Manifold::Torus2: {
      // |a - b| is exactly symmetric; wrap_signed of a difference is not.
      const double ax = std::abs(p[0] - q[0]), ay = std::abs(p[1] - q[1]);
      return std::hypot(std::min(ax, 1.0 - ax), std::min(ay, 1.0 - ay));
    }
    case Manifold::Sphere2: {
      const Vec3& a = p.raw();
      const Vec3& b = q.raw();
      return kSphereRadius * std::atan2(norm(cross(a, b)), dot(a, b));
    }
  }
  return 0.0;
}

double ball_measure(Manifold m, double r) {
  require_radius(r, "ball_measure");
  switch (m) {
    case Manifold::Circle: return 2.0 * r;
    // Planar discs of radius <= 1/2 embed in the torus, so the flat formula
    // is exact up to the injectivity bound.
    case Manifold::Torus2: return kPi * r * r;
    case Manifold::Sphere2: return 0.5 * (1.0 - std::cos(r / kSphereRadius));
  }
  return 0.0;
}

MeasureEstimate ball_intersection_measure(const Point& x, double rx, const Point& y, double ry) {
  require_same(x, y);
  require_radius(rx, "ball_intersection_measure");
  require_radius(ry, "ball_intersection_measure");
  const Manifold m = x.manifold();
  const double d = dist(x, y);
  const double lo = std::min(rx, ry);
  const double hi = std::max(rx, ry);
  if (d + lo <= hi) return {ball_measure(m, lo), 0.0, true};

  switch (m) {
    case Manifold::Circle: {
      const double delta = wrap_signed(y[0] - x[0]);
      double total = 0.0;
      for (int n = -1; n <= 1; ++n)
        total += interval_overlap(-rx, rx, delta + n - ry, delta + n + ry);
      return {std::min(total, 1.0), 0.0, true};
    }
    case Manifold::Torus2: {
      const double dx = wrap_signed(y[0] - x[0]);
      const double dy = wrap_signed(y[1] - x[1]);
      double total = 0.0;
      for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) total += planar_lens(std::hypot(dx + i, dy + j), rx, ry);
      return {std::min(total, 1.0), 0.0, true};
    }
    case Manifold::Sphere2:
      return {cap_lens_fraction(rx / kSphereRadius, ry / kSphereRadius, d / kSphereRadius), 0.0, true};
  }
  return {};
}

Point sample_uniform(Manifold m, Rng& rng) {
  switch (m) {
    case Manifold::Circle: return Point::circle(rng.uniform());
    case Manifold::Torus2: {
      const double a = rng.uniform();
      return Point::torus(a, rng.uniform());
    }
    case Manifold::Sphere2: {
      const double z = rng.uniform(-1.0, 1.0);
      const double phi = kTwoPi * rng.uniform();
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      return Point::sphere(s * std::cos(phi), s * std::sin(phi), z);
    }
  }
  throw DomainError("bad manifold");
}

Point geodesic_offset(const Point& c, double s, double heading) {
  switch (c.manifold()) {
    case Manifold::Circle: return Point::circle(c[0] + (std::cos(heading) >= 0.0 ? s : -s));
    case Manifold::Torus2:
      return Point::torus(c[0] + s * std::cos(heading), c[1] + s * std::sin(heading));
    case Manifold::Sphere2: {
      const Vec3 u = unit_of(c);
      const auto [e1, e2] = tangent_frame(u);
      const double a = s / kSphereRadius;
      const double ca = std::cos(a), sa = std::sin(a);
      const double ch = std::cos(heading), sh = std::sin(heading);
      return Point::sphere(ca * u[0] + sa * (ch * e1[0] + sh * e2[0]),
                           ca * u[1] + sa * (ch * e1[1] + sh * e2[1]),
                           ca * u[2] + sa * (ch * e1[2] + sh * e2[2]));
    }
  }
  throw DomainError("bad manifold");
}

Point sample_in_ball(const Point& center, double r, Rng& rng) {
  require_radius(r, "sample_in_ball");
  switch (center.manifold()) {
    case Manifold::Circle: return Point::circle(center[0] + rng.uniform(-r, r));
    case Manifold::Torus2: {
      const double s = r * std::sqrt(rng.uniform());
      return geodesic_offset(center, s, kTwoPi * rng.uniform());
    }
    case Manifold::Sphere2: {
      // cos of the polar angle is uniform on [cos(r/rho), 1] for uniform cap samples.
      const double cmin = std::cos(r / kSphereRadius);
      const double ca = rng.uniform(cmin, 1.0);
      const double s = kSphereRadius * std::acos(std::clamp(ca, -1.0, 1.0));
      return geodesic_offset(center, s, kTwoPi * rng.uniform());
    }
  }
  throw DomainError("bad manifold");
}

MeasureEstimate monte_carlo_ball_measure(Manifold m, double r, std::size_t samples, std::uint64_t seed) {
  require_radius(r, "monte_carlo_ball_measure");
  if (samples == 0) throw InputError("monte_carlo_ball_measure: samples must be positive");
  Rng rng(seed);
  const Point center = sample_uniform(m, rng);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i)
    if (dist(center, sample_uniform(m, rng)) < r) ++hits;
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples)), false};
}

MeasureEstimate monte_carlo_intersection(const Point& x, double rx, const Point& y, double ry,
                                         std::size_t samples, std::uint64_t seed) {
  require_same(x, y);
  require_radius(ry, "monte_carlo_intersection");
  if (samples == 0) throw InputError("monte_carlo_intersection: samples must be positive");
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i)
    if (dist(y, sample_in_ball(x, rx, rng)) < ry) ++hits;
  const double scale = ball_measure(x.manifold(), rx);
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {p * scale, scale * std::sqrt(p * (1.0 - p) / static_cast<double>(samples)), false};
}

std::vector<Point> net(const Point& x, double r, double delta) {
  require_radius(r, "net");
  if (!(delta > 0.0) || !(delta < r)) throw DomainError("net: resolution must satisfy 0 < delta < r");
  std::vector<Point> out;
  if (x.manifold() == Manifold::Circle) {
    const auto n = static_cast<std::size_t>(std::ceil(2.0 * r / delta - 1e-9));
    out.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
      out.push_back(Point::circle(x[0] - r + 2.0 * r * static_cast<double>(i) / static_cast<double>(n)));
    return out;
  }

  const auto rings = static_cast<std::size_t>(std::ceil(r / delta - 1e-9));
  out.push_back(x);
  for (std::size_t i = 1; i <= rings; ++i) {
    const double s = r * static_cast<double>(i) / static_cast<double>(rings);
    const double circumference = x.manifold() == Manifold::Torus2
                                     ? kTwoPi * s
                                     : kTwoPi * kSphereRadius * std::sin(s / kSphereRadius);
    const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(circumference / delta - 1e-9)));
    for (std::size_t j = 0; j < m; ++j)
      out.push_back(geodesic_offset(x, s, kTwoPi * static_cast<double>(j) / static_cast<double>(m)));
  }
  return out;
}

CellGrid::CellGrid(Manifold m, double epsilon) : manifold_(m), epsilon_(epsilon) {
  if (!(epsilon > 0.0) || epsilon > 0.5) throw DomainError("CellGrid: epsilon must lie in (0, 1/2]");
  switch (m) {
    case Manifold::Circle:
      per_axis_ = static_cast<std::size_t>(std::ceil(1.0 / epsilon - 1e-9));
      cell_count_ = per_axis_;
      break;
    case Manifold::Torus2:
      per_axis_ = static_cast<std::size_t>(std::ceil(1.0 / epsilon - 1e-9));
      cell_count_ = per_axis_ * per_axis_;
      break;
    case Manifold::Sphere2: {
      const auto bands = static_cast<std::size_t>(std::ceil(kPi * kSphereRadius / epsilon - 1e-9));
      for (std::size_t i = 0; i < bands; ++i) {
        const double lo = kPi * static_cast<double>(i) / static_cast<double>(bands);
        const double hi = kPi * static_cast<double>(i + 1) / static_cast<double>(bands);
        const double widest = (lo <= kPi / 2 && hi >= kPi / 2) ? 1.0 : std::max(std::sin(lo), std::sin(hi));
        const auto cells = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(kTwoPi * kSphereRadius * widest / epsilon - 1e-9)));
        band_offset_.push_back(cell_count_);
        band_cells_.push_back(cells);
        cell_count_ += cells;
      }
      break;
    }
  }
}

std::size_t CellGrid::cell_of(const Point& p) const {
  if (p.manifold() != manifold_) throw DomainError("CellGrid: point on a different manifold");
  const auto index = [](double u, std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n)));
  };
  switch (manifold_) {
    case Manifold::Circle: return index(p[0], per_axis_);
    case Manifold::Torus2: return index(p[0], per_axis_) * per_axis_ + index(p[1], per_axis_);
    case Manifold::Sphere2: {
      const double theta = std::acos(std::clamp(p[2] / kSphereRadius, -1.0, 1.0));
      const std::size_t band = index(theta / kPi, band_cells_.size());
      double az = std::atan2(p[1], p[0]);
      if (az < 0.0) az += kTwoPi;
      return band_offset_[band] + index(az / kTwoPi, band_cells_[band]);
    }
  }
  return 0;
}

double CellGrid::cell_measure(std::size_t cell) const {
  if (cell >= cell_count_) throw DomainError("CellGrid: cell index out of range");
  if (manifold_ != Manifold::Sphere2) return 1.0 / static_cast<double>(cell_count_);
  const auto it = std::upper_bound(band_offset_.begin(), band_offset_.end(), cell);
  const auto band = static_cast<std::size_t>(std::distance(band_offset_.begin(), it) - 1);
  const double bands = static_cast<double>(band_cells_.size());
  const double lo = kPi * static_cast<double>(band) / bands;
  const double hi = kPi * static_cast<double>(band + 1) / bands;
  return 0.5 * (std::cos(lo) - std::cos(hi)) / static_cast<double>(band_cells_[band]);
}

}  // namespace hyperifs
