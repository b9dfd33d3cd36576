#include "hyperifs/hyper.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "hyperifs/errors.hpp"

namespace hyperifs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Multiplier on the observed finite-difference stretch when sizing source nets.
constexpr double kExpansionSafety = 1.25;

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

using Planar = bg::model::point<double, 2, bg::cs::cartesian>;
using Spatial = bg::model::point<double, 3, bg::cs::cartesian>;

// Candidates fetched from the R-tree before re-ranking with dist(); covers
// near-ties where the Euclidean proxy and the geodesic rounding disagree.
constexpr unsigned kCandidates = 4;

// Exact nearest-distance queries against a fixed finite point set. Circle:
// sorted coordinates. Torus: planar R-tree over the 3x3 lattice copies, so
// planar nearest is torus nearest. Sphere: R-tree on the embedding, where
// chord length is monotone in geodesic distance.
class NetIndex {
 public:
  explicit NetIndex(std::span<const Point> pts) : pts_(pts) {
    if (pts.empty()) throw DomainError("empty point set");
    manifold_ = pts.front().manifold();
    switch (manifold_) {
      case Manifold::Circle:
        sorted_.reserve(pts.size());
        for (const auto& p : pts) sorted_.push_back(p[0]);
        std::sort(sorted_.begin(), sorted_.end());
        break;
      case Manifold::Torus2: {
        std::vector<std::pair<Planar, std::uint32_t>> entries;
        entries.reserve(9 * pts.size());
        for (std::uint32_t i = 0; i < pts.size(); ++i)
          for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy) entries.emplace_back(Planar(pts[i][0] + dx, pts[i][1] + dy), i);
        planar_ = PlanarTree(entries);
        break;
      }
      case Manifold::Sphere2: {
        std::vector<std::pair<Spatial, std::uint32_t>> entries;
        entries.reserve(pts.size());
        for (std::uint32_t i = 0; i < pts.size(); ++i) entries.emplace_back(Spatial(pts[i][0], pts[i][1], pts[i][2]), i);
        spatial_ = SpatialTree(entries);
        break;
      }
    }
  }

  double nearest(const Point& p) const {
    double best = kInf;
    switch (manifold_) {
      case Manifold::Circle: {
        const double x = p[0];
        const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), x);
        const double hi = it == sorted_.end() ? sorted_.front() : *it;
        const double lo = it == sorted_.begin() ? sorted_.back() : *std::prev(it);
        return std::min(dist(p, Point::circle(hi)), dist(p, Point::circle(lo)));
      }
      case Manifold::Torus2:
        for (auto it = planar_.qbegin(bgi::nearest(Planar(p[0], p[1]), kCandidates)); it != planar_.qend(); ++it)
          best = std::min(best, dist(p, pts_[it->second]));
        return best;
      case Manifold::Sphere2:
        for (auto it = spatial_.qbegin(bgi::nearest(Spatial(p[0], p[1], p[2]), kCandidates)); it != spatial_.qend(); ++it)
          best = std::min(best, dist(p, pts_[it->second]));
        return best;
    }
    return best;
  }

 private:
  using PlanarTree = bgi::rtree<std::pair<Planar, std::uint32_t>, bgi::rstar<16>>;
  using SpatialTree = bgi::rtree<std::pair<Spatial, std::uint32_t>, bgi::rstar<16>>;

  std::span<const Point> pts_;
  Manifold manifold_ = Manifold::Circle;
  std::vector<double> sorted_;
  PlanarTree planar_;
  SpatialTree spatial_;
};

// sup over the ball B(ca, ra) of the distance to the ball B(cb, rb), for
// geometries where the farthest point from cb in B(ca, ra) is at d + ra
// (capped at the diameter 1/2).
double directed_ball(double d, double ra, double rb) { return std::max(0.0, std::min(0.5, d + ra) - rb); }

double ball_hausdorff(const ExactBall& a, const ExactBall& b, bool& ok) {
  const double d = dist(a.center, b.center);
  ok = true;
  if (a.center.manifold() == Manifold::Torus2 && d + std::max(a.radius, b.radius) > 0.5) {
    ok = false;
    return 0.0;
  }
  return std::max(directed_ball(d, a.radius, b.radius), directed_ball(d, b.radius, a.radius));
}

double sigma_max_2(double a, double b, double c) {
  // Largest singular value from the Gram entries [a b; b c].
  const double mean = 0.5 * (a + c);
  const double half = 0.5 * (a - c);
  return std::sqrt(std::max(0.0, mean + std::sqrt(half * half + b * b)));
}

}  // namespace

Continuum Continuum::ball(const Point& center, double radius, double resolution) {
  return Continuum(ExactBall{center, radius, resolution});
}

Continuum Continuum::from_points(Manifold m, std::vector<Point> points, double resolution) {
  return Continuum(PointNet{m, std::move(points), resolution, std::nullopt});
}

Continuum::Continuum(PointNet net) : rep_(std::move(net)) {
  const auto& n = std::get<PointNet>(rep_);
  if (n.points.empty()) throw DomainError("a net continuum must be nonempty");
  for (const auto& p : n.points)
    if (p.manifold() != n.manifold) throw DomainError("net points on a different manifold");
}

Manifold Continuum::manifold() const {
  return is_ball() ? as_ball().center.manifold() : as_net().manifold;
}

double Continuum::slack() const { return is_ball() ? 0.0 : as_net().resolution; }

PointNet Continuum::to_net(double resolution) const {
  if (!is_ball()) return as_net();
  const auto& b = as_ball();
  const double delta = resolution > 0.0 ? resolution : b.resolution;
  return PointNet{b.center.manifold(), net(b.center, b.radius, delta), delta,
                  NetOrigin{b.center, b.radius, Word{}}};
}

Continuum closure_ball(const Point& x, double r, double resolution) {
  if (!(r > 0.0) || !(r < 0.5)) throw DomainError("closure_ball: radius must lie in (0, 1/2)");
  if (!(resolution > 0.0) || !(resolution < r))
    throw DomainError("closure_ball: resolution must satisfy 0 < delta < r");
  return Continuum::ball(x, r, resolution);
}

double directed_hausdorff_points(std::span<const Point> a, std::span<const Point> b) {
  if (a.empty() || b.empty()) throw DomainError("Hausdorff distance of an empty set");
  if (a.front().manifold() != b.front().manifold()) throw DomainError("sets on different manifolds");
  const NetIndex index(b);
  double worst = 0.0;
  for (const auto& p : a) {
    const double d = index.nearest(p);
    if (d > worst) worst = d;
  }
  return worst;
}

double hausdorff_points(std::span<const Point> a, std::span<const Point> b) {
  return std::max(directed_hausdorff_points(a, b), directed_hausdorff_points(b, a));
}

double hausdorff(const Continuum& a, const Continuum& b) {
  if (a.manifold() != b.manifold()) throw DomainError("hausdorff: continua on different manifolds");
  if (a.is_ball() && b.is_ball()) {
    bool ok = false;
    const double d = ball_hausdorff(a.as_ball(), b.as_ball(), ok);
    if (ok) return d;
  }
  const PointNet na = a.to_net();
  const PointNet nb = b.to_net();
  return hausdorff_points(na.points, nb.points);
}

CertifiedDistance certified_hausdorff(const Continuum& a, const Continuum& b) {
  const double d = hausdorff(a, b);
  // A ball pair that had to be compared on nets carries their resolutions.
  double slack = a.slack() + b.slack();
  if (a.is_ball() && b.is_ball()) {
    bool ok = false;
    ball_hausdorff(a.as_ball(), b.as_ball(), ok);
    if (!ok) slack = a.as_ball().resolution + b.as_ball().resolution;
  } else {
    if (a.is_ball()) slack += a.as_ball().resolution;
    if (b.is_ball()) slack += b.as_ball().resolution;
  }
  return {d, slack};
}

double local_expansion(const IfsSystem& sys, const Word& w, std::span<const Point> points, double step) {
  double worst = 0.0;
  for (const auto& p : points) {
    const Point fp = apply_word(sys, w, p);
    switch (sys.manifold()) {
      case Manifold::Circle: {
        const Point q = geodesic_offset(p, step, 0.0);
        worst = std::max(worst, dist(apply_word(sys, w, q), fp) / step);
        break;
      }
      case Manifold::Torus2: {
        const Point q1 = Point::torus(p[0] + step, p[1]);
        const Point q2 = Point::torus(p[0], p[1] + step);
        const Point f1 = apply_word(sys, w, q1);
        const Point f2 = apply_word(sys, w, q2);
        const double a0 = wrap_signed(f1[0] - fp[0]) / step, a1 = wrap_signed(f1[1] - fp[1]) / step;
        const double b0 = wrap_signed(f2[0] - fp[0]) / step, b1 = wrap_signed(f2[1] - fp[1]) / step;
        worst = std::max(worst, sigma_max_2(a0 * a0 + a1 * a1, a0 * b0 + a1 * b1, b0 * b0 + b1 * b1));
        break;
      }
      case Manifold::Sphere2: {
        const Point f1 = apply_word(sys, w, geodesic_offset(p, step, 0.0));
        const Point f2 = apply_word(sys, w, geodesic_offset(p, step, std::numbers::pi / 2));
        std::array<double, 3> u{}, v{};
        for (int i = 0; i < 3; ++i) {
          u[i] = (f1[i] - fp[i]) / step;
          v[i] = (f2[i] - fp[i]) / step;
        }
        const double a = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
        const double b = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        const double c = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        worst = std::max(worst, sigma_max_2(a, b, c));
        break;
      }
    }
  }
  return worst;
}

namespace {

InducedImage push_ball_net(const IfsSystem& sys, const Point& center, double radius, const Word& word,
                           double cap) {
  const std::vector<Point> probe = net(center, radius, radius / 8.0);
  const double stretch = std::max(local_expansion(sys, word, probe), 1e-6) * kExpansionSafety;
  const double source_delta = std::min(cap / stretch, radius / 2.0);
  std::vector<Point> pts = net(center, radius, source_delta);
  for (auto& p : pts) p = apply_word(sys, word, p);
  PointNet out{sys.manifold(), std::move(pts), stretch * source_delta, NetOrigin{center, radius, word}};
  InducedImage img{Continuum(std::move(out))};
  img.lipschitz_estimate = stretch;
  return img;
}

// Applies `run` copies of a circle rotation letter to an exact arc, or
// returns false as soon as the arc is not inside the rotation domain.
bool rotate_arc(const Generator& g, bool inverted, std::size_t run, double& center, double radius) {
  if (!g.rotation_domain) return false;
  OpenArc domain = *g.rotation_domain;
  double shift = g.rotation_shift;
  if (inverted) {
    domain.start = wrap_unit(domain.start + shift);
    shift = -shift;
  }
  for (std::size_t i = 0; i < run; ++i) {
    if (!domain.contains_closed(center, radius)) return false;
    center = wrap_unit(center + shift);
  }
  return true;
}

}  // namespace

InducedImage induced_apply(const IfsSystem& sys, const Word& w, const Continuum& a, const InducedOptions& options) {
  if (a.manifold() != sys.manifold()) throw DomainError("induced_apply: continuum on a different manifold");
  if (w.empty()) return InducedImage{a, a.is_ball(), false, 1.0};

  if (a.is_ball()) {
    const ExactBall& b = a.as_ball();
    const double cap = options.max_resolution > 0.0 ? options.max_resolution : b.resolution;
    if (!options.force_net) {
      Point center = b.center;
      bool ok = true;
      const auto& letters = w.letters();
      std::size_t i = letters.size();
      while (ok && i > 0) {
        const Letter l = letters[i - 1];
        std::size_t run = 1;
        while (i - run > 0 && letters[i - run - 1] == l) ++run;
        const Generator& g = sys.generator(l.generator);
        if (l.inverted && !g.invertible()) throw CapabilityError("generator '" + g.name + "' has no inverse");
        if (g.isometry) {
          center = sys.apply_power(l, center, run);
        } else if (sys.manifold() == Manifold::Circle) {
          double c = center[0];
          ok = rotate_arc(g, l.inverted, run, c, b.radius);
          if (ok) center = Point::circle(c);
        } else {
          ok = false;
        }
        i -= run;
      }
      if (ok) return InducedImage{Continuum::ball(center, b.radius, std::min(cap, b.resolution)), true, false, 1.0};
    }
    InducedImage img = push_ball_net(sys, b.center, b.radius, w, cap);
    img.fell_back_to_net = !options.force_net;
    return img;
  }

  const PointNet& n = a.as_net();
  const double cap = options.max_resolution > 0.0 ? options.max_resolution : n.resolution;
  if (n.origin) return push_ball_net(sys, n.origin->center, n.origin->radius, w * n.origin->word, cap);

  // No source ball to refine from: push the points and widen the resolution.
  const double stretch = std::max(local_expansion(sys, w, n.points), 1e-6) * kExpansionSafety;
  std::vector<Point> pts = n.points;
  for (auto& p : pts) p = apply_word(sys, w, p);
  InducedImage img{Continuum(PointNet{n.manifold, std::move(pts), n.resolution * stretch, std::nullopt})};
  img.lipschitz_estimate = stretch;
  return img;
}

}  // namespace hyperifs
