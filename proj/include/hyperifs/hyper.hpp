#pragma once

// Continua of the hyperspace K(X) restricted to closed geodesic balls and
// their images, with the Hausdorff metric and induced maps.

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hyperifs/geom.hpp"
#include "hyperifs/ifs.hpp"

namespace hyperifs {

/// Exact closed ball. On the circle this is a closed arc. `resolution` is the
/// spacing used whenever the ball has to be materialized as a net.
struct ExactBall {
  Point center;
  double radius;
  double resolution;
};

/// The net was produced by pushing a net of `ball` through `word`; kept so
/// that later operations can re-refine from the source.
struct NetOrigin {
  Point center;
  double radius;
  Word word;
};

/// Finite δ-chain-connected point set standing in for a continuum: every
/// point of the represented set is within `resolution` of `points`.
struct PointNet {
  Manifold manifold;
  std::vector<Point> points;
  double resolution;
  std::optional<NetOrigin> origin;
};

class Continuum {
 public:
  static Continuum ball(const Point& center, double radius, double resolution);
  static Continuum from_points(Manifold m, std::vector<Point> points, double resolution);
  explicit Continuum(PointNet net);

  Manifold manifold() const;
  bool is_ball() const { return std::holds_alternative<ExactBall>(rep_); }
  const ExactBall& as_ball() const { return std::get<ExactBall>(rep_); }
  const PointNet& as_net() const { return std::get<PointNet>(rep_); }

  /// Discretization slack: 0 for exact balls, the net resolution otherwise.
  double slack() const;
  /// Materialize as a net; balls use their own resolution unless overridden.
  PointNet to_net(double resolution = 0.0) const;

 private:
  explicit Continuum(ExactBall b) : rep_(std::move(b)) {}
  std::variant<ExactBall, PointNet> rep_;
};

/// B(x, r)' realized as the closed ball. Throws DomainError unless
/// 0 < resolution < r < 1/2.
Continuum closure_ball(const Point& x, double r, double resolution);

/// Hausdorff distance between finite point sets (exact, grid-accelerated).
double hausdorff_points(std::span<const Point> a, std::span<const Point> b);
/// sup_{a in A} dist(a, B) for finite sets.
double directed_hausdorff_points(std::span<const Point> a, std::span<const Point> b);

/// d_H between the representations. Ball/ball pairs use closed forms (always
/// on circle and sphere, on the torus while centers + radii stay below the
/// injectivity bound); anything else is computed on nets.
double hausdorff(const Continuum& a, const Continuum& b);

struct CertifiedDistance {
  double distance;  // d_H of the representations
  double slack;     // resolution of A plus resolution of B
  double bound() const { return distance + slack; }
};

CertifiedDistance certified_hausdorff(const Continuum& a, const Continuum& b);

struct InducedOptions {
  /// Cap on the output net resolution; 0 keeps the input resolution.
  double max_resolution = 0.0;
  /// Skip the exact-ball fast paths (for cross-checks).
  bool force_net = false;
};

struct InducedImage {
  Continuum set;
  bool exact = false;             // image kept as an exact ball
  bool fell_back_to_net = false;  // a ball step left every fast-path domain
  double lipschitz_estimate = 1.0;
};

/// ĥ_w(A) = f_w(A). Exact balls stay exact under isometries and, on the
/// circle, under letters whose rotation domain contains the whole current
/// arc (checked per step). Otherwise the image is a net: a source net of the
/// original ball is chosen fine enough that the observed local expansion of
/// f_w keeps the image resolution under the cap, then pushed forward.
InducedImage induced_apply(const IfsSystem& sys, const Word& w, const Continuum& a,
                           const InducedOptions& options = {});

/// Largest finite-difference stretch factor of f_w over the given points.
double local_expansion(const IfsSystem& sys, const Word& w, std::span<const Point> points, double step = 1e-6);

}  // namespace hyperifs
