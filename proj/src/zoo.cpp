#include "hyperifs/zoo.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "hyperifs/errors.hpp"
#include "hyperifs/hyper.hpp"

namespace hyperifs {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// n * a mod 1 with the product formed in extended precision, so long runs of
// a rotation do not drift.
double fractional_multiple(double a, std::int64_t n) {
  const long double v = static_cast<long double>(a) * static_cast<long double>(n);
  return wrap_unit(static_cast<double>(v - std::floor(v)));
}

// Depth of p inside an open arc: distance to the complement, 0 outside.
double arc_depth(const OpenArc& arc, double p) {
  if (arc.full()) return 0.5;
  const double u = wrap_unit(p - arc.start);
  if (!(u > 0.0 && u < arc.length)) return 0.0;
  return std::min(u, arc.length - u);
}

// Circle homeomorphism equal to x + shift on `domain` and, on the complement
// arc [b, b + L], to the lift x + shift + amp 16 u^2 (1-u)^2 with u = (x-b)/L.
// The bump has zero value and slope at both ends, so the lift is C^1, and
// amp = strength L / kBumpSlope keeps its derivative >= 1 - strength.
struct BlendedRotation {
  static constexpr double kBumpSlope = 32.0 / (6.0 * 1.7320508075688772);  // 32 max|u(1-u)(1-2u)|

  OpenArc domain;
  double shift;
  double amp;

  BlendedRotation(OpenArc d, double s, double strength)
      : domain(d), shift(s), amp(strength * d.complement_length() / kBumpSlope) {}

  double bump(double u) const { return amp * 16.0 * u * u * (1.0 - u) * (1.0 - u); }

  double forward(double x) const {
    if (domain.contains(x)) return wrap_unit(x + shift);
    const double len = domain.complement_length();
    const double u = std::clamp(wrap_unit(x - domain.complement_start()) / len, 0.0, 1.0);
    return wrap_unit(x + shift + bump(u));
  }

  double inverse(double y) const {
    const OpenArc image{wrap_unit(domain.start + shift), domain.length};
    if (image.contains(y)) return wrap_unit(y - shift);
    // Solve b + len u + shift + bump(u) = y on the complement by bisection;
    // the lift is strictly increasing there.
    const double len = domain.complement_length();
    const double target = wrap_unit(y - domain.complement_start() - shift);
    double lo = 0.0, hi = 1.0;
    const double t = target > 0.5 + len ? target - 1.0 : target;
    for (int i = 0; i < 200 && hi - lo > 1e-17; ++i) {
      const double mid = 0.5 * (lo + hi);
      (len * mid + bump(mid) < t ? lo : hi) = mid;
    }
    return wrap_unit(domain.complement_start() + len * 0.5 * (lo + hi));
  }
};

Generator blended_generator(std::string name, const OpenArc& domain, double shift, double strength) {
  const BlendedRotation map(domain, shift, strength);
  Generator g;
  g.name = std::move(name);
  g.forward = [map](const Point& p) { return Point::circle(map.forward(p[0])); };
  g.inverse = [map](const Point& p) { return Point::circle(map.inverse(p[0])); };
  g.rotation_domain = domain;
  g.rotation_shift = shift;
  return g;
}

// Step rule of the inductive construction, shared by the orbit builder and
// the witness constructor.
class OmegaStepper {
 public:
  OmegaStepper(const CircleExampleConfig& cfg, double x, double arc_radius)
      : cfg_(cfg), p_(wrap_unit(x)), r_(arc_radius) {}

  double position() const { return p_; }

  // Chooses and applies the next letter; returns it with the shift used.
  std::pair<Letter, double> step() {
    const bool in1 = r_ > 0.0 ? cfg_.i1.contains_closed(p_, r_) : cfg_.i1.contains(p_);
    const bool in2 = r_ > 0.0 ? cfg_.i2.contains_closed(p_, r_) : cfg_.i2.contains(p_);
    Letter letter{0, false};
    double shift = cfg_.beta;
    if (!(in1 && !crossed_gap_)) {
      if (!in2)
        throw ConstructionError("omega construction: no rotation domain contains the arc around " +
                                std::to_string(p_));
      letter = {1, false};
      shift = cfg_.gamma;
    }
    // Did the positively oriented step [p, p + shift] contain S1 \ I1?
    const double gap_offset = wrap_unit(cfg_.i1.complement_start() - p_);
    crossed_gap_ = gap_offset + cfg_.i1.complement_length() <= shift;
    p_ = wrap_unit(p_ + shift);
    return {letter, shift};
  }

 private:
  const CircleExampleConfig& cfg_;
  double p_;
  double r_;
  bool crossed_gap_ = false;
};

ConstructedWitness construct_circle_word(const CircleExampleConfig& cfg, double x, const Point& y, double r,
                                         double theta, std::uint64_t max_length) {
  ConstructedWitness out;
  const double target = r / theta;
  if (dist(Point::circle(x), y) < target) {
    out.word = Word{};
    return out;
  }
  OmegaStepper stepper(cfg, x, r);
  Sequence seq;
  for (std::uint64_t i = 0; i < max_length; ++i) {
    seq.push_back(stepper.step().first);
    ++out.steps;
    if (dist(Point::circle(stepper.position()), y) < target) {
      out.word = Word::from_sequence(seq);
      return out;
    }
  }
  out.note = "omega construction did not come within r/theta of y in " + std::to_string(max_length) + " steps";
  return out;
}

// Largest singular value of a 2x2 row-major matrix.
double norm2x2(double a, double b, double c, double d) {
  const double s = a * a + b * b + c * c + d * d;
  const double det = a * d - b * c;
  return std::sqrt(0.5 * (s + std::sqrt(std::max(0.0, s * s - 4.0 * det * det))));
}

}  // namespace

// ---------------------------------------------------------------- circle

json CircleExampleConfig::to_json() const {
  return {{"i1", {{"start", i1.start}, {"length", i1.length}}},
          {"i2", {{"start", i2.start}, {"length", i2.length}}},
          {"beta", beta},
          {"gamma", gamma},
          {"blend_strength", blend_strength}};
}

std::vector<ConditionCheck> circle_conditions(const CircleExampleConfig& cfg, std::size_t grid) {
  std::vector<ConditionCheck> out;
  std::size_t uncovered = 0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(grid);
    if (!cfg.i1.contains(x) && !cfg.i2.contains(x)) ++uncovered;
  }
  out.push_back({"(i)", "I1 and I2 cover the circle", uncovered == 0, static_cast<double>(uncovered)});

  const double gap = cfg.i1.complement_length();
  out.push_back({"(ii)", "m(S1 \\ I1) < 1/20", gap < 1.0 / 20.0, gap});

  std::size_t bad = 0;
  for (std::size_t i = 0; i <= grid; ++i) {
    const double x = cfg.i1.complement_start() + gap * static_cast<double>(i) / static_cast<double>(grid);
    if (!cfg.i2.contains_closed(wrap_unit(x), 0.25)) ++bad;
  }
  out.push_back({"(iii)", "B(x, 1/4) inside I2 for every x in S1 \\ I1", bad == 0, static_cast<double>(bad)});

  out.push_back({"beta", "beta exceeds m(S1 \\ I1) and lies in (0, 1)",
                 cfg.beta > gap && cfg.beta < 1.0 && cfg.gamma > 0.0 && cfg.gamma < 1.0, cfg.beta - gap});
  const double spread = std::abs(cfg.beta - cfg.gamma);
  out.push_back({"gamma", "gamma distinct from and close to beta (|beta - gamma| < 2e-4)",
                 spread > 0.0 && spread < 2e-4, spread});
  out.push_back({"blend", "blend strength in (0, 1) keeps the lifts increasing",
                 cfg.blend_strength > 0.0 && cfg.blend_strength < 1.0, cfg.blend_strength});
  return out;
}

double lebesgue_number(const CircleExampleConfig& cfg, std::size_t grid) {
  double worst = 0.5;
  for (std::size_t i = 0; i < grid; ++i) {
    const double p = static_cast<double>(i) / static_cast<double>(grid);
    worst = std::min(worst, std::max(arc_depth(cfg.i1, p), arc_depth(cfg.i2, p)));
  }
  return worst;
}

std::int64_t compute_k(double beta, double gamma) {
  if (!(beta > 0.0)) throw DomainError("compute_k: beta must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("compute_k: gamma must lie in (0, 1)");
  const double room = 1.0 - gamma;
  auto k = static_cast<std::int64_t>(std::floor(room / beta));
  while (k > 0 && static_cast<double>(k) * beta > room) --k;
  while (static_cast<double>(k + 1) * beta <= room) ++k;
  return k;
}

double OmegaConstruction::frequency_of_first() const {
  if (symbols.empty()) return 0.0;
  const auto ones = std::count_if(symbols.begin(), symbols.end(), [](const Letter& l) { return l.generator == 0; });
  return static_cast<double>(ones) / static_cast<double>(symbols.size());
}

OmegaConstruction omega_construction(const CircleExampleConfig& cfg, double x, std::size_t n, double arc_radius) {
  if (n == 0) throw InputError("omega_construction: n must be at least 1");
  if (arc_radius < 0.0) throw DomainError("omega_construction: negative arc radius");
  OmegaConstruction out;
  out.symbols.reserve(n);
  out.orbit.reserve(n);
  out.rotation_sums.reserve(n);
  OmegaStepper stepper(cfg, x, arc_radius);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double before = stepper.position();
    const auto [letter, shift] = stepper.step();
    const OpenArc& domain = letter.generator == 0 ? cfg.i1 : cfg.i2;
    const bool inside = arc_radius > 0.0 ? domain.contains_closed(before, arc_radius) : domain.contains(before);
    out.pure_rotation = out.pure_rotation && inside;
    sum += shift;
    out.symbols.push_back(letter);
    out.orbit.push_back(stepper.position());
    out.rotation_sums.push_back(sum);
  }
  return out;
}

IfsSystem build_circle_system(const CircleExampleConfig& cfg) {
  std::string violated;
  for (const auto& c : circle_conditions(cfg))
    if (!c.passed) violated += (violated.empty() ? "" : "; ") + c.clause + " " + c.description;
  if (!violated.empty()) throw ConstructionError("circle example: violated " + violated);

  std::vector<Generator> gens{blended_generator("f1", cfg.i1, cfg.beta, cfg.blend_strength),
                              blended_generator("f2", cfg.i2, cfg.gamma, cfg.blend_strength)};
  const double lambda = lebesgue_number(cfg);
  WitnessConstructor hook = [cfg, lambda](const Point& x, const Point& y, double r, double theta,
                                          std::uint64_t max_length) {
    if (!(r < lambda)) {
      ConstructedWitness none;
      none.note = "radius not below the Lebesgue number " + std::to_string(lambda) + " of the cover";
      return none;
    }
    return construct_circle_word(cfg, x[0], y, r, theta, max_length);
  };
  return IfsSystem(Manifold::Circle, std::move(gens), "circle_example", std::move(hook));
}

WitnessResult circle_witness(const CircleExampleConfig& cfg, const IfsSystem& sys, const Point& x, const Point& y,
                             double r, double theta, std::size_t max_length) {
  if (x.manifold() != Manifold::Circle || y.manifold() != Manifold::Circle)
    throw DomainError("circle_witness: points must lie on the circle");
  const double lambda = lebesgue_number(cfg);
  if (!(r > 0.0 && r < lambda))
    throw DomainError("circle_witness: r must lie in (0, " + std::to_string(lambda) + ")");
  const ConstructedWitness cw = construct_circle_word(cfg, x[0], y, r, theta, max_length);
  WitnessResult out;
  if (cw.word) {
    out = certify_word(sys, *cw.word, x, y, r, theta, r / (10.0 * theta));
  } else {
    out.certified_distance = std::numeric_limits<double>::infinity();
    out.margin = -out.certified_distance;
  }
  out.strategy = "system";
  out.note = cw.note;
  out.stats.nodes_expanded = cw.steps;
  return out;
}

// ----------------------------------------------------------------- torus

json TorusExampleConfig::to_json() const {
  return {{"gamma", gamma}, {"x0", x0}, {"a", a}, {"rho", rho}};
}

namespace {

// Radial profile: 1 on [0, rho], smoothstep decay to 0 at 2 rho.
double profile(double s, double rho) {
  if (s <= rho) return 1.0;
  if (s >= 2.0 * rho) return 0.0;
  const double t = (s - rho) / rho;
  return 1.0 - t * t * (3.0 - 2.0 * t);
}

double profile_slope(double s, double rho) {
  if (s <= rho || s >= 2.0 * rho) return 0.0;
  const double t = (s - rho) / rho;
  return -6.0 * t * (1.0 - t) / rho;
}

constexpr double kProfileMaxSlopeTimesRho = 1.5;

}  // namespace

TorusConjugacy::TorusConjugacy(const TorusExampleConfig& cfg) : cfg_(cfg) {
  const auto& a = cfg.a;
  const double det = a[0] * a[3] - a[1] * a[2];
  if (!(std::abs(det) > 1e-12)) throw ConstructionError("torus example: A is singular");
  if (!(cfg.rho > 0.0 && cfg.rho < 0.25)) throw ConstructionError("torus example: rho must lie in (0, 1/4)");
  bound_ = norm2x2(a[0] - 1.0, a[1], a[2], a[3] - 1.0) * (1.0 + 2.0 * kProfileMaxSlopeTimesRho);
  if (!(bound_ < 1.0))
    throw ConstructionError("torus example: invertibility bound ||A - I|| (1 + 2 rho max|phi'|) = " +
                            std::to_string(bound_) + " is not below 1");
  norm_a_ = norm2x2(a[0], a[1], a[2], a[3]);
  norm_a_inv_ = norm2x2(a[3] / det, -a[1] / det, -a[2] / det, a[0] / det);
}

Point TorusConjugacy::h(const Point& z) const {
  const auto& a = cfg_.a;
  const double v0 = wrap_signed(z[0] - cfg_.x0[0]);
  const double v1 = wrap_signed(z[1] - cfg_.x0[1]);
  const double phi = profile(std::hypot(v0, v1), cfg_.rho);
  if (phi == 0.0) return z;
  if (phi == 1.0) return Point::torus(cfg_.x0[0] + a[0] * v0 + a[1] * v1, cfg_.x0[1] + a[2] * v0 + a[3] * v1);
  return Point::torus(z[0] + phi * ((a[0] - 1.0) * v0 + a[1] * v1), z[1] + phi * (a[2] * v0 + (a[3] - 1.0) * v1));
}

Point TorusConjugacy::h_inverse(const Point& w) const {
  const auto& a = cfg_.a;
  const double u0 = wrap_signed(w[0] - cfg_.x0[0]);
  const double u1 = wrap_signed(w[1] - cfg_.x0[1]);
  // h fixes the complement of B(x0, 2 rho) and maps that ball onto itself.
  if (std::hypot(u0, u1) >= 2.0 * cfg_.rho) return w;
  const double b00 = a[0] - 1.0, b01 = a[1], b10 = a[2], b11 = a[3] - 1.0;
  const double det = a[0] * a[3] - a[1] * a[2];
  double v0 = (a[3] * u0 - a[1] * u1) / det;
  double v1 = (-a[2] * u0 + a[0] * u1) / det;
  const auto residual = [&](double x0, double x1, double& r0, double& r1) {
    const double phi = profile(std::hypot(x0, x1), cfg_.rho);
    r0 = x0 + phi * (b00 * x0 + b01 * x1) - u0;
    r1 = x1 + phi * (b10 * x0 + b11 * x1) - u1;
  };
  double r0, r1;
  residual(v0, v1, r0, r1);
  for (int it = 0; it < 60 && std::hypot(r0, r1) > 1e-16; ++it) {
    const double s = std::hypot(v0, v1);
    const double phi = profile(s, cfg_.rho);
    const double dphi = s > 0.0 ? profile_slope(s, cfg_.rho) / s : 0.0;
    const double m0 = b00 * v0 + b01 * v1, m1 = b10 * v0 + b11 * v1;
    const double j00 = 1.0 + phi * b00 + dphi * m0 * v0, j01 = phi * b01 + dphi * m0 * v1;
    const double j10 = phi * b10 + dphi * m1 * v0, j11 = 1.0 + phi * b11 + dphi * m1 * v1;
    const double jd = j00 * j11 - j01 * j10;
    v0 -= (j11 * r0 - j01 * r1) / jd;
    v1 -= (-j10 * r0 + j00 * r1) / jd;
    residual(v0, v1, r0, r1);
  }
  // The displacement is a contraction (factor bound_), so plain iteration
  // converges from anywhere if Newton stalled.
  for (int it = 0; it < 2000 && std::hypot(r0, r1) > 1e-15; ++it) {
    v0 -= r0;
    v1 -= r1;
    residual(v0, v1, r0, r1);
  }
  return Point::torus(cfg_.x0[0] + v0, cfg_.x0[1] + v1);
}

IfsSystem build_torus_system(const TorusExampleConfig& cfg) {
  if (!(cfg.gamma[0] > 0.0 && cfg.gamma[0] < 1.0 && cfg.gamma[1] > 0.0 && cfg.gamma[1] < 1.0))
    throw ConstructionError("torus example: gamma must lie in (0, 1)^2");
  const auto conj = std::make_shared<const TorusConjugacy>(cfg);
  const auto g = cfg.gamma;
  const auto conjugate = [conj, g](const Point& p, std::int64_t n) {
    const Point w = conj->h_inverse(p);
    return conj->h(Point::torus(w[0] + fractional_multiple(g[0], n), w[1] + fractional_multiple(g[1], n)));
  };
  Generator gen;
  gen.name = "h R_gamma h^-1";
  gen.forward = [conjugate](const Point& p) { return conjugate(p, 1); };
  gen.inverse = [conjugate](const Point& p) { return conjugate(p, -1); };
  gen.power = conjugate;
  gen.affine_region = Ball(Point::torus(cfg.x0[0], cfg.x0[1]), cfg.rho);

  const auto plain = std::make_shared<const IfsSystem>(Manifold::Torus2, std::vector<Generator>{gen}, "torus_example");
  WitnessConstructor hook = [plain, cfg](const Point& x, const Point& y, double r, double theta,
                                         std::uint64_t max_length) {
    const ReturnIndex ri =
        torus_return_index(*plain, cfg, x, y, r, theta, static_cast<std::int64_t>(std::min<std::uint64_t>(
                                                            max_length, std::numeric_limits<std::int64_t>::max())));
    ConstructedWitness out;
    out.steps = static_cast<std::uint64_t>(ri.found ? ri.n : ri.best_n);
    out.note = ri.note;
    if (ri.found) out.word = Word::repeat({0, false}, static_cast<std::size_t>(ri.n));
    return out;
  };
  return IfsSystem(Manifold::Torus2, {gen}, "torus_example", std::move(hook));
}

ReturnIndex torus_return_index(const IfsSystem& sys, const TorusExampleConfig& cfg, const Point& z, const Point& y,
                               double r, double theta, std::int64_t max_n, double resolution_factor) {
  if (sys.manifold() != Manifold::Torus2 || z.manifold() != Manifold::Torus2 || y.manifold() != Manifold::Torus2)
    throw DomainError("torus_return_index: expects the torus");
  if (max_n < 1) throw BudgetError("torus_return_index: budget must be positive");
  const TorusConjugacy conj(cfg);
  const Point x0 = Point::torus(cfg.x0[0], cfg.x0[1]);
  const Point wz = conj.h_inverse(z);
  const Point wy = conj.h_inverse(y);
  const double threshold = r / theta;
  const double delta = r / (resolution_factor * theta);
  // h^-1 B(z, r) is an ellipse of radius <= r ||A^-1||; it and its final
  // translate near h^-1 y must stay where h is affine.
  const double reach = r * (1.0 + 1.0 / theta) * conj.operator_norm_a_inverse();
  ReturnIndex out;
  out.affine = dist(wz, x0) + reach < cfg.rho && dist(wy, x0) + reach < cfg.rho;
  if (!out.affine) out.note = "source or target leaves the affine region of h; steps are not affine";
  out.best_predicted = std::numeric_limits<double>::infinity();

  const auto& a = cfg.a;
  const double lip = conj.operator_norm_a();
  const Letter g{0, false};
  constexpr std::size_t kMaxCertifications = 256;
  for (std::int64_t n = 1; n <= max_n; ++n) {
    const double u0 = wrap_signed(wz[0] + fractional_multiple(cfg.gamma[0], n) - wy[0]);
    const double u1 = wrap_signed(wz[1] + fractional_multiple(cfg.gamma[1], n) - wy[1]);
    // Affine region: the image is B(z, r) shifted by A u exactly.
    const double predicted = out.affine ? std::hypot(a[0] * u0 + a[1] * u1, a[2] * u0 + a[3] * u1)
                                        : lip * std::hypot(u0, u1);
    if (predicted < out.best_predicted) {
      out.best_predicted = predicted;
      out.best_n = n;
    }
    if (predicted + 2.0 * delta >= threshold) continue;
    ++out.certifications;
    const WitnessResult w = certify_word(sys, Word::repeat(g, static_cast<std::size_t>(n)), z, y, r, theta, delta);
    if (w.found) {
      out.found = true;
      out.n = n;
      out.certified_distance = w.certified_distance;
      out.margin = w.margin;
      return out;
    }
    if (out.certifications >= kMaxCertifications) break;
  }
  out.certified_distance = std::numeric_limits<double>::infinity();
  out.margin = -out.certified_distance;
  if (!out.note.empty()) out.note += "; ";
  out.note += "no return index up to " + std::to_string(max_n) + " (best predicted distance " +
              std::to_string(out.best_predicted) + " at n = " + std::to_string(out.best_n) + ")";
  return out;
}

// ---------------------------------------------------------------- sphere

json SphereExampleConfig::to_json() const { return {{"gamma1", gamma1}, {"gamma2", gamma2}}; }

namespace {

// Rotation by angle about coordinate axis `axis` (2: z, 0: x), turning the
// (b, c) plane counterclockwise where (axis, b, c) is cyclic.
std::array<double, 9> axis_rotation(int axis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  std::array<double, 9> m{};
  const int b = (axis + 1) % 3, d = (axis + 2) % 3;
  m[axis * 3 + axis] = 1.0;
  m[b * 3 + b] = c;
  m[b * 3 + d] = -s;
  m[d * 3 + b] = s;
  m[d * 3 + d] = c;
  return m;
}

Point rotate(const std::array<double, 9>& m, const Point& p) {
  const auto& v = p.raw();
  return Point::sphere(m[0] * v[0] + m[1] * v[1] + m[2] * v[2], m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
                       m[6] * v[0] + m[7] * v[1] + m[8] * v[2]);
}

Generator sphere_generator(std::string name, int axis, double gamma) {
  Generator g;
  g.name = std::move(name);
  const auto fwd = axis_rotation(axis, kTwoPi * gamma);
  const auto inv = axis_rotation(axis, -kTwoPi * gamma);
  g.forward = [fwd](const Point& p) { return rotate(fwd, p); };
  g.inverse = [inv](const Point& p) { return rotate(inv, p); };
  g.power = [axis, gamma](const Point& p, std::int64_t n) {
    return rotate(axis_rotation(axis, kTwoPi * fractional_multiple(gamma, n)), p);
  };
  g.isometry = true;
  g.rotation_matrix = fwd;
  return g;
}

Eigen::Matrix3d to_eigen(const std::array<double, 9>& m) {
  Eigen::Matrix3d out;
  out << m[0], m[1], m[2], m[3], m[4], m[5], m[6], m[7], m[8];
  return out;
}

}  // namespace

Point sphere_translation_formula(const Point& h, double gamma, int axis) {
  if (h.manifold() != Manifold::Sphere2) throw DomainError("sphere_translation_formula: expects the sphere");
  if (axis != 0 && axis != 2) throw InputError("sphere_translation_formula: axis must be 0 (x) or 2 (z)");
  const auto& v = h.raw();
  const int b = (axis + 1) % 3, c = (axis + 2) % 3;
  const double s = std::hypot(v[b], v[c]);  // radius of the parallel through H
  if (s == 0.0) return h;                   // the poles are fixed
  // Meridian projection to the equator, then advance by arc length gamma
  // along the equator of length 1, i.e. by angle 2 pi gamma.
  const double longitude = std::atan2(v[c], v[b]) + kTwoPi * gamma;
  const double kb = kSphereRadius * std::cos(longitude);
  const double kc = kSphereRadius * std::sin(longitude);
  // Lift back to the parallel of H along the meridian of K.
  std::array<double, 3> out{};
  out[axis] = v[axis];
  out[b] = kb / kSphereRadius * s;
  out[c] = kc / kSphereRadius * s;
  return Point::sphere(out[0], out[1], out[2]);
}

IfsSystem build_sphere_system(const SphereExampleConfig& cfg) {
  if (!(cfg.gamma1 > 0.0 && cfg.gamma1 < 1.0 && cfg.gamma2 > 0.0 && cfg.gamma2 < 1.0))
    throw ConstructionError("sphere example: gamma1 and gamma2 must lie in (0, 1)");
  IfsSystem sys(Manifold::Sphere2, {sphere_generator("T", 2, cfg.gamma1), sphere_generator("R", 0, cfg.gamma2)},
                "sphere_example");
  Rng rng(0x5EED5);
  for (int i = 0; i < 1000; ++i) {
    const Point p = sample_uniform(Manifold::Sphere2, rng);
    const Point t = sphere_translation_formula(p, cfg.gamma1, 2);
    const Point r = sphere_translation_formula(p, cfg.gamma2, 0);
    const auto gap = [](const Point& a, const Point& b) {
      return std::max({std::abs(a[0] - b[0]), std::abs(a[1] - b[1]), std::abs(a[2] - b[2])});
    };
    if (gap(t, sys.apply({0, false}, p)) > 1e-12 || gap(r, sys.apply({1, false}, p)) > 1e-12)
      throw ConstructionError("sphere example: meridian formula and rotation matrix disagree");
  }
  return sys;
}

RotationAxis word_rotation_axis(const IfsSystem& sys, const Word& w) {
  if (sys.manifold() != Manifold::Sphere2) throw DomainError("word_rotation_axis: expects a sphere system");
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  for (const Letter& l : w.letters()) {
    const Generator& g = sys.generator(l.generator);
    if (!g.rotation_matrix) throw CapabilityError("generator '" + g.name + "' is not a rotation");
    const Eigen::Matrix3d gm = to_eigen(*g.rotation_matrix);
    // Letter 0 is applied last, so it is the leftmost factor.
    m = m * (l.inverted ? Eigen::Matrix3d(gm.transpose()) : gm);
  }
  const Eigen::AngleAxisd aa(m);
  RotationAxis out;
  out.angle = aa.angle();
  out.reliable = out.angle > 1e-9;
  const Eigen::Vector3d axis = out.reliable ? aa.axis().normalized() : Eigen::Vector3d::UnitZ();
  out.axis = {axis.x(), axis.y(), axis.z()};
  out.fixed_points = {Point::sphere(axis.x(), axis.y(), axis.z()), Point::sphere(-axis.x(), -axis.y(), -axis.z())};
  for (const Point& p : out.fixed_points) out.residual = std::max(out.residual, dist(apply_word(sys, w, p), p));
  return out;
}

json EquicontinuityReport::to_json() const {
  return {{"words", words}, {"max_deviation", max_deviation}, {"with_inverses", with_inverses}};
}

EquicontinuityReport equicontinuity_check(const IfsSystem& sys, std::size_t n_words, std::size_t max_len,
                                          std::uint64_t seed, bool with_inverses) {
  if (max_len == 0) throw InputError("equicontinuity_check: max_len must be positive");
  if (with_inverses && !sys.invertible()) throw CapabilityError("equicontinuity_check: system is not invertible");
  EquicontinuityReport rep;
  rep.words = n_words;
  rep.with_inverses = with_inverses;
  const std::size_t alphabet = sys.size() * (with_inverses ? 2 : 1);
  for (std::size_t i = 0; i < n_words; ++i) {
    Rng rng(derive_seed(seed, i));
    const std::size_t len = 1 + rng.below(max_len);
    std::vector<Letter> letters;
    for (std::size_t j = 0; j < len; ++j) {
      const std::size_t c = rng.below(alphabet);
      letters.push_back(with_inverses ? Letter{c / 2, c % 2 == 1} : Letter{c, false});
    }
    const Word w(std::move(letters));
    const Point p = sample_uniform(sys.manifold(), rng);
    const Point q = sample_uniform(sys.manifold(), rng);
    rep.max_deviation =
        std::max(rep.max_deviation, std::abs(dist(apply_word(sys, w, p), apply_word(sys, w, q)) - dist(p, q)));
  }
  return rep;
}

// -------------------------------------------------------------- controls

IfsSystem rotation_system(double beta) {
  Generator g;
  g.name = "R_beta";
  g.forward = [beta](const Point& p) { return Point::circle(p[0] + beta); };
  g.inverse = [beta](const Point& p) { return Point::circle(p[0] - beta); };
  g.power = [beta](const Point& p, std::int64_t n) { return Point::circle(p[0] + fractional_multiple(beta, n)); };
  g.isometry = true;
  g.rotation_domain = OpenArc{0.0, 1.0};
  g.rotation_shift = beta;
  return IfsSystem(Manifold::Circle, {g}, "rotation");
}

IfsSystem translation_system(double alpha1, double alpha2) {
  Generator g;
  g.name = "R_alpha";
  g.forward = [=](const Point& p) { return Point::torus(p[0] + alpha1, p[1] + alpha2); };
  g.inverse = [=](const Point& p) { return Point::torus(p[0] - alpha1, p[1] - alpha2); };
  g.power = [=](const Point& p, std::int64_t n) {
    return Point::torus(p[0] + fractional_multiple(alpha1, n), p[1] + fractional_multiple(alpha2, n));
  };
  g.isometry = true;
  return IfsSystem(Manifold::Torus2, {g}, "translation");
}

}  // namespace hyperifs
