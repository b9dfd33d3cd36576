#pragma once

// The three worked example systems (circle, torus, sphere) with their
// construction checks and example-specific algorithms, plus plain rotation
// and translation systems used as controls.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hyperifs/criteria.hpp"
#include "hyperifs/geom.hpp"
#include "hyperifs/ifs.hpp"
#include "json.hpp"

namespace hyperifs {

// ---------------------------------------------------------------- circle

namespace constants {
/// (sqrt 2 - 1) / 10, slightly above the length 0.04 of the gap S1 \ I1.
inline const double kCircleBeta = (std::numbers::sqrt2 - 1.0) / 10.0;
/// beta + 0.001 (pi - 3): close to beta, still irrational.
inline const double kCircleGamma = kCircleBeta + 0.001 * (std::numbers::pi - 3.0);
inline const std::array<double, 2> kTorusGamma{std::numbers::sqrt2 / 2.0, std::numbers::sqrt3 - 1.0};
inline const double kSphereGamma1 = std::numbers::pi - 3.0;
inline const double kSphereGamma2 = (std::numbers::phi - 1.0) / 2.0;
}  // namespace constants

struct CircleExampleConfig {
  OpenArc i1{0.02, 0.96};
  OpenArc i2{0.7, 0.6};  // (0.7, 1.3), wrapping through 0
  double beta = constants::kCircleBeta;
  double gamma = constants::kCircleGamma;
  /// Size of the monotone bump added to the rotation lift off the rotation
  /// domain, as a fraction of the largest value keeping the lift increasing.
  double blend_strength = 0.5;

  nlohmann::json to_json() const;
};

struct ConditionCheck {
  std::string clause;  // "(i)", "(ii)", ...
  std::string description;
  bool passed = false;
  double value = 0.0;  // the measured quantity behind the clause
};

/// Grid checks of the three cover conditions and the parameter relations
/// (beta above the gap, beta close to gamma).
std::vector<ConditionCheck> circle_conditions(const CircleExampleConfig& cfg, std::size_t grid = 10000);

/// Throws ConstructionError naming every violated clause.
IfsSystem build_circle_system(const CircleExampleConfig& cfg = {});

/// Largest lambda such that every arc of radius lambda sits inside I1 or
/// I2, by grid minimax with exact distances to the arc complements.
double lebesgue_number(const CircleExampleConfig& cfg, std::size_t grid = 100000);

/// max{n : n beta <= 1 - gamma}.
std::int64_t compute_k(double beta, double gamma);

struct OmegaConstruction {
  Sequence symbols;           // time ordered: symbols[0] is applied first
  std::vector<double> orbit;  // orbit[i] = f^{i+1}_omega(x)
  std::vector<double> rotation_sums;
  bool pure_rotation = true;  // every step stayed inside its rotation domain

  Word word() const { return Word::from_sequence(symbols); }
  double frequency_of_first() const;
};

/// Inductive rule: keep applying f1 while the current arc B(p, arc_radius)
/// lies in I1 and the step that reached p did not cross the gap S1 \ I1;
/// otherwise apply f2, which needs B(p, arc_radius) inside I2. arc_radius 0
/// is the pointwise rule. Throws ConstructionError if neither applies.
OmegaConstruction omega_construction(const CircleExampleConfig& cfg, double x, std::size_t n,
                                     double arc_radius = 0.0);

/// Runs the construction from x until the orbit is within r/theta of y and
/// returns that prefix (empty word when x is already close). r must be below
/// the Lebesgue number of the cover.
WitnessResult circle_witness(const CircleExampleConfig& cfg, const IfsSystem& sys, const Point& x, const Point& y,
                             double r, double theta, std::size_t max_length = 5000);

// ----------------------------------------------------------------- torus

struct TorusExampleConfig {
  std::array<double, 2> gamma = constants::kTorusGamma;
  std::array<double, 2> x0{0.5, 0.5};
  std::array<double, 4> a{1.0, 0.2, 0.0, 1.0};  // row-major
  double rho = 0.05;

  nlohmann::json to_json() const;
};

/// The conjugating homeomorphism h, affine on B(x0, rho) and the identity
/// outside B(x0, 2 rho).
class TorusConjugacy {
 public:
  explicit TorusConjugacy(const TorusExampleConfig& cfg);

  Point h(const Point& z) const;
  /// Newton iteration with a fixed-point fallback.
  Point h_inverse(const Point& w) const;
  /// ||A - I|| (1 + 2 rho max|phi'|); below 1 means h is a bijection.
  double invertibility_bound() const { return bound_; }
  const TorusExampleConfig& config() const { return cfg_; }
  double operator_norm_a() const { return norm_a_; }
  double operator_norm_a_inverse() const { return norm_a_inv_; }

 private:
  TorusExampleConfig cfg_;
  double bound_ = 0.0;
  double norm_a_ = 1.0;
  double norm_a_inv_ = 1.0;
};

/// Single generator h R_gamma h^-1 with inverse and the closed-form power
/// h R_{n gamma} h^-1. Throws ConstructionError when det A = 0 or the
/// invertibility bound fails.
IfsSystem build_torus_system(const TorusExampleConfig& cfg = {});

struct ReturnIndex {
  bool found = false;
  std::int64_t n = 0;
  double certified_distance = 0.0;
  double margin = 0.0;
  double best_predicted = 0.0;  // smallest affine-prediction distance seen
  std::int64_t best_n = 0;
  std::size_t certifications = 0;
  bool affine = true;  // source and target stay in the affine region
  std::string note;
};

/// Scans n = 1..max_n for h R^n h^-1 (B(z,r)') landing within r/theta of
/// B(y,r)'. Inside the affine region the image is B(z,r) translated by
/// A (n gamma + h^-1 z - h^-1 y), which ranks candidates; each candidate is
/// certified on nets at resolution r / (resolution_factor theta).
ReturnIndex torus_return_index(const IfsSystem& sys, const TorusExampleConfig& cfg, const Point& z, const Point& y,
                               double r, double theta, std::int64_t max_n, double resolution_factor = 10.0);

// ---------------------------------------------------------------- sphere

struct SphereExampleConfig {
  double gamma1 = constants::kSphereGamma1;
  double gamma2 = constants::kSphereGamma2;

  nlohmann::json to_json() const;
};

/// Meridian construction of the rotation about the axis through `pole`
/// (z axis for T, x axis for R): project along the meridian to the equator,
/// advance by arc length gamma, lift back to the parallel of H.
Point sphere_translation_formula(const Point& h, double gamma, int axis);

/// Generators T_gamma1 (about z) and R_gamma2 (about x), both with inverses
/// and rotation matrices. Construction cross-checks the formula path against
/// the matrix path on 1000 seeded samples (1e-12).
IfsSystem build_sphere_system(const SphereExampleConfig& cfg = {});

struct RotationAxis {
  std::array<double, 3> axis{0.0, 0.0, 1.0};
  double angle = 0.0;
  std::array<Point, 2> fixed_points{Point::sphere(0, 0, 1), Point::sphere(0, 0, -1)};
  double residual = 0.0;  // max dist(f_w(p), p) over the two fixed points
  bool reliable = true;   // false for near-identity words
};

/// Composes the letters' rotation matrices and extracts axis and angle.
RotationAxis word_rotation_axis(const IfsSystem& sys, const Word& w);

struct EquicontinuityReport {
  std::size_t words = 0;
  double max_deviation = 0.0;
  bool with_inverses = false;

  nlohmann::json to_json() const;
};

/// |dist(f_w p, f_w q) - dist(p, q)| over random words of length 1..max_len
/// and random pairs.
EquicontinuityReport equicontinuity_check(const IfsSystem& sys, std::size_t n_words, std::size_t max_len,
                                          std::uint64_t seed, bool with_inverses = true);

// -------------------------------------------------------------- controls

/// x -> x + beta on the circle (isometry, full rotation domain).
IfsSystem rotation_system(double beta);
/// z -> z + alpha on the torus.
IfsSystem translation_system(double alpha1, double alpha2);

}  // namespace hyperifs
