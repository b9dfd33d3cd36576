#pragma once

// Numerical verifiers: overlap numbers, (local) Θ-hyper-minimality via
// witness search, orbit-density minimality and the invariant-hull ergodicity
// proxy. Universal quantifiers are checked on seeded finite samples; reports
// record the sample and never claim a proof.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hyperifs/geom.hpp"
#include "hyperifs/hyper.hpp"
#include "hyperifs/ifs.hpp"
#include "json.hpp"

namespace hyperifs {

struct OverlapParams {
  double theta = 6.0;
  double t = 0.1;
  double ell = 0.8;

  /// Throws InputError unless theta > 1, 0 <= t <= 1/2, 0 < ell < 1.
  void validate() const;
};

/// (1 - ell) m(B(r - r/theta)) - t m(B(r)): the overlap margin once the
/// inner ball is known to sit inside B(x, r).
double overlap_margin_closed_form(Manifold m, const OverlapParams& p, double r);

struct SearchBudget {
  std::uint64_t max_nodes = 200000;
  std::size_t max_length = 10000;
  std::size_t beam_width = 8;
  std::size_t restarts = 4;
  std::size_t exhaustive_max_length = 12;
  bool use_inverses = false;
  /// Net resolution cap is r / (resolution_factor * theta).
  double resolution_factor = 10.0;

  void validate() const;
};

enum class Strategy { Auto, Exhaustive, Greedy, SystemSpecific };

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);

struct SearchStats {
  std::uint64_t nodes_expanded = 0;
  std::size_t restarts_used = 0;
  double wall_seconds = 0.0;
};

struct WitnessResult {
  bool found = false;
  std::optional<Word> word;
  /// d_H of the representations plus their resolutions (exact balls add 0).
  double certified_distance = 0.0;
  /// r/theta - certified_distance.
  double margin = 0.0;
  bool exact = false;
  std::string strategy;
  std::string note;
  SearchStats stats;
};

/// Certified distance of ĥ_w(B(x,r)') to B(y,r)' at resolution cap delta.
WitnessResult certify_word(const IfsSystem& sys, const Word& w, const Point& x, const Point& y, double r,
                           double theta, double delta);

WitnessResult find_witness(const IfsSystem& sys, const Point& x, const Point& y, double r, double theta,
                           const SearchBudget& budget = {}, Strategy strategy = Strategy::Auto,
                           std::uint64_t seed = 0);

struct SampleRow {
  std::size_t id = 0;
  std::vector<double> x;
  std::vector<double> y;
  double r = 0.0;
  bool found = false;
  double certified_distance = 0.0;
  double margin = 0.0;
  std::optional<Word> word;
  nlohmann::json extra = nlohmann::json::object();
};

struct VerifierReport {
  std::string condition;
  nlohmann::json parameters = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::vector<SampleRow> samples;
  nlohmann::json aggregate = nlohmann::json::object();
  std::vector<std::string> notes;
  bool passed = false;
  double runtime_seconds = 0.0;

  /// Timing is left out unless requested so reruns are byte-identical.
  nlohmann::json to_json(bool include_timing = false) const;
  /// Columns: sample_id,x,y,r,found,certified_distance,margin,word.
  std::string to_csv() const;
};

VerifierReport check_overlap_number(Manifold m, const OverlapParams& params, const std::vector<double>& radii,
                                    std::size_t samples_per_radius, std::uint64_t seed,
                                    std::size_t monte_carlo_samples = 0);

VerifierReport check_hyper_minimal(const IfsSystem& sys, double theta, double r0, std::size_t n_pairs,
                                   const std::vector<double>& radii, const SearchBudget& budget,
                                   std::uint64_t seed, Strategy strategy = Strategy::Auto);

using PointSampler = std::function<Point(Rng&)>;

/// x drawn from `inner` (defaults to uniform in U), y uniform in U.
VerifierReport check_local_hyper_minimal(const IfsSystem& sys, const Ball& region, const PointSampler& inner,
                                         double theta, double r0, std::size_t n_pairs,
                                         const std::vector<double>& radii, const SearchBudget& budget,
                                         std::uint64_t seed, Strategy strategy = Strategy::Auto);

struct DensityReport {
  bool dense = false;
  std::uint64_t steps_used = 0;  // orbit points generated
  std::size_t cells_hit = 0;
  std::size_t cells_total = 0;

  nlohmann::json to_json() const;
};

/// Grows the forward orbit of x breadth-first over the generators, dropping
/// points within the same ε/4 cell as an earlier one, until every cell of an
/// ε-grid is hit or `max_points` orbit points have been generated.
DensityReport check_minimality_density(const IfsSystem& sys, const Point& x, double epsilon,
                                       std::uint64_t max_points, bool with_inverses = false);

using SetMembership = std::function<bool(const Point&)>;

/// Monte Carlo estimate of m(S ∩ B(p, κ)) / m(B(p, κ)).
MeasureEstimate density_ratio(const SetMembership& in_set, const Point& p, double kappa, std::size_t samples,
                              std::uint64_t seed);

/// Fraction (by measure) of ε-grid cells hit by the forward images of an
/// ε-net of U0, per depth, starting with depth 0. Images are pruned to one
/// point per ε/4 cell; stops once the whole grid is hit or no new ε/4 cell
/// was reached at the last depth.
std::vector<double> invariant_hull_coverage(const IfsSystem& sys, const Ball& u0, double epsilon,
                                            std::size_t max_depth);

}  // namespace hyperifs
