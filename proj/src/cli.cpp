#include "hyperifs/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "hyperifs/criteria.hpp"
#include "hyperifs/errors.hpp"
#include "hyperifs/hyper.hpp"
#include "hyperifs/zoo.hpp"

namespace hyperifs::cli {

using nlohmann::json;

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string coords_csv(const Point& p) {
  std::string s;
  for (std::size_t i = 0; i < coordinate_count(p.manifold()); ++i) s += (i ? "," : "") + fmt(p[i]);
  return s;
}

std::string coord_header(Manifold m) {
  switch (m) {
    case Manifold::Circle: return "x";
    case Manifold::Torus2: return "x,y";
    case Manifold::Sphere2: return "x,y,z";
  }
  return "x";
}

Point point_from(Manifold m, const std::vector<double>& c) {
  if (c.size() != coordinate_count(m))
    throw InputError("expected " + std::to_string(coordinate_count(m)) + " coordinates for a point on the " +
                     std::string(to_string(m)));
  return Point::from_coords(m, c);
}

// Radius of the ball of normalized measure m (clamped below 1/2).
double radius_for_measure(Manifold man, double m) {
  if (!(m > 0.0)) throw InputError("ball measure must be positive");
  double r = 0.5;
  switch (man) {
    case Manifold::Circle: r = m / 2.0; break;
    case Manifold::Torus2: r = std::sqrt(m / std::numbers::pi); break;
    case Manifold::Sphere2: r = kSphereRadius * std::acos(std::max(-1.0, 1.0 - 2.0 * m)); break;
  }
  return std::min(r, 0.5 * (1.0 - 1e-9));
}

// ------------------------------------------------------------ examples

struct Check {
  std::string name;
  bool passed;
  json value;
};

json checks_json(const std::vector<Check>& checks) {
  json out = json::array();
  for (const auto& c : checks) out.push_back({{"check", c.name}, {"passed", c.passed}, {"value", c.value}});
  return out;
}

bool all_passed(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string coverage_csv(const std::vector<double>& cov) {
  std::ostringstream os;
  os << "depth,coverage\n";
  for (std::size_t i = 0; i < cov.size(); ++i) os << i << ',' << fmt(cov[i]) << '\n';
  return os.str();
}

// Battery pieces shared by the three examples.
void add_common(Bundle& b, std::vector<Check>& checks, const IfsSystem& sys, std::uint64_t seed,
                const std::vector<double>& overlap_radii, double density_eps, double coverage_eps) {
  const Manifold m = sys.manifold();
  const VerifierReport overlap = check_overlap_number(m, OverlapParams{}, overlap_radii, 20, derive_seed(seed, 11));
  b.files["overlap.json"] = dump(overlap.to_json());
  b.files["overlap.csv"] = overlap.to_csv();
  checks.push_back({"overlap margin positive", overlap.passed, overlap.aggregate["min_relative_margin"]});

  Rng rng(derive_seed(seed, 12));
  const Point start = sample_uniform(m, rng);
  const DensityReport density = check_minimality_density(sys, start, density_eps, 1000000);
  json dj = density.to_json();
  dj["epsilon"] = density_eps;
  dj["start"] = std::vector<double>(start.coords().begin(), start.coords().end());
  b.files["density.json"] = dump(dj);
  checks.push_back({"orbit density at epsilon " + fmt(density_eps), density.dense, density.steps_used});

  const Point c = sample_uniform(m, rng);
  const std::vector<double> cov = invariant_hull_coverage(sys, Ball(c, radius_for_measure(m, 0.01)), coverage_eps, 100000);
  b.files["coverage.csv"] = coverage_csv(cov);
  checks.push_back({"invariant hull coverage reaches 0.99", cov.back() >= 0.99, cov.back()});
}

Bundle circle_bundle(const ExampleOptions& o) {
  Bundle b;
  std::vector<Check> checks;
  const auto& cfg = o.circle;
  const auto conditions = circle_conditions(cfg);
  json cj = json::array();
  for (const auto& c : conditions) {
    cj.push_back({{"clause", c.clause}, {"description", c.description}, {"passed", c.passed}, {"value", c.value}});
    checks.push_back({"condition " + c.clause, c.passed, c.value});
  }
  const IfsSystem sys = build_circle_system(cfg);
  const std::int64_t k = compute_k(cfg.beta, cfg.gamma);
  const double lambda = lebesgue_number(cfg);
  b.files["conditions.json"] = dump({{"config", cfg.to_json()},
                                     {"conditions", cj},
                                     {"k", k},
                                     {"lebesgue_number", lambda},
                                     {"gap_measure", cfg.i1.complement_length()}});

  constexpr std::size_t kOmegaLength = 100000;
  Rng rng(derive_seed(o.seed, 1));
  const double x = rng.uniform();
  const OmegaConstruction om = omega_construction(cfg, x, kOmegaLength);
  const std::vector<Point> orbit = fiberwise_orbit(sys, om.symbols, Point::circle(x));
  double drift = 0.0;
  for (std::size_t i = 0; i < orbit.size(); ++i)
    drift = std::max(drift, dist(orbit[i], Point::circle(x + om.rotation_sums[i])));
  const double predicted = static_cast<double>(k - 1) / static_cast<double>(k);
  const double freq = om.frequency_of_first();
  b.files["omega.json"] = dump({{"x", x},
                                {"n", kOmegaLength},
                                {"frequency_of_f1", freq},
                                {"predicted_limit", predicted},
                                {"deviation", std::abs(freq - predicted)},
                                {"pure_rotation", om.pure_rotation},
                                {"max_rotation_sum_deviation", drift}});
  checks.push_back({"omega frequency within 0.01 of (k-1)/k", std::abs(freq - predicted) <= 0.01, freq});
  checks.push_back({"omega prefixes act as rotations", om.pure_rotation && drift < 1e-9, drift});

  SearchBudget budget;
  budget.max_length = 5000;
  const VerifierReport hm = check_hyper_minimal(sys, 6.0, lambda, o.pairs ? o.pairs : 100, {0.02}, budget,
                                                derive_seed(o.seed, 2), Strategy::SystemSpecific);
  b.files["hyper_minimal.json"] = dump(hm.to_json());
  b.files["hyper_minimal.csv"] = hm.to_csv();
  checks.push_back({"witnesses for every sampled pair", hm.passed, hm.aggregate["success_rate"]});

  add_common(b, checks, sys, o.seed, {0.005, 0.01, 0.02, 0.05, 0.1}, 1e-3, 1e-3);
  b.passed = all_passed(checks);
  b.files["summary.json"] = dump({{"example", "circle"}, {"seed", o.seed}, {"passed", b.passed}, {"checks", checks_json(checks)}});
  return b;
}

Bundle torus_bundle(const ExampleOptions& o) {
  Bundle b;
  std::vector<Check> checks;
  const auto& cfg = o.torus;
  const IfsSystem sys = build_torus_system(cfg);
  const TorusConjugacy conj(cfg);
  const Point x0 = Point::torus(cfg.x0[0], cfg.x0[1]);

  Rng rng(derive_seed(o.seed, 1));
  double affine_dev = 0.0, inverse_err = 0.0, power_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Point z = sample_in_ball(x0, cfg.rho, rng);
    const double v0 = wrap_signed(z[0] - x0[0]), v1 = wrap_signed(z[1] - x0[1]);
    const Point expect = Point::torus(x0[0] + cfg.a[0] * v0 + cfg.a[1] * v1, x0[1] + cfg.a[2] * v0 + cfg.a[3] * v1);
    affine_dev = std::max(affine_dev, dist(conj.h(z), expect));
    const Point u = sample_uniform(Manifold::Torus2, rng);
    inverse_err = std::max({inverse_err, dist(conj.h_inverse(conj.h(u)), u), dist(conj.h(conj.h_inverse(u)), u)});
    if (i < 100) {
      const std::size_t n = 1 + rng.below(50);
      Point step = u;
      for (std::size_t j = 0; j < n; ++j) step = sys.apply({0, false}, step);
      power_err = std::max(power_err, dist(step, sys.apply_power({0, false}, u, n)));
    }
  }
  b.files["construction.json"] = dump({{"config", cfg.to_json()},
                                       {"invertibility_bound", conj.invertibility_bound()},
                                       {"affine_identity_max_deviation", affine_dev},
                                       {"two_sided_inverse_max_error", inverse_err},
                                       {"power_identity_max_error", power_err}});
  checks.push_back({"h affine on B(x0, rho)", affine_dev < 1e-12, affine_dev});
  checks.push_back({"two-sided inverse within 1e-9", inverse_err < 1e-9, inverse_err});
  checks.push_back({"power identity within 1e-9", power_err < 1e-9, power_err});

  constexpr std::int64_t kMaxReturn = 100000;
  SearchBudget budget;
  budget.max_length = kMaxReturn;
  const VerifierReport local =
      check_local_hyper_minimal(sys, Ball(x0, cfg.rho / 2.0), {}, 6.0, cfg.rho / 2.0, o.pairs ? o.pairs : 100, {0.01},
                                budget, derive_seed(o.seed, 2), Strategy::SystemSpecific);
  b.files["local_hyper_minimal.json"] = dump(local.to_json());
  b.files["local_hyper_minimal.csv"] = local.to_csv();
  std::vector<std::size_t> bins(10, 0);
  std::size_t missing = 0;
  json nj = json::array();
  for (const auto& s : local.samples) {
    if (!s.found) {
      ++missing;
      nj.push_back(nullptr);
      continue;
    }
    const auto n = static_cast<std::int64_t>(s.word->size());
    nj.push_back(n);
    ++bins[std::min<std::size_t>(9, static_cast<std::size_t>((n - 1) * 10 / kMaxReturn))];
  }
  json hist = json::array();
  for (std::size_t i = 0; i < bins.size(); ++i)
    hist.push_back({{"from", i * kMaxReturn / 10 + 1}, {"to", (i + 1) * kMaxReturn / 10}, {"count", bins[i]}});
  b.files["return_index.json"] =
      dump({{"r", 0.01}, {"theta", 6.0}, {"max_n", kMaxReturn}, {"n_j", nj}, {"histogram", hist}, {"not_found", missing}});
  checks.push_back({"return index for every sampled pair", local.passed, local.aggregate["success_rate"]});

  add_common(b, checks, sys, o.seed, {0.01, 0.05, 0.1}, 0.05, 1e-2);
  b.passed = all_passed(checks);
  b.files["summary.json"] = dump({{"example", "torus"}, {"seed", o.seed}, {"passed", b.passed}, {"checks", checks_json(checks)}});
  return b;
}

Bundle sphere_bundle(const ExampleOptions& o) {
  Bundle b;
  std::vector<Check> checks;
  const auto& cfg = o.sphere;
  const IfsSystem sys = build_sphere_system(cfg);
  const Point north = Point::sphere(0, 0, 1), south = Point::sphere(0, 0, -1);
  const Point east = Point::sphere(1, 0, 0), west = Point::sphere(-1, 0, 0);
  double pole = 0.0;
  for (const Point& p : {north, south}) pole = std::max(pole, dist(sys.apply({0, false}, p), p));
  for (const Point& p : {east, west}) pole = std::max(pole, dist(sys.apply({1, false}, p), p));
  Rng rng(derive_seed(o.seed, 1));
  double formula_gap = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Point p = sample_uniform(Manifold::Sphere2, rng);
    formula_gap = std::max({formula_gap, dist(sphere_translation_formula(p, cfg.gamma1, 2), sys.apply({0, false}, p)),
                            dist(sphere_translation_formula(p, cfg.gamma2, 0), sys.apply({1, false}, p))});
  }
  b.files["construction.json"] =
      dump({{"config", cfg.to_json()}, {"pole_residual", pole}, {"formula_vs_matrix_max", formula_gap}});
  checks.push_back({"poles fixed", pole < 1e-12, pole});
  checks.push_back({"formula path equals matrix path", formula_gap < 1e-12, formula_gap});

  std::ostringstream fp;
  fp << "word,axis_x,axis_y,axis_z,angle,reliable,residual\n";
  double worst = 0.0;
  std::size_t words = 0;
  WordEnumerator en(sys.size(), 6, true);
  while (auto w = en.next()) {
    const RotationAxis ax = word_rotation_axis(sys, *w);
    worst = std::max(worst, ax.residual);
    ++words;
    std::string codes;
    for (int c : w->to_signed()) codes += (codes.empty() ? "" : " ") + std::to_string(c);
    fp << codes << ',' << fmt(ax.axis[0]) << ',' << fmt(ax.axis[1]) << ',' << fmt(ax.axis[2]) << ',' << fmt(ax.angle)
       << ',' << (ax.reliable ? "true" : "false") << ',' << fmt(ax.residual) << '\n';
  }
  b.files["fixed_points.csv"] = fp.str();
  checks.push_back({"every word of length <= 6 fixes its axis points", worst < 1e-9, worst});

  const EquicontinuityReport eq = equicontinuity_check(sys, 1000, 20, derive_seed(o.seed, 3), true);
  const EquicontinuityReport eq_fwd = equicontinuity_check(sys, 1000, 20, derive_seed(o.seed, 4), false);
  b.files["equicontinuity.json"] = dump({{"with_inverses", eq.to_json()}, {"forward_only", eq_fwd.to_json()}});
  checks.push_back({"isometry deviation below 1e-12", std::max(eq.max_deviation, eq_fwd.max_deviation) < 1e-12,
                    std::max(eq.max_deviation, eq_fwd.max_deviation)});

  const VerifierReport hm = check_hyper_minimal(sys, 6.0, 0.5, o.pairs ? o.pairs : 50, {0.05}, SearchBudget{},
                                                derive_seed(o.seed, 2), Strategy::Greedy);
  b.files["hyper_minimal.json"] = dump(hm.to_json());
  b.files["hyper_minimal.csv"] = hm.to_csv();
  checks.push_back({"greedy witnesses for every sampled pair", hm.passed, hm.aggregate["success_rate"]});

  add_common(b, checks, sys, o.seed, {0.01, 0.05, 0.1}, 0.05, 1e-2);
  b.passed = all_passed(checks);
  b.files["summary.json"] = dump({{"example", "sphere"}, {"seed", o.seed}, {"passed", b.passed}, {"checks", checks_json(checks)}});
  return b;
}

// --------------------------------------------------------------- options

struct SystemOptions {
  std::string example;
  std::string system;
  double beta = constants::kCircleBeta;
  std::vector<double> alpha{constants::kTorusGamma[0], constants::kTorusGamma[1]};
  CircleExampleConfig circle;
  std::vector<double> circle_i1{0.02, 0.96}, circle_i2{0.7, 0.6};
  std::vector<double> torus_gamma{constants::kTorusGamma[0], constants::kTorusGamma[1]};
  std::vector<double> torus_x0{0.5, 0.5};
  std::vector<double> torus_a{1.0, 0.2, 0.0, 1.0};
  double torus_rho = 0.05;
  std::vector<double> sphere_gamma{constants::kSphereGamma1, constants::kSphereGamma2};

  void add_to(CLI::App* app, bool need_system) {
    auto* ex = app->add_option("--example", example, "Example system")->check(CLI::IsMember({"circle", "torus", "sphere"}));
    auto* sy = app->add_option("--system", system, "Control system: rotation (circle) or translation (torus)")
                   ->check(CLI::IsMember({"rotation", "translation"}));
    ex->excludes(sy);
    if (!need_system) {
      ex->configurable(false);
      sy->configurable(false);
    }
    app->add_option("--beta", beta, "Rotation number of the rotation control");
    app->add_option("--alpha", alpha, "Translation vector of the translation control")->expected(2);
    app->add_option("--circle-beta", circle.beta, "Circle example: rotation on I1");
    app->add_option("--circle-gamma", circle.gamma, "Circle example: rotation on I2");
    app->add_option("--circle-i1", circle_i1, "Circle example: I1 as start length")->expected(2);
    app->add_option("--circle-i2", circle_i2, "Circle example: I2 as start length")->expected(2);
    app->add_option("--blend-strength", circle.blend_strength, "Circle example: off-domain bump size in (0,1)");
    app->add_option("--torus-gamma", torus_gamma, "Torus example: translation vector")->expected(2);
    app->add_option("--torus-x0", torus_x0, "Torus example: affine center")->expected(2);
    app->add_option("--torus-a", torus_a, "Torus example: matrix A, row major")->expected(4);
    app->add_option("--torus-rho", torus_rho, "Torus example: affine radius");
    app->add_option("--sphere-gamma", sphere_gamma, "Sphere example: gamma1 gamma2")->expected(2);
  }

  void finalize() {
    circle.i1 = {circle_i1[0], circle_i1[1]};
    circle.i2 = {circle_i2[0], circle_i2[1]};
  }

  CircleExampleConfig circle_config() const { return circle; }
  TorusExampleConfig torus_config() const {
    TorusExampleConfig t;
    t.gamma = {torus_gamma[0], torus_gamma[1]};
    t.x0 = {torus_x0[0], torus_x0[1]};
    t.a = {torus_a[0], torus_a[1], torus_a[2], torus_a[3]};
    t.rho = torus_rho;
    return t;
  }
  SphereExampleConfig sphere_config() const { return {sphere_gamma[0], sphere_gamma[1]}; }

  IfsSystem build() const {
    if (example == "circle") return build_circle_system(circle_config());
    if (example == "torus") return build_torus_system(torus_config());
    if (example == "sphere") return build_sphere_system(sphere_config());
    if (system == "rotation") return rotation_system(beta);
    if (system == "translation") return translation_system(alpha[0], alpha[1]);
    throw InputError("choose a system with --example or --system");
  }
};

struct BudgetOptions {
  SearchBudget budget;
  std::string strategy = "auto";

  void add_to(CLI::App* app) {
    app->add_option("--strategy", strategy, "auto, exhaustive, greedy or system")
        ->check(CLI::IsMember({"auto", "exhaustive", "greedy", "system"}));
    app->add_option("--max-nodes", budget.max_nodes, "Search node budget")->check(CLI::PositiveNumber);
    app->add_option("--max-length", budget.max_length, "Longest word considered")->check(CLI::PositiveNumber);
    app->add_option("--beam-width", budget.beam_width, "Nodes expanded per greedy round")->check(CLI::PositiveNumber);
    app->add_option("--restarts", budget.restarts, "Seeded greedy restarts");
    app->add_option("--exhaustive-length", budget.exhaustive_max_length, "Exhaustive search word length");
    app->add_flag("--inverses", budget.use_inverses, "Allow inverse letters");
    app->add_option("--resolution-factor", budget.resolution_factor,
                    "Net resolution is r / (factor theta)")
        ->check(CLI::Range(1.0, 1e6));
  }
};

// Resolved option values of one subcommand, keyed by long name.
json resolved_config(const CLI::App* app) {
  json out = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (!opt->get_configurable() || opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help") continue;
    std::vector<std::string> vals = opt->results();
    if (vals.empty()) {
      if (opt->get_type_size() == 0) {
        out[name] = false;
        continue;
      }
      const std::string d = opt->get_default_str();
      out[name] = d;
      continue;
    }
    if (opt->get_type_size() == 0) {
      out[name] = true;
      continue;
    }
    std::string joined;
    for (const auto& v : vals) joined += (joined.empty() ? "" : " ") + v;
    out[name] = joined;
  }
  return out;
}

void write_files(const std::filesystem::path& dir, const std::map<std::string, std::string>& files) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : files) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw InputError("cannot write " + (dir / name).string());
    f << content;
  }
}

json envelope(const std::string& command, std::uint64_t seed, const json& config, const json& body) {
  return {{"command", command}, {"seed", seed}, {"config", config}, {"report", body}};
}

void list_failures(const VerifierReport& rep, std::ostream& out) {
  for (const auto& s : rep.samples) {
    if (s.found) continue;
    out << "  failed pair " << s.id << ": r=" << fmt(s.r) << " best certified distance "
        << (std::isfinite(s.certified_distance) ? fmt(s.certified_distance) : std::string("none")) << '\n';
  }
}

}  // namespace

Bundle run_example(const std::string& name, const ExampleOptions& options) {
  if (name == "circle") return circle_bundle(options);
  if (name == "torus") return torus_bundle(options);
  if (name == "sphere") return sphere_bundle(options);
  throw InputError("unknown example '" + name + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Iterated function systems on S1, T2 and S2: hyperspace witnesses and verifiers", "hyperifs"};
  app.option_defaults()->always_capture_default();
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "INI file; [subcommand] sections hold option values")->configurable(false);
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  std::string out_dir = "hyperifs-out";
  app.add_option("--seed", seed, "Root RNG seed (required)")->required();
  app.add_option("--out", out_dir, "Output directory (overridden by HYPERIFS_OUT_DIR)")->configurable(false);

  // verify-overlap
  auto* ov = app.add_subcommand("verify-overlap", "Check the (t, ell) overlap inequality on sampled balls");
  std::string ov_manifold = "circle";
  OverlapParams ov_params;
  std::vector<double> ov_radii{0.01, 0.02, 0.05, 0.1};
  std::size_t ov_samples = 100, ov_mc = 0;
  ov->add_option("--manifold", ov_manifold, "circle, torus or sphere")
      ->check(CLI::IsMember({"circle", "torus", "torus2", "sphere", "sphere2"}));
  ov->add_option("--theta", ov_params.theta, "Overlap number candidate");
  ov->add_option("--t", ov_params.t, "t in [0, 1/2]");
  ov->add_option("--ell", ov_params.ell, "ell in (0, 1)");
  ov->add_option("--radii", ov_radii, "Radii to sample");
  ov->add_option("--samples", ov_samples, "Samples per radius")->check(CLI::PositiveNumber);
  ov->add_option("--mc-samples", ov_mc, "Monte Carlo cross-check samples per row (0 disables)");

  // check-hyper-minimal / check-local
  SystemOptions hm_sys, lc_sys, ex_sys, or_sys, cv_sys;
  BudgetOptions hm_budget, lc_budget;
  double hm_theta = 6.0, hm_r0 = 0.0, lc_theta = 6.0, lc_r0 = 0.0;
  std::vector<double> hm_r{0.02}, lc_r{0.01};
  std::size_t hm_pairs = 100, lc_pairs = 100;
  auto* hm = app.add_subcommand("check-hyper-minimal", "Sample pairs and search hyper-minimality witnesses");
  hm_sys.add_to(hm, true);
  hm_budget.add_to(hm);
  hm->add_option("--theta", hm_theta, "Theta (> 5)");
  hm->add_option("--r0", hm_r0, "Radius bound r0 (0: Lebesgue number for the circle example, else 1/2)");
  hm->add_option("--r", hm_r, "Radii to test");
  hm->add_option("--pairs", hm_pairs, "Number of sampled (x, y) pairs")->check(CLI::PositiveNumber);

  std::vector<double> lc_center;
  double lc_radius = 0.0, lc_inner = 0.0;
  auto* lc = app.add_subcommand("check-local", "Local hyper-minimality on a region U");
  lc_sys.add_to(lc, true);
  lc_budget.add_to(lc);
  lc->add_option("--theta", lc_theta, "Theta (> 5)");
  lc->add_option("--r0", lc_r0, "Radius bound r0 (0: the region radius)");
  lc->add_option("--r", lc_r, "Radii to test");
  lc->add_option("--pairs", lc_pairs, "Number of sampled (x, y) pairs")->check(CLI::PositiveNumber);
  lc->add_option("--center", lc_center, "Center of U (torus example default: x0)");
  lc->add_option("--radius", lc_radius, "Radius of U (torus example default: rho/2)");
  lc->add_option("--inner-radius", lc_inner, "Sample x from the concentric ball of this radius (0: all of U)");

  // example
  std::string ex_name;
  std::size_t ex_pairs = 0;
  auto* ex = app.add_subcommand("example", "Run the full property battery of an example and write a bundle");
  ex->add_option("name", ex_name, "circle, torus or sphere")->required()->check(CLI::IsMember({"circle", "torus", "sphere"}));
  ex->add_option("--pairs", ex_pairs, "Sampled pairs (default 100, 100, 50)");
  ex_sys.add_to(ex, false);

  // orbit
  std::vector<double> or_x;
  std::size_t or_length = 10;
  std::vector<int> or_sequence{1};
  bool or_omega = false;
  auto* orb = app.add_subcommand("orbit", "Write a fiberwise orbit as CSV");
  or_sys.add_to(orb, true);
  orb->add_option("--x", or_x, "Start point (default: drawn from the seed)");
  orb->add_option("--length", or_length, "Number of steps")->check(CLI::PositiveNumber);
  orb->add_option("--sequence", or_sequence, "Signed 1-based letters, applied in time order and cycled");
  orb->add_flag("--omega", or_omega, "Circle example: use the inductive omega construction");

  // coverage
  std::vector<double> cv_center;
  double cv_measure = 0.01, cv_eps = 0.0, cv_target = 0.99;
  std::size_t cv_depth = 100000;
  auto* cv = app.add_subcommand("coverage", "Write invariant-hull coverage against depth as CSV");
  cv_sys.add_to(cv, true);
  cv->add_option("--center", cv_center, "Center of U0 (default: drawn from the seed)");
  cv->add_option("--measure", cv_measure, "Normalized measure of U0");
  cv->add_option("--eps", cv_eps, "Grid size (default 1e-3 on the circle, 1e-2 elsewhere)");
  cv->add_option("--max-depth", cv_depth, "Depth limit")->check(CLI::PositiveNumber);
  cv->add_option("--target", cv_target, "Coverage counted as full");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitHolds;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const char* env = std::getenv(kOutDirEnv);
  const std::filesystem::path dir = env && *env ? std::string(env) : out_dir;

  try {
    if (ov->parsed()) {
      const Manifold m = manifold_from_string(ov_manifold);
      const VerifierReport rep = check_overlap_number(m, ov_params, ov_radii, ov_samples, seed, ov_mc);
      write_files(dir, {{"overlap.json", dump(envelope("verify-overlap", seed, resolved_config(ov), rep.to_json()))},
                        {"overlap.csv", rep.to_csv()}});
      out << "verify-overlap: " << (rep.passed ? "holds" : "fails") << ", min relative margin "
          << fmt(rep.aggregate["min_relative_margin"].get<double>()) << '\n';
      return rep.passed ? kExitHolds : kExitFailed;
    }

    if (hm->parsed()) {
      hm_sys.finalize();
      const IfsSystem sys = hm_sys.build();
      double r0 = hm_r0;
      if (r0 <= 0.0) r0 = hm_sys.example == "circle" ? lebesgue_number(hm_sys.circle_config()) : 0.5;
      const VerifierReport rep = check_hyper_minimal(sys, hm_theta, r0, hm_pairs, hm_r, hm_budget.budget, seed,
                                                     strategy_from_string(hm_budget.strategy));
      write_files(dir, {{"hyper_minimal.json",
                         dump(envelope("check-hyper-minimal", seed, resolved_config(hm), rep.to_json()))},
                        {"hyper_minimal.csv", rep.to_csv()}});
      out << "check-hyper-minimal: " << (rep.passed ? "holds" : "fails") << ", witnesses found for " << rep.aggregate["found"] << "/"
          << rep.aggregate["total"] << " samples\n";
      list_failures(rep, out);
      return rep.passed ? kExitHolds : kExitFailed;
    }

    if (lc->parsed()) {
      lc_sys.finalize();
      const IfsSystem sys = lc_sys.build();
      Point center = Point::from_coords(sys.manifold(), std::vector<double>(coordinate_count(sys.manifold()), 0.0));
      double radius = lc_radius;
      if (!lc_center.empty()) {
        center = point_from(sys.manifold(), lc_center);
      } else if (lc_sys.example == "torus") {
        center = Point::torus(lc_sys.torus_x0[0], lc_sys.torus_x0[1]);
      } else {
        throw InputError("check-local needs --center for this system");
      }
      if (radius <= 0.0) {
        if (lc_sys.example != "torus") throw InputError("check-local needs --radius for this system");
        radius = lc_sys.torus_rho / 2.0;
      }
      const Ball region(center, radius);
      PointSampler inner;
      if (lc_inner > 0.0) {
        if (lc_inner > radius) throw InputError("--inner-radius exceeds the region radius");
        inner = [center, lc_inner](Rng& rng) { return sample_in_ball(center, lc_inner, rng); };
      }
      const double r0 = lc_r0 > 0.0 ? lc_r0 : 0.5;
      const VerifierReport rep = check_local_hyper_minimal(sys, region, inner, lc_theta, r0, lc_pairs, lc_r,
                                                           lc_budget.budget, seed, strategy_from_string(lc_budget.strategy));
      write_files(dir, {{"local_hyper_minimal.json",
                         dump(envelope("check-local", seed, resolved_config(lc), rep.to_json()))},
                        {"local_hyper_minimal.csv", rep.to_csv()}});
      out << "check-local: " << (rep.passed ? "holds" : "fails") << ", witnesses found for " << rep.aggregate["found"] << "/"
          << rep.aggregate["total"] << " samples\n";
      list_failures(rep, out);
      return rep.passed ? kExitHolds : kExitFailed;
    }

    if (ex->parsed()) {
      ex_sys.finalize();
      ExampleOptions eo;
      eo.seed = seed;
      eo.pairs = ex_pairs;
      eo.circle = ex_sys.circle_config();
      eo.torus = ex_sys.torus_config();
      eo.sphere = ex_sys.sphere_config();
      Bundle bundle = run_example(ex_name, eo);
      bundle.files["config.json"] = dump({{"command", "example"}, {"name", ex_name}, {"seed", seed}, {"config", resolved_config(ex)}});
      const auto bundle_dir = dir / ("example_" + ex_name);
      write_files(bundle_dir, bundle.files);
      out << "example " << ex_name << ": " << (bundle.passed ? "all checks hold" : "some checks fail") << " ("
          << bundle_dir.string() << ")\n";
      const json summary = json::parse(bundle.files.at("summary.json"));
      for (const auto& c : summary["checks"])
        out << "  [" << (c["passed"].get<bool>() ? "pass" : "FAIL") << "] " << c["check"].get<std::string>() << '\n';
      return bundle.passed ? kExitHolds : kExitFailed;
    }

    if (orb->parsed()) {
      or_sys.finalize();
      const IfsSystem sys = or_sys.build();
      Rng rng(seed);
      const Point x = or_x.empty() ? sample_uniform(sys.manifold(), rng) : point_from(sys.manifold(), or_x);
      Sequence seq;
      if (or_omega) {
        if (or_sys.example != "circle") throw InputError("--omega applies to the circle example only");
        seq = omega_construction(or_sys.circle_config(), x[0], or_length).symbols;
      } else {
        if (or_sequence.empty()) throw InputError("--sequence must not be empty");
        const Word cyc = Word::from_signed(or_sequence);
        for (const Letter& l : cyc.letters())
          if (l.generator >= sys.size()) throw InputError("--sequence names a generator the system lacks");
        for (std::size_t i = 0; i < or_length; ++i) seq.push_back(cyc[i % cyc.size()]);
      }
      const std::vector<Point> orbit = fiberwise_orbit(sys, seq, x);
      std::ostringstream csv;
      csv << "step,letter," << coord_header(sys.manifold()) << '\n';
      for (std::size_t i = 0; i < orbit.size(); ++i) {
        const int code = static_cast<int>(seq[i].generator) + 1;
        csv << i + 1 << ',' << (seq[i].inverted ? -code : code) << ',' << coords_csv(orbit[i]) << '\n';
      }
      write_files(dir, {{"orbit.csv", csv.str()},
                        {"orbit.json", dump(envelope("orbit", seed, resolved_config(orb),
                                                     {{"start", std::vector<double>(x.coords().begin(), x.coords().end())},
                                                      {"steps", orbit.size()}}))}});
      out << "orbit: " << orbit.size() << " rows written to " << (dir / "orbit.csv").string() << '\n';
      return kExitHolds;
    }

    if (cv->parsed()) {
      cv_sys.finalize();
      const IfsSystem sys = cv_sys.build();
      const Manifold m = sys.manifold();
      Rng rng(seed);
      const Point c = cv_center.empty() ? sample_uniform(m, rng) : point_from(m, cv_center);
      const double eps = cv_eps > 0.0 ? cv_eps : (m == Manifold::Circle ? 1e-3 : 1e-2);
      const std::vector<double> cov = invariant_hull_coverage(sys, Ball(c, radius_for_measure(m, cv_measure)), eps, cv_depth);
      const bool full = cov.back() >= cv_target;
      write_files(dir, {{"coverage.csv", coverage_csv(cov)},
                        {"coverage.json", dump(envelope("coverage", seed, resolved_config(cv),
                                                        {{"depths", cov.size()}, {"final", cov.back()}, {"reached_target", full}}))}});
      out << "coverage: final " << fmt(cov.back()) << " after " << cov.size() - 1 << " steps\n";
      return full ? kExitHolds : kExitFailed;
    }
  } catch (const ConstructionError& e) {
    err << "construction failed: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const BudgetError& e) {
    err << "budget error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CapabilityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace hyperifs::cli
