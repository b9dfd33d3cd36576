// Acceptance run: one PASS/FAIL line per criterion. `--criterion N` runs a
// single one; the exit status is nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hyperifs/cli.hpp"
#include "hyperifs/criteria.hpp"
#include "hyperifs/hyper.hpp"
#include "hyperifs/zoo.hpp"

using namespace hyperifs;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) passed = false;
    detail += (detail.empty() ? "" : "; ") + std::string(ok ? "" : "FAILED ") + what;
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const Manifold kAll[] = {Manifold::Circle, Manifold::Torus2, Manifold::Sphere2};

bool same_set(const std::vector<Point>& a, const std::vector<Point>& b) {
  const auto inside = [](const std::vector<Point>& u, const std::vector<Point>& v) {
    return std::all_of(u.begin(), u.end(), [&](const Point& p) { return std::find(v.begin(), v.end(), p) != v.end(); });
  };
  return inside(a, b) && inside(b, a);
}

// ------------------------------------------------------------------------ 1

Outcome overlap_closed_forms() {
  Outcome o;
  const OverlapParams p{6.0, 0.1, 0.8};
  const struct {
    Manifold m;
    double expect;
  } cases[] = {{Manifold::Circle, 1.0 / 15.0}, {Manifold::Torus2, 5.0 / 36.0 - 0.1}};
  for (const auto& c : cases) {
    const auto rep = check_overlap_number(c.m, p, {0.02, 0.1, 0.3}, 2, 1, 1000000);
    const auto& agg = rep.aggregate;
    const double lo = agg["min_relative_margin"], hi = agg["max_relative_margin"];
    const double mc = agg["max_mc_relative_deviation"];
    o.require(std::abs(lo - c.expect) < 1e-12 && std::abs(hi - c.expect) < 1e-12,
              std::string(to_string(c.m)) + " relative margin " + num(lo) + " vs " + num(c.expect));
    o.require(mc <= 1e-2, std::string(to_string(c.m)) + " Monte Carlo deviation " + num(mc));
  }
  std::vector<double> radii;
  for (int i = 1; i <= 10; ++i) radii.push_back(0.01 * i);
  const auto sphere = check_overlap_number(Manifold::Sphere2, p, radii, 5, 1, 1000000);
  o.require(sphere.passed && sphere.aggregate["max_mc_relative_deviation"].get<double>() <= 1e-2,
            "sphere min margin " + num(sphere.aggregate["min_margin"]) + " for r <= 0.1");
  return o;
}

// ------------------------------------------------------------------------ 2

Outcome overlap_sampled() {
  Outcome o;
  const OverlapParams p{6.0, 0.1, 0.8};
  std::vector<double> radii;
  for (int i = 1; i <= 20; ++i) radii.push_back(0.49 * i / 20.0);
  for (Manifold m : kAll) {
    const auto rep = check_overlap_number(m, p, radii, 50, 2);
    o.require(rep.samples.size() == 1000 && rep.aggregate["min_margin"].get<double>() > 0.0,
              std::string(to_string(m)) + " min margin " + num(rep.aggregate["min_margin"]) + " over " +
                  std::to_string(rep.samples.size()));
  }
  return o;
}

// ------------------------------------------------------------------------ 3

Outcome hausdorff_axioms() {
  Outcome o;
  for (Manifold m : kAll) {
    Rng rng(3);
    std::size_t bad_symmetry = 0, bad_identity = 0, bad_triangle = 0;
    double worst_excess = 0.0;
    const auto set = [&] {
      const std::size_t n = 1 + rng.below(16);
      const Point c = sample_uniform(m, rng);
      std::vector<Point> pts;
      for (std::size_t i = 0; i < n; ++i) pts.push_back(sample_in_ball(c, 0.2, rng));
      return pts;
    };
    for (int i = 0; i < 10000; ++i) {
      const auto a = set(), b = set(), c = set();
      const double ab = hausdorff_points(a, b), bc = hausdorff_points(b, c), ac = hausdorff_points(a, c);
      if (ab != hausdorff_points(b, a)) ++bad_symmetry;
      if (hausdorff_points(a, a) != 0.0 || (ab == 0.0) != same_set(a, b)) ++bad_identity;
      // Zero distance to a perturbed copy would break identity of indiscernibles.
      std::vector<Point> moved = a;
      moved.back() = geodesic_offset(moved.back(), 1e-9, 0.3);
      if (hausdorff_points(a, moved) == 0.0 && !same_set(a, moved)) ++bad_identity;
      if (ac > ab + bc) {
        ++bad_triangle;
        worst_excess = std::max(worst_excess, (ac - (ab + bc)) / std::numeric_limits<double>::epsilon());
      }
    }
    o.require(bad_symmetry == 0 && bad_identity == 0 && bad_triangle == 0,
              std::string(to_string(m)) + " violations symmetry/identity/triangle " + std::to_string(bad_symmetry) +
                  "/" + std::to_string(bad_identity) + "/" + std::to_string(bad_triangle) + " of 10000" +
                  (bad_triangle ? " (worst excess " + num(worst_excess) + " ulp of 1)" : ""));
  }
  const IfsSystem circle = build_circle_system();
  Rng rng(4);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double r = rng.uniform(0.005, 0.05), delta = r / 60.0;
    const Continuum arc = closure_ball(sample_uniform(Manifold::Circle, rng), r, delta);
    std::vector<Letter> letters(1 + rng.below(10));
    for (auto& l : letters) l = Letter{rng.below(2), false};
    const Word w(std::move(letters));
    const double d = hausdorff(induced_apply(circle, w, arc, {delta, false}).set,
                               induced_apply(circle, w, arc, {delta, true}).set);
    worst = std::max(worst, d / delta);
  }
  o.require(worst <= 2.0, "arc vs net worst d_H " + num(worst) + " delta over 1000 cases");
  return o;
}

// ------------------------------------------------------------------------ 4

Outcome circle_example() {
  Outcome o;
  const CircleExampleConfig cfg;
  std::size_t failed = 0;
  for (const auto& c : circle_conditions(cfg))
    if (!c.passed) ++failed;
  o.require(failed == 0, "conditions by grid, " + std::to_string(failed) + " violated");
  const auto k = compute_k(cfg.beta, cfg.gamma);
  o.require(k == 23, "k = " + std::to_string(k));

  const double x = 0.5;
  const auto om = omega_construction(cfg, x, 100000);
  const double freq = om.frequency_of_first();
  o.require(std::abs(freq - 22.0 / 23.0) <= 0.01, "frequency " + num(freq));
  const IfsSystem sys = build_circle_system(cfg);
  const auto orbit = fiberwise_orbit(sys, om.symbols, Point::circle(x));
  // Each step must be the chosen rotation; the cumulative drift against the
  // exact rotation sum is rounding accumulated over n steps, reported only.
  long double sum = 0;
  double drift = 0.0, step_error = 0.0;
  Point prev = Point::circle(x);
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    const double shift = om.symbols[i].generator == 0 ? cfg.beta : cfg.gamma;
    sum += shift;
    const long double e = x + sum;
    drift = std::max(drift, dist(orbit[i], Point::circle(static_cast<double>(e - std::floor(e)))));
    step_error = std::max(step_error, dist(orbit[i], Point::circle(prev[0] + shift)));
    prev = orbit[i];
  }
  o.require(om.pure_rotation && step_error < 1e-12,
            "pure rotation per step error " + num(step_error) + ", cumulative drift " + num(drift));

  Rng rng(5);
  std::size_t found = 0, longest = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Point a = sample_uniform(Manifold::Circle, rng), b = sample_uniform(Manifold::Circle, rng);
    const WitnessResult w = circle_witness(cfg, sys, a, b, 0.02, 6.0);
    if (w.found && w.exact && w.word->size() <= 5000 && w.certified_distance < 0.02 / 6.0) ++found;
    if (w.word) longest = std::max(longest, w.word->size());
    worst = std::max(worst, w.certified_distance);
  }
  o.require(found == 100, "witnesses " + std::to_string(found) + "/100, longest " + std::to_string(longest) +
                              ", worst d_H " + num(worst));
  return o;
}

// ------------------------------------------------------------------------ 5

Outcome torus_example() {
  Outcome o;
  const TorusExampleConfig cfg;
  const TorusConjugacy h(cfg);
  Rng rng(6);
  double affine = 0.0, inverse = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Point z = sample_in_ball(Point::torus(cfg.x0[0], cfg.x0[1]), cfg.rho, rng);
    const double dx = wrap_signed(z[0] - cfg.x0[0]), dy = wrap_signed(z[1] - cfg.x0[1]);
    const Point lin = Point::torus(cfg.x0[0] + cfg.a[0] * dx + cfg.a[1] * dy, cfg.x0[1] + cfg.a[2] * dx + cfg.a[3] * dy);
    affine = std::max(affine, dist(h.h(z), lin));
    const Point u = sample_uniform(Manifold::Torus2, rng);
    inverse = std::max({inverse, dist(h.h_inverse(h.h(u)), u), dist(h.h(h.h_inverse(u)), u)});
  }
  o.require(affine <= 1e-15, "affine-region deviation " + num(affine));
  o.require(inverse < 1e-9, "two-sided inverse " + num(inverse));

  const IfsSystem sys = build_torus_system(cfg);
  const Point x0 = Point::torus(cfg.x0[0], cfg.x0[1]);
  std::size_t found = 0;
  double worst_best = 0.0;
  for (int i = 0; i < 100; ++i) {
    Rng pr(derive_seed(6, i));
    const Point z = sample_in_ball(x0, cfg.rho / 2, pr), y = sample_in_ball(x0, cfg.rho / 2, pr);
    const ReturnIndex ri = torus_return_index(sys, cfg, z, y, 0.01, 6.0, 100000);
    if (ri.found && ri.n <= 100000 && ri.certified_distance < 0.01 / 6.0) ++found;
    else worst_best = std::max(worst_best, ri.best_predicted);
  }
  o.require(found == 100, "return index found for " + std::to_string(found) +
                              "/100 pairs; worst best-predicted distance among failures " + num(worst_best) +
                              " vs threshold " + num(0.01 / 6.0));
  return o;
}

// ------------------------------------------------------------------------ 6

Outcome sphere_example() {
  Outcome o;
  const SphereExampleConfig cfg;
  const IfsSystem sys = build_sphere_system(cfg);
  double pole = 0.0;
  for (const auto& p : {Point::sphere(0, 0, 1), Point::sphere(0, 0, -1)}) pole = std::max(pole, dist(sys.apply({0, false}, p), p));
  for (const auto& p : {Point::sphere(1, 0, 0), Point::sphere(-1, 0, 0)}) pole = std::max(pole, dist(sys.apply({1, false}, p), p));
  o.require(pole < 1e-12, "pole residual " + num(pole));

  Rng rng(7);
  double formula = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Point x = sample_uniform(Manifold::Sphere2, rng);
    formula = std::max({formula, dist(sphere_translation_formula(x, cfg.gamma1, 2), sys.apply({0, false}, x)),
                        dist(sphere_translation_formula(x, cfg.gamma2, 0), sys.apply({1, false}, x))});
  }
  o.require(formula < 1e-12, "formula vs matrix " + num(formula));

  const auto eq = equicontinuity_check(sys, 1000, 20, 7, true);
  o.require(eq.max_deviation < 1e-12, "isometry deviation " + num(eq.max_deviation));

  WordEnumerator words(2, 6, true);
  double residual = 0.0;
  std::size_t count = 0;
  while (auto w = words.next()) {
    const RotationAxis ax = word_rotation_axis(sys, *w);
    ++count;
    for (const auto& fp : ax.fixed_points) residual = std::max(residual, dist(apply_word(sys, *w, fp), fp));
  }
  o.require(residual < 1e-9, "fixed points of " + std::to_string(count) + " words, residual " + num(residual));

  const auto dense = check_minimality_density(sys, Point::sphere(0.3, 0.4, 0.5), 0.05, 1000000);
  o.require(dense.dense, "orbit density at 0.05 after " + std::to_string(dense.steps_used) + " points");

  const auto hm = check_hyper_minimal(sys, 6.0, 0.5, 50, {0.05}, SearchBudget{}, 7, Strategy::Greedy);
  o.require(hm.passed, "greedy witnesses " + hm.aggregate["found"].dump() + "/50");
  return o;
}

// ------------------------------------------------------------------------ 7

Outcome ball_distance() {
  Outcome o;
  for (Manifold m : kAll) {
    Rng rng(8);
    std::size_t done = 0;
    double worst = 0.0;
    while (done < 1000) {
      const double r = rng.uniform(0.01, 0.1), delta = r / 20.0;
      const Point x = sample_uniform(m, rng), y = sample_in_ball(x, 0.4, rng);
      if (dist(x, y) + r >= 0.5) continue;
      const PointNet a = closure_ball(x, r, delta).to_net(), b = closure_ball(y, r, delta).to_net();
      worst = std::max(worst, std::abs(hausdorff_points(a.points, b.points) - dist(x, y)) / delta);
      ++done;
    }
    o.require(worst <= 2.0, std::string(to_string(m)) + " worst |d_H - dist| " + num(worst) + " delta");
  }
  return o;
}

// ------------------------------------------------------------------------ 8

Outcome coverage() {
  Outcome o;
  const double circle_r = 0.005, plane_r = std::sqrt(0.01 / std::numbers::pi);
  const double sphere_r = kSphereRadius * std::acos(1.0 - 2.0 * 0.01);
  const struct {
    const char* name;
    IfsSystem sys;
    Ball u0;
    double eps;
  } cases[] = {
      {"circle", build_circle_system(), Ball(Point::circle(0.3), circle_r), 1e-3},
      {"torus", build_torus_system(), Ball(Point::torus(0.5, 0.5), plane_r), 1e-2},
      {"sphere", build_sphere_system(), Ball(Point::sphere(0.2, -0.3, 0.6), sphere_r), 1e-2},
  };
  for (const auto& c : cases) {
    const auto cov = invariant_hull_coverage(c.sys, c.u0, c.eps, 100000);
    bool monotone = true;
    for (std::size_t i = 1; i < cov.size(); ++i) monotone = monotone && cov[i] >= cov[i - 1];
    o.require(cov.back() >= 0.99 && monotone, std::string(c.name) + " coverage " + num(cov.back()));
  }
  const auto rat = invariant_hull_coverage(rotation_system(1.0 / 3.0), Ball(Point::circle(0.3), circle_r), 1e-3, 100000);
  o.require(std::abs(rat.back() - 0.03) <= 0.005, "rational control plateau " + num(rat.back()));
  return o;
}

// ------------------------------------------------------------------------ 9

std::map<std::string, std::string> read_tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream f(e.path(), std::ios::binary);
    files[std::filesystem::relative(e.path(), root).string()] =
        std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
  }
  return files;
}

Outcome reproducibility() {
  Outcome o;
  const std::vector<std::vector<std::string>> commands{
      {"verify-overlap", "--manifold", "sphere", "--mc-samples", "1000"},
      {"check-hyper-minimal", "--example", "circle", "--pairs", "20"},
      {"check-hyper-minimal", "--example", "sphere", "--pairs", "5", "--r", "0.05"},
      {"check-local", "--example", "torus", "--pairs", "5", "--max-length", "100000"},
      {"orbit", "--example", "circle", "--omega", "--length", "1000"},
      {"coverage", "--example", "sphere"},
      {"example", "circle", "--pairs", "10"},
  };
  const auto base = std::filesystem::temp_directory_path() / "hyperifs_acceptance_repro";
  std::size_t identical = 0;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::map<std::string, std::string> runs[2];
    for (int k = 0; k < 2; ++k) {
      const auto dir = base / (std::to_string(i) + "_" + std::to_string(k));
      std::filesystem::remove_all(dir);
      std::vector<std::string> args{"--seed", "9", "--out", dir.string()};
      args.insert(args.end(), commands[i].begin(), commands[i].end());
      std::ostringstream out, err;
      const int code = cli::run(args, out, err);
      if (code == cli::kExitUsage) o.require(false, commands[i][0] + " usage error: " + err.str());
      runs[k] = read_tree(dir);
    }
    if (!runs[0].empty() && runs[0] == runs[1]) ++identical;
    else o.require(false, commands[i][0] + " output differs between runs");
  }
  std::filesystem::remove_all(base);
  o.require(identical == commands.size(),
            std::to_string(identical) + "/" + std::to_string(commands.size()) + " commands byte-identical");
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0: no runtime requirement
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "Run only this criterion (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, "overlap closed forms", 30, overlap_closed_forms},
      {2, "overlap inequality sampled", 60, overlap_sampled},
      {3, "Hausdorff metric axioms and arc/net agreement", 0, hausdorff_axioms},
      {4, "circle example", 120, circle_example},
      {5, "torus example", 300, torus_example},
      {6, "sphere example", 300, sphere_example},
      {7, "ball pair d_H equals center distance", 0, ball_distance},
      {8, "invariant hull coverage", 300, coverage},
      {9, "reproducibility", 0, reproducibility},
  };
  int failures = 0;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0) o.require(secs < c.budget_seconds, "runtime " + num(secs) + " s (limit " + num(c.budget_seconds) + " s)");
    else o.detail += "; runtime " + num(secs) + " s";
    std::printf("criterion %d %s: %s (%s)\n", c.id, o.passed ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.passed) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
