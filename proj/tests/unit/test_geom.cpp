#include <doctest.h>

#include <cmath>
#include <deque>
#include <numbers>
#include <random>

#include "hyperifs/errors.hpp"
#include "hyperifs/geom.hpp"

using namespace hyperifs;

namespace {

const Manifold kAll[] = {Manifold::Circle, Manifold::Torus2, Manifold::Sphere2};

// Independent uniform sampler: Gaussian vectors for the sphere.
Point oracle_uniform(Manifold m, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  switch (m) {
    case Manifold::Circle: return Point::circle(u(g));
    case Manifold::Torus2: {
      const double a = u(g);
      return Point::torus(a, u(g));
    }
    case Manifold::Sphere2: {
      const double a = n(g), b = n(g), c = n(g);
      return Point::sphere(a, b, c);
    }
  }
  return Point::circle(0);
}

double oracle_ball_mc(Manifold m, double r, std::size_t n, std::uint64_t seed, double& se) {
  std::mt19937_64 g(seed);
  const Point c = oracle_uniform(m, g);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (dist(c, oracle_uniform(m, g)) < r) ++hits;
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  se = std::sqrt(p * (1 - p) / static_cast<double>(n));
  return p;
}

// Cap-lens measure by quadrature over rings around x.
double sphere_lens_quadrature(double d, double rx, double ry) {
  const double rho = kSphereRadius;
  const double D = d / rho, R = ry / rho, tx = rx / rho;
  const int steps = 20000;
  double sum = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double t = tx * i / steps;
    double frac;
    if (t == 0.0 || D == 0.0) {
      frac = std::cos(std::abs(t - D)) >= std::cos(R) ? 1.0 : 0.0;
    } else {
      const double c = (std::cos(R) - std::cos(t) * std::cos(D)) / (std::sin(t) * std::sin(D));
      frac = c <= -1 ? 1.0 : (c >= 1 ? 0.0 : std::acos(c) / std::numbers::pi);
    }
    const double w = (i == 0 || i == steps) ? 1 : (i % 2 ? 4 : 2);
    sum += w * std::sin(t) * frac;
  }
  return sum * (tx / steps) / 3.0 / 2.0;  // normalized: sin dθ dφ / 4π
}

}  // namespace

TEST_CASE("distance examples") {
  CHECK(dist(Point::circle(0.1), Point::circle(0.9)) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(dist(Point::torus(0, 0), Point::torus(0.5, 0.5)) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  // Antipodes lie half the equator (length 1) apart.
  CHECK(dist(Point::sphere(0, 0, 1), Point::sphere(0, 0, -1)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(dist(Point::circle(0.1), Point::torus(0.1, 0.1)), DomainError);
}

TEST_CASE("sphere points keep the radius") {
  std::mt19937_64 g(3);
  for (int i = 0; i < 1000; ++i) {
    const auto& v = oracle_uniform(Manifold::Sphere2, g).raw();
    CHECK(std::abs(std::hypot(v[0], v[1], v[2]) - kSphereRadius) < 1e-12);
  }
}

TEST_CASE("metric axioms on random triples") {
  for (Manifold m : kAll) {
    std::mt19937_64 g(17);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const Point a = oracle_uniform(m, g), b = oracle_uniform(m, g), c = oracle_uniform(m, g);
      REQUIRE(dist(a, b) == dist(b, a));
      REQUIRE(dist(a, b) >= 0.0);
      REQUIRE(dist(a, a) == 0.0);
      worst = std::max(worst, dist(a, c) - dist(a, b) - dist(b, c));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("ball measure closed forms") {
  CHECK(ball_measure(Manifold::Circle, 0.1) == doctest::Approx(0.2));
  // Hemisphere: cap area 2 pi rho^2 (1 - cos(pi/2)) over 4 pi rho^2.
  CHECK(ball_measure(Manifold::Sphere2, 0.25) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(ball_measure(Manifold::Torus2, 0.1) == doctest::Approx(std::numbers::pi * 0.01));
  CHECK_THROWS_AS(ball_measure(Manifold::Circle, 0.0), DomainError);
  CHECK_THROWS_AS(ball_measure(Manifold::Circle, 0.6), DomainError);
}

TEST_CASE("ball measure agrees with Monte Carlo on 20 radii") {
  for (Manifold m : kAll) {
    for (int i = 1; i <= 20; ++i) {
      const double r = 0.49 * i / 20.0;
      double se = 0.0;
      const double est = oracle_ball_mc(m, r, 1000000, 100 + i, se);
      INFO(to_string(m), " r=", r);
      CHECK(std::abs(est - ball_measure(m, r)) <= 4.0 * se + 1e-12);
    }
  }
}

TEST_CASE("torus ball measure at 10^6 samples") {
  double se = 0.0;
  const double est = oracle_ball_mc(Manifold::Torus2, 0.1, 1000000, 9, se);
  CHECK(std::abs(est - std::numbers::pi * 0.01) <= 3.0 * se);
}

TEST_CASE("intersection measure examples") {
  CHECK(ball_intersection_measure(Point::circle(0.5), 0.1, Point::circle(0.51), 0.05).value == doctest::Approx(0.1));
  for (Manifold m : kAll) {
    std::mt19937_64 g(5);
    const Point x = oracle_uniform(m, g);
    CHECK(ball_intersection_measure(x, 0.2, x, 0.2).value == doctest::Approx(ball_measure(m, 0.2)));
  }
  // Planar lens of two discs of radius r at distance d.
  const double r = 0.1, d = 0.1;
  const double lens = 2 * r * r * std::acos(d / (2 * r)) - (d / 2) * std::sqrt(4 * r * r - d * d);
  CHECK(lens == doctest::Approx(0.012284).epsilon(1e-4));
  CHECK(ball_intersection_measure(Point::torus(0, 0), r, Point::torus(0.1, 0), r).value ==
        doctest::Approx(lens).epsilon(1e-12));
}

TEST_CASE("containment returns the smaller ball exactly") {
  for (Manifold m : kAll) {
    std::mt19937_64 g(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
      const double rx = 0.01 + 0.4 * u(g);
      const double ry = rx * u(g) * 0.99 + 1e-4;
      const Point x = oracle_uniform(m, g);
      Rng rng(i);
      const Point y = sample_in_ball(x, std::max(1e-9, (rx - ry) * 0.999), rng);
      if (dist(x, y) > rx - ry) continue;
      REQUIRE(ball_intersection_measure(x, rx, y, ry).value == ball_measure(m, ry));
    }
  }
}

TEST_CASE("sphere lens matches ring quadrature") {
  std::mt19937_64 g(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double rx = 0.02 + 0.45 * u(g), ry = 0.02 + 0.45 * u(g);
    const Point x = oracle_uniform(Manifold::Sphere2, g), y = oracle_uniform(Manifold::Sphere2, g);
    const double d = dist(x, y);
    INFO("rx=", rx, " ry=", ry, " d=", d);
    CHECK(ball_intersection_measure(x, rx, y, ry).value == doctest::Approx(sphere_lens_quadrature(d, rx, ry)).epsilon(1e-6));
  }
}

TEST_CASE("torus intersections agree with Monte Carlo, including wraparound") {
  std::mt19937_64 g(37);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double rx = 0.05 + 0.4 * u(g), ry = 0.05 + 0.4 * u(g);
    const Point x = oracle_uniform(Manifold::Torus2, g), y = oracle_uniform(Manifold::Torus2, g);
    std::size_t hits = 0;
    const std::size_t n = 200000;
    for (std::size_t k = 0; k < n; ++k) {
      const Point p = oracle_uniform(Manifold::Torus2, g);
      if (dist(p, x) < rx && dist(p, y) < ry) ++hits;
    }
    const double p = static_cast<double>(hits) / n, se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(ball_intersection_measure(x, rx, y, ry).value - p) <= 4 * se + 1e-9);
  }
}

TEST_CASE("net examples and covering property") {
  const auto circle = net(Point::circle(0.5), 0.1, 0.01);
  CHECK(circle.size() == 21);
  CHECK(circle.front()[0] == doctest::Approx(0.4));
  CHECK(circle.back()[0] == doctest::Approx(0.6));

  for (Manifold m : {Manifold::Torus2, Manifold::Sphere2}) {
    std::mt19937_64 g(41);
    const Point c = oracle_uniform(m, g);
    const double r = 0.1, delta = 0.01;
    const auto pts = net(c, r, delta);
    for (const auto& p : pts) REQUIRE(dist(p, c) <= r + 1e-12);
    Rng rng(43);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const Point q = sample_in_ball(c, r, rng);
      double best = 1.0;
      for (const auto& p : pts) best = std::min(best, dist(p, q));
      worst = std::max(worst, best);
    }
    INFO(to_string(m));
    CHECK(worst <= delta);
    // Chain connectivity with hops of at most 2 delta.
    std::vector<bool> seen(pts.size(), false);
    std::deque<std::size_t> queue{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      for (std::size_t j = 0; j < pts.size(); ++j)
        if (!seen[j] && dist(pts[i], pts[j]) <= 2 * delta) {
          seen[j] = true;
          ++count;
          queue.push_back(j);
        }
    }
    CHECK(count == pts.size());
  }
}

TEST_CASE("cell grids partition the manifold") {
  for (Manifold m : kAll) {
    const CellGrid grid(m, 0.05);
    double total = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c) total += grid.cell_measure(c);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    std::mt19937_64 g(47);
    for (int i = 0; i < 1000; ++i) REQUIRE(grid.cell_of(oracle_uniform(m, g)) < grid.size());
  }
}
