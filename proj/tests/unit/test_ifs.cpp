#include <doctest.h>

#include <cmath>
#include <set>

#include "hyperifs/errors.hpp"
#include "hyperifs/ifs.hpp"
#include "hyperifs/zoo.hpp"

using namespace hyperifs;

namespace {

Word random_word(Rng& rng, std::size_t k, std::size_t max_len, bool inverses) {
  const std::size_t len = rng.below(max_len + 1);
  std::vector<Letter> letters;
  for (std::size_t i = 0; i < len; ++i) {
    const std::size_t c = rng.below(k * (inverses ? 2 : 1));
    letters.push_back(inverses ? Letter{c / 2, c % 2 == 1} : Letter{c, false});
  }
  return Word(std::move(letters));
}

}  // namespace

TEST_CASE("word codes round trip") {
  const std::vector<int> codes{1, -2, 2, 1};
  const Word w = Word::from_signed(codes);
  CHECK(w.to_signed() == codes);
  CHECK(w.to_string() == "[1,-2,2,1]");
  CHECK(w.uses_inverses());
  const std::vector<int> zero{0};
  CHECK_THROWS_AS(Word::from_signed(zero), InputError);
  const Sequence seq{{0, false}, {1, false}};
  CHECK(Word::from_sequence(seq).to_signed() == std::vector<int>{2, 1});
}

TEST_CASE("apply_word examples") {
  const IfsSystem rot = rotation_system(0.3);
  const Point x = Point::circle(0.9);
  CHECK(apply_word(rot, Word{}, x) == x);
  CHECK(apply_word(rot, Word::repeat({0, false}, 1), x)[0] == doctest::Approx(0.2));

  const IfsSystem sphere = build_sphere_system();
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const Point p = sample_uniform(Manifold::Sphere2, rng);
    const std::vector<int> codes{1, -1};
    CHECK(dist(apply_word(sphere, Word::from_signed(codes), p), p) < 1e-9);
  }
}

TEST_CASE("composition order: letter 0 is applied last") {
  const IfsSystem circle = build_circle_system();
  const Point x = Point::circle(0.5);
  const std::vector<int> codes{2, 1};
  const Point expect = circle.apply({1, false}, circle.apply({0, false}, x));
  CHECK(apply_word(circle, Word::from_signed(codes), x) == expect);
}

TEST_CASE("semigroup homomorphism on random words") {
  const IfsSystem systems[] = {build_circle_system(), build_torus_system(), build_sphere_system(),
                               rotation_system(0.1234)};
  for (const auto& sys : systems) {
    Rng rng(7);
    double worst = 0.0;
    for (int i = 0; i < 300; ++i) {
      const Word a = random_word(rng, sys.size(), 12, true);
      const Word b = random_word(rng, sys.size(), 12, true);
      const Point p = sample_uniform(sys.manifold(), rng);
      worst = std::max(worst, dist(apply_word(sys, a * b, p), apply_word(sys, a, apply_word(sys, b, p))));
    }
    INFO(sys.name());
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("power fast path agrees with repeated application") {
  const IfsSystem torus = build_torus_system();
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    const Point p = sample_uniform(Manifold::Torus2, rng);
    const std::size_t n = 1 + rng.below(40);
    Point q = p;
    for (std::size_t j = 0; j < n; ++j) q = torus.apply({0, false}, q);
    CHECK(dist(q, apply_word(torus, Word::repeat({0, false}, n), p)) < 1e-9);
  }
}

TEST_CASE("isometry flagged generators preserve distance") {
  for (const auto& sys : {build_sphere_system(), rotation_system(0.377), translation_system(0.3, 0.71)}) {
    Rng rng(11);
    for (const auto& g : sys.generators()) {
      REQUIRE(g.isometry);
      for (int i = 0; i < 1000; ++i) {
        const Point p = sample_uniform(sys.manifold(), rng), q = sample_uniform(sys.manifold(), rng);
        REQUIRE(std::abs(dist(g.forward(p), g.forward(q)) - dist(p, q)) < 1e-12);
      }
    }
  }
}

TEST_CASE("fiberwise orbit") {
  const IfsSystem rot = rotation_system(0.25);
  const Sequence one{{0, false}};
  const auto o1 = fiberwise_orbit(rot, one, Point::circle(0.1));
  REQUIRE(o1.size() == 1);
  CHECK(o1[0][0] == doctest::Approx(0.35));

  // Constant word over an isometry: every step moves by the same distance.
  const IfsSystem sphere = build_sphere_system();
  const Sequence constant(50, Letter{0, false});
  const Point x = Point::sphere(0.3, -0.2, 0.5);
  const auto orbit = fiberwise_orbit(sphere, constant, x);
  const double gap = dist(x, orbit[0]);
  for (std::size_t i = 1; i < orbit.size(); ++i) CHECK(std::abs(dist(orbit[i - 1], orbit[i]) - gap) < 1e-12);
}

TEST_CASE("fiberwise orbit of the circle construction follows rotation sums") {
  const CircleExampleConfig cfg;
  const IfsSystem sys = build_circle_system(cfg);
  const double x = 0.5;
  const OmegaConstruction om = omega_construction(cfg, x, 10000);
  const auto orbit = fiberwise_orbit(sys, om.symbols, Point::circle(x));
  long double sum = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    sum += om.symbols[i].generator == 0 ? static_cast<long double>(cfg.beta) : static_cast<long double>(cfg.gamma);
    const long double expect = x + sum;
    worst = std::max(worst, dist(orbit[i], Point::circle(static_cast<double>(expect - std::floor(expect)))));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("word enumeration counts and order") {
  CHECK(WordEnumerator::count(2, 1, false) == 3);
  CHECK(WordEnumerator::count(2, 2, false) == 7);
  CHECK(WordEnumerator::count(2, 8, true) == 87381);

  WordEnumerator small(2, 1, false);
  std::vector<std::vector<int>> seen;
  while (auto w = small.next()) seen.push_back(w->to_signed());
  CHECK(seen == std::vector<std::vector<int>>{{}, {1}, {2}});

  // Geometric-sum oracle and no duplicates.
  std::uint64_t expect = 0, term = 1;
  for (int i = 0; i <= 8; ++i, term *= 4) expect += term;
  WordEnumerator big(2, 8, true);
  std::set<std::vector<int>> unique;
  std::size_t last_len = 0;
  bool length_monotone = true;
  while (auto w = big.next()) {
    length_monotone = length_monotone && w->size() >= last_len;
    last_len = w->size();
    unique.insert(w->to_signed());
  }
  CHECK(unique.size() == expect);
  CHECK(length_monotone);
  CHECK_THROWS_AS(WordEnumerator(2, 30, true), BudgetError);
}

TEST_CASE("validation and capabilities") {
  build_circle_system().validate(1);
  build_torus_system().validate(2);
  build_sphere_system().validate(3);

  Generator bad;
  bad.name = "bad";
  bad.forward = [](const Point& p) { return Point::circle(p[0] + 0.1); };
  bad.inverse = [](const Point& p) { return Point::circle(p[0] + 0.1); };
  CHECK_THROWS_AS(IfsSystem(Manifold::Circle, {bad}).validate(4), ConstructionError);

  Generator oneway;
  oneway.name = "oneway";
  oneway.forward = [](const Point& p) { return Point::circle(p[0] * 0.5); };
  const IfsSystem sys(Manifold::Circle, {oneway});
  CHECK_FALSE(sys.invertible());
  const std::vector<int> inv{-1};
  CHECK_THROWS_AS(apply_word(sys, Word::from_signed(inv), Point::circle(0.2)), CapabilityError);
  CHECK_THROWS_AS(apply_word(sys, Word{}, Point::torus(0.2, 0.1)), DomainError);
}
