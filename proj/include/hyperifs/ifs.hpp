#pragma once

// Generators, words of the generated semigroup, and orbits.
//
// Composition order: a Word stores letters so that letter 0 is applied LAST,
// matching f_w = f_{w[0]} o f_{w[1]} o ... o f_{w[n-1]}. A Sequence is the
// time-ordered view used for fiberwise orbits: sequence[0] is applied first.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperifs/geom.hpp"

namespace hyperifs {

struct Letter {
  std::size_t generator = 0;
  bool inverted = false;

  bool operator==(const Letter&) const = default;
};

/// Time-ordered symbol sequence (first entry applied first).
using Sequence = std::vector<Letter>;

class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}

  /// Signed 1-based codes: +i is generator i, -i its inverse.
  static Word from_signed(std::span<const int> codes);
  static Word repeat(Letter letter, std::size_t n) { return Word(std::vector<Letter>(n, letter)); }
  /// The word acting as `seq` applied in time order.
  static Word from_sequence(std::span<const Letter> seq);

  std::vector<int> to_signed() const;
  std::string to_string() const;

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  const std::vector<Letter>& letters() const { return letters_; }
  const Letter& operator[](std::size_t i) const { return letters_[i]; }
  bool uses_inverses() const;

  /// Composition: (a * b) applies b first, then a.
  friend Word operator*(const Word& a, const Word& b);
  bool operator==(const Word&) const = default;

 private:
  std::vector<Letter> letters_;
};

using PointMap = std::function<Point(const Point&)>;
/// f^n for integer n (negative only when invertible).
using PowerMap = std::function<Point(const Point&, std::int64_t)>;

struct Generator {
  std::string name;
  PointMap forward;
  PointMap inverse;  // empty when not invertible
  PowerMap power;    // optional closed form for iterates
  bool isometry = false;

  // Circle only: on this open arc the map is x -> x + rotation_shift.
  std::optional<OpenArc> rotation_domain;
  double rotation_shift = 0.0;

  // Region on which the map is affine in the chart (torus example).
  std::optional<Ball> affine_region;

  // Sphere only: row-major rotation matrix when the map is a rotation.
  std::optional<std::array<double, 9>> rotation_matrix;

  bool invertible() const { return static_cast<bool>(inverse); }
};

/// Output of a system-specific witness constructor: a candidate word and
/// bookkeeping; certification happens in the caller.
struct ConstructedWitness {
  std::optional<Word> word;
  std::uint64_t steps = 0;
  std::string note;
};

using WitnessConstructor = std::function<ConstructedWitness(
    const Point& x, const Point& y, double r, double theta, std::uint64_t max_length)>;

class IfsSystem {
 public:
  IfsSystem(Manifold manifold, std::vector<Generator> generators, std::string name = {},
            WitnessConstructor witness = {});

  Manifold manifold() const { return manifold_; }
  const std::string& name() const { return name_; }
  std::size_t size() const { return generators_.size(); }
  const Generator& generator(std::size_t i) const { return generators_.at(i); }
  const std::vector<Generator>& generators() const { return generators_; }

  bool invertible() const;
  bool all_isometries() const;
  const WitnessConstructor& witness_constructor() const { return witness_; }

  Point apply(const Letter& letter, const Point& p) const;
  /// letter^n with the power fast path when available.
  Point apply_power(const Letter& letter, const Point& p, std::size_t n) const;

  /// Sampled structural checks: images stay on the manifold (1e-10) and
  /// declared inverses satisfy g^-1(g(x)) = x (1e-9). Throws ConstructionError.
  void validate(std::uint64_t seed, std::size_t samples = 1000) const;

 private:
  Manifold manifold_;
  std::vector<Generator> generators_;
  std::string name_;
  WitnessConstructor witness_;
};

/// f_w(p), letters composed right to left. Runs of one letter use the
/// generator's power map when present.
Point apply_word(const IfsSystem& sys, const Word& w, const Point& p);

/// Prefix evaluations (f^1(x), ..., f^n(x)) along a time-ordered sequence.
std::vector<Point> fiberwise_orbit(const IfsSystem& sys, std::span<const Letter> sequence, const Point& x);

/// All words of length <= max_length in length-lexicographic order.
/// Letter order: generator 0, its inverse (if enabled), generator 1, ...
class WordEnumerator {
 public:
  static constexpr std::uint64_t kDefaultBudget = std::uint64_t{1} << 24;

  WordEnumerator(std::size_t k, std::size_t max_length, bool with_inverses,
                 std::uint64_t budget = kDefaultBudget);

  static std::uint64_t count(std::size_t k, std::size_t max_length, bool with_inverses);

  std::optional<Word> next();
  std::uint64_t total() const { return total_; }

 private:
  std::size_t alphabet_;
  bool with_inverses_;
  std::size_t max_length_;
  std::uint64_t total_;
  std::vector<std::size_t> digits_;
  bool started_ = false;
  bool done_ = false;
};

}  // namespace hyperifs
