#include "hyperifs/ifs.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hyperifs/errors.hpp"

namespace hyperifs {

Word Word::from_signed(std::span<const int> codes) {
  std::vector<Letter> letters;
  letters.reserve(codes.size());
  for (int c : codes) {
    if (c == 0) throw InputError("word code 0 is not a generator (codes are 1-based)");
    letters.push_back({static_cast<std::size_t>(std::abs(c) - 1), c < 0});
  }
  return Word(std::move(letters));
}

Word Word::from_sequence(std::span<const Letter> seq) {
  return Word(std::vector<Letter>(seq.rbegin(), seq.rend()));
}

std::vector<int> Word::to_signed() const {
  std::vector<int> out;
  out.reserve(letters_.size());
  for (const auto& l : letters_) {
    const int code = static_cast<int>(l.generator) + 1;
    out.push_back(l.inverted ? -code : code);
  }
  return out;
}

std::string Word::to_string() const {
  std::ostringstream os;
  os << '[';
  bool first = true;
  for (int c : to_signed()) {
    if (!first) os << ',';
    os << c;
    first = false;
  }
  os << ']';
  return os.str();
}

bool Word::uses_inverses() const {
  for (const auto& l : letters_)
    if (l.inverted) return true;
  return false;
}

Word operator*(const Word& a, const Word& b) {
  std::vector<Letter> out = a.letters_;
  out.insert(out.end(), b.letters_.begin(), b.letters_.end());
  return Word(std::move(out));
}

IfsSystem::IfsSystem(Manifold manifold, std::vector<Generator> generators, std::string name,
                     WitnessConstructor witness)
    : manifold_(manifold), generators_(std::move(generators)), name_(std::move(name)), witness_(std::move(witness)) {
  if (generators_.empty()) throw InputError("an IFS needs at least one generator");
  for (const auto& g : generators_) {
    if (!g.forward) throw InputError("generator '" + g.name + "' has no forward map");
    if (g.rotation_domain && manifold_ != Manifold::Circle)
      throw InputError("rotation domains are only meaningful on the circle");
  }
}

bool IfsSystem::invertible() const {
  for (const auto& g : generators_)
    if (!g.invertible()) return false;
  return true;
}

bool IfsSystem::all_isometries() const {
  for (const auto& g : generators_)
    if (!g.isometry) return false;
  return true;
}

Point IfsSystem::apply(const Letter& letter, const Point& p) const {
  const Generator& g = generator(letter.generator);
  if (!letter.inverted) return g.forward(p);
  if (!g.inverse) throw CapabilityError("generator '" + g.name + "' has no inverse");
  return g.inverse(p);
}

Point IfsSystem::apply_power(const Letter& letter, const Point& p, std::size_t n) const {
  const Generator& g = generator(letter.generator);
  if (letter.inverted && !g.inverse) throw CapabilityError("generator '" + g.name + "' has no inverse");
  if (g.power && n > 1) {
    const auto signed_n = static_cast<std::int64_t>(n);
    return g.power(p, letter.inverted ? -signed_n : signed_n);
  }
  Point q = p;
  for (std::size_t i = 0; i < n; ++i) q = apply(letter, q);
  return q;
}

void IfsSystem::validate(std::uint64_t seed, std::size_t samples) const {
  Rng rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const Point p = sample_uniform(manifold_, rng);
    for (const auto& g : generators_) {
      const Point q = g.forward(p);
      if (q.manifold() != manifold_) throw ConstructionError("generator '" + g.name + "' leaves the manifold");
      if (manifold_ == Manifold::Sphere2) {
        const auto& c = q.raw();
        if (std::abs(std::hypot(c[0], c[1], c[2]) - kSphereRadius) > 1e-10)
          throw ConstructionError("generator '" + g.name + "' image off the sphere");
      }
      if (g.inverse && dist(g.inverse(q), p) > 1e-9)
        throw ConstructionError("generator '" + g.name + "' inverse check failed");
    }
  }
}

Point apply_word(const IfsSystem& sys, const Word& w, const Point& p) {
  if (p.manifold() != sys.manifold()) throw DomainError("apply_word: point on a different manifold");
  Point q = p;
  const auto& letters = w.letters();
  std::size_t i = letters.size();
  while (i > 0) {
    const Letter l = letters[i - 1];
    std::size_t run = 1;
    while (i - run > 0 && letters[i - run - 1] == l) ++run;
    q = sys.apply_power(l, q, run);
    i -= run;
  }
  return q;
}

std::vector<Point> fiberwise_orbit(const IfsSystem& sys, std::span<const Letter> sequence, const Point& x) {
  std::vector<Point> out;
  out.reserve(sequence.size());
  Point q = x;
  for (const auto& l : sequence) {
    q = sys.apply(l, q);
    out.push_back(q);
  }
  return out;
}

std::uint64_t WordEnumerator::count(std::size_t k, std::size_t max_length, bool with_inverses) {
  const std::uint64_t a = static_cast<std::uint64_t>(k) * (with_inverses ? 2 : 1);
  std::uint64_t total = 0;
  std::uint64_t term = 1;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t i = 0; i <= max_length; ++i) {
    if (total > kMax - term) return kMax;
    total += term;
    if (i < max_length) {
      if (a != 0 && term > kMax / a) return kMax;
      term *= a;
    }
  }
  return total;
}

WordEnumerator::WordEnumerator(std::size_t k, std::size_t max_length, bool with_inverses, std::uint64_t budget)
    : alphabet_(k * (with_inverses ? 2 : 1)),
      with_inverses_(with_inverses),
      max_length_(max_length),
      total_(count(k, max_length, with_inverses)) {
  if (k == 0) throw InputError("WordEnumerator: need at least one generator");
  if (total_ > budget)
    throw BudgetError("WordEnumerator: " + std::to_string(total_) + " words exceed the budget of " +
                      std::to_string(budget));
}

std::optional<Word> WordEnumerator::next() {
  if (done_) return std::nullopt;
  if (!started_) {
    started_ = true;
    return Word{};
  }
  // Increment digits_ as a base-alphabet counter; grow the length on overflow.
  std::size_t pos = digits_.size();
  while (pos > 0) {
    if (++digits_[pos - 1] < alphabet_) break;
    digits_[pos - 1] = 0;
    --pos;
  }
  if (pos == 0) {
    if (digits_.size() == max_length_) {
      done_ = true;
      return std::nullopt;
    }
    digits_.assign(digits_.size() + 1, 0);
  }
  std::vector<Letter> letters;
  letters.reserve(digits_.size());
  const std::size_t stride = with_inverses_ ? 2 : 1;
  for (std::size_t d : digits_) letters.push_back({d / stride, with_inverses_ && (d % 2 == 1)});
  return Word(std::move(letters));
}

}  // namespace hyperifs
