#include "hyperifs/criteria.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <optional>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "hyperifs/errors.hpp"

namespace hyperifs {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<double> coords_of(const Point& p) {
  const auto c = p.coords();
  return {c.begin(), c.end()};
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string format_double(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Grid key used to prune search nodes whose image centers nearly coincide.
struct CenterKey {
  std::int64_t a, b, c;
  bool operator==(const CenterKey&) const = default;
};

struct CenterKeyHash {
  std::size_t operator()(const CenterKey& k) const {
    return static_cast<std::size_t>(static_cast<std::uint64_t>(k.a) * 0x9E3779B97F4A7C15ULL ^
                                    static_cast<std::uint64_t>(k.b) * 0xC2B2AE3D27D4EB4FULL ^
                                    static_cast<std::uint64_t>(k.c) * 0x165667B19E3779F9ULL);
  }
};

CenterKey key_of(const Point& p, double q) {
  const auto f = [q](double v) { return static_cast<std::int64_t>(std::floor(v / q)); };
  switch (p.manifold()) {
    case Manifold::Circle: return {f(p[0]), 0, 0};
    case Manifold::Torus2: return {f(p[0]), f(p[1]), 0};
    case Manifold::Sphere2: return {f(p[0]), f(p[1]), f(p[2])};
  }
  return {0, 0, 0};
}

std::vector<Letter> alphabet(const IfsSystem& sys, bool with_inverses) {
  std::vector<Letter> out;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    out.push_back({i, false});
    if (with_inverses && sys.generator(i).invertible()) out.push_back({i, true});
  }
  return out;
}

void require_theta(double theta) {
  if (!(theta > 5.0)) throw InputError("hyper-minimality checks need theta > 5");
}

json sample_json(const SampleRow& s) {
  json j = s.extra;
  j["id"] = s.id;
  j["x"] = s.x;
  j["y"] = s.y;
  j["r"] = s.r;
  j["found"] = s.found;
  j["certified_distance"] = finite_or_null(s.certified_distance);
  j["margin"] = finite_or_null(s.margin);
  j["word"] = s.word ? json(s.word->to_signed()) : json(nullptr);
  return j;
}

}  // namespace

void OverlapParams::validate() const {
  if (!(theta > 1.0)) throw InputError("overlap: theta must exceed 1");
  if (!(t >= 0.0 && t <= 0.5)) throw InputError("overlap: t must lie in [0, 1/2]");
  if (!(ell > 0.0 && ell < 1.0)) throw InputError("overlap: ell must lie in (0, 1)");
}

double overlap_margin_closed_form(Manifold m, const OverlapParams& p, double r) {
  return (1.0 - p.ell) * ball_measure(m, r - r / p.theta) - p.t * ball_measure(m, r);
}

void SearchBudget::validate() const {
  if (max_nodes == 0 || max_length == 0 || beam_width == 0)
    throw BudgetError("search budget: nodes, length and beam width must be positive");
  if (!(resolution_factor >= 1.0)) throw BudgetError("search budget: resolution factor must be >= 1");
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Auto: return "auto";
    case Strategy::Exhaustive: return "exhaustive";
    case Strategy::Greedy: return "greedy";
    case Strategy::SystemSpecific: return "system";
  }
  return "auto";
}

Strategy strategy_from_string(std::string_view s) {
  if (s == "auto") return Strategy::Auto;
  if (s == "exhaustive") return Strategy::Exhaustive;
  if (s == "greedy") return Strategy::Greedy;
  if (s == "system" || s == "system-specific") return Strategy::SystemSpecific;
  throw InputError("unknown strategy '" + std::string(s) + "'");
}

WitnessResult certify_word(const IfsSystem& sys, const Word& w, const Point& x, const Point& y, double r,
                           double theta, double delta) {
  const Continuum source = closure_ball(x, r, delta);
  const Continuum target = closure_ball(y, r, delta);
  const InducedImage img = induced_apply(sys, w, source, {delta, false});
  const CertifiedDistance cd = certified_hausdorff(img.set, target);
  WitnessResult out;
  out.word = w;
  out.certified_distance = cd.bound();
  out.margin = r / theta - out.certified_distance;
  out.found = out.margin > 0.0;
  out.exact = img.exact && cd.slack == 0.0;
  return out;
}

namespace {

WitnessResult search_exhaustive(const IfsSystem& sys, const Point& x, const Point& y, double r, double theta,
                                const SearchBudget& budget, double delta) {
  const std::size_t max_len = std::min(budget.exhaustive_max_length, budget.max_length);
  WordEnumerator words(sys.size(), max_len, budget.use_inverses && sys.invertible(), budget.max_nodes);
  WitnessResult best;
  best.certified_distance = kInf;
  best.margin = -kInf;
  std::uint64_t nodes = 0;
  while (auto w = words.next()) {
    ++nodes;
    WitnessResult c = certify_word(sys, *w, x, y, r, theta, delta);
    if (c.found) {
      c.stats.nodes_expanded = nodes;
      return c;
    }
    if (c.certified_distance < best.certified_distance) best = c;
  }
  best.found = false;
  best.stats.nodes_expanded = nodes;
  best.note = "exhausted all words up to length " + std::to_string(max_len);
  return best;
}

struct SearchNode {
  double score;
  std::uint64_t order;
  Word word;
  Point center;
  Continuum image;
};

struct NodeOrder {
  bool operator()(const SearchNode& a, const SearchNode& b) const {
    if (a.score != b.score) return a.score > b.score;
    return a.order > b.order;
  }
};

// Meet in the middle for isometric, invertible systems: grow forward images
// u(x) and backward images v^-1(y) side by side. A close pair gives the
// positive word v u, and v being an isometry keeps v u(x) just as close to y.
std::optional<WitnessResult> meet_in_middle(const IfsSystem& sys, const Point& x, const Point& y, double r,
                                            double theta, double delta, std::uint64_t max_nodes,
                                            std::size_t max_length, std::uint64_t& nodes) {
  struct Tree {
    std::vector<Point> pts;
    std::vector<std::int64_t> parent;
    std::vector<std::size_t> letter;
    std::vector<std::size_t> depth;
    std::unordered_set<CenterKey, CenterKeyHash> seen;
    std::unordered_multimap<CenterKey, std::size_t, CenterKeyHash> cells;
    std::size_t next = 0;
  };
  const std::vector<Letter> letters = alphabet(sys, false);
  const double threshold = r / theta;
  const double quantum = r / (4.0 * theta);
  Tree fwd, bwd;
  const auto add = [&](Tree& t, const Point& p, std::int64_t parent, std::size_t letter, std::size_t depth) {
    if (!t.seen.insert(key_of(p, quantum)).second) return false;
    t.cells.emplace(key_of(p, threshold), t.pts.size());
    t.pts.push_back(p);
    t.parent.push_back(parent);
    t.letter.push_back(letter);
    t.depth.push_back(depth);
    return true;
  };
  // Forward letters read outermost first; backward letters innermost first.
  const auto path = [&](const Tree& t, std::size_t i) {
    std::vector<Letter> out;
    for (std::int64_t j = static_cast<std::int64_t>(i); t.parent[j] >= 0; j = t.parent[j]) out.push_back(letters[t.letter[j]]);
    return out;
  };
  const auto match = [&](const Tree& other, const Point& p) -> std::optional<std::size_t> {
    const CenterKey k = key_of(p, threshold);
    const int dz = p.manifold() == Manifold::Sphere2 ? 1 : 0;
    const int dy = p.manifold() == Manifold::Circle ? 0 : 1;
    for (int a = -1; a <= 1; ++a)
      for (int b = -dy; b <= dy; ++b)
        for (int c = -dz; c <= dz; ++c) {
          const auto range = other.cells.equal_range({k.a + a, k.b + b, k.c + c});
          for (auto it = range.first; it != range.second; ++it)
            if (dist(p, other.pts[it->second]) < threshold) return it->second;
        }
    return std::nullopt;
  };
  const auto certify = [&](std::size_t fi, std::size_t bi) -> std::optional<WitnessResult> {
    std::vector<Letter> w = path(bwd, bi);
    std::reverse(w.begin(), w.end());
    const std::vector<Letter> u = path(fwd, fi);
    w.insert(w.end(), u.begin(), u.end());
    if (w.empty()) return std::nullopt;
    WitnessResult out = certify_word(sys, Word(std::move(w)), x, y, r, theta, delta);
    if (!out.found) return std::nullopt;
    return out;
  };

  add(fwd, x, -1, 0, 0);
  add(bwd, y, -1, 0, 0);
  if (auto hit = match(bwd, x)) {
    if (auto out = certify(0, *hit)) return out;
  }
  const std::uint64_t stop_at = nodes + max_nodes;
  bool forward = true;
  while (nodes < stop_at && (fwd.next < fwd.pts.size() || bwd.next < bwd.pts.size())) {
    Tree& t = forward ? fwd : bwd;
    Tree& other = forward ? bwd : fwd;
    if (t.next < t.pts.size()) {
      const std::size_t i = t.next++;
      if (2 * t.depth[i] + 1 <= max_length) {
        for (std::size_t li = 0; li < letters.size(); ++li) {
          const Letter l = forward ? letters[li] : Letter{letters[li].generator, true};
          const Point p = sys.apply(l, t.pts[i]);
          if (!add(t, p, static_cast<std::int64_t>(i), li, t.depth[i] + 1)) continue;
          ++nodes;
          if (auto hit = match(other, p)) {
            const std::size_t j = t.pts.size() - 1;
            if (auto out = forward ? certify(j, *hit) : certify(*hit, j)) return out;
          }
        }
      }
    }
    forward = !forward;
  }
  return std::nullopt;
}

WitnessResult search_greedy(const IfsSystem& sys, const Point& x, const Point& y, double r, double theta,
                            const SearchBudget& budget, double delta, std::uint64_t seed) {
  const Continuum source = closure_ball(x, r, delta);
  const Continuum target = closure_ball(y, r, delta);
  const std::vector<Letter> letters = alphabet(sys, budget.use_inverses);
  const double threshold = r / theta;
  const double quantum = r / (4.0 * theta);
  // Isometric invertible systems keep half the budget for meet in the middle.
  const bool mitm = sys.all_isometries() && sys.invertible();
  const std::uint64_t greedy_nodes = mitm ? budget.max_nodes / 2 : budget.max_nodes;
  const std::uint64_t per_restart = std::max<std::uint64_t>(1, greedy_nodes / (budget.restarts + 1));
  Rng rng(seed);

  WitnessResult best;
  best.certified_distance = kInf;
  best.margin = -kInf;
  std::uint64_t nodes = 0;
  std::uint64_t order = 0;

  for (std::size_t attempt = 0; attempt <= budget.restarts && nodes < greedy_nodes; ++attempt) {
    // Restarts begin from a random prefix so they explore different regions.
    Word start;
    if (attempt > 0) {
      const std::size_t len = 1 + rng.below(std::min<std::uint64_t>(16, budget.max_length));
      std::vector<Letter> pre;
      for (std::size_t i = 0; i < len; ++i) pre.push_back(letters[rng.below(letters.size())]);
      start = Word(std::move(pre));
    }
    std::priority_queue<SearchNode, std::vector<SearchNode>, NodeOrder> frontier;
    std::unordered_set<CenterKey, CenterKeyHash> seen;
    {
      const InducedImage img = induced_apply(sys, start, source, {delta, false});
      const CertifiedDistance cd = certified_hausdorff(img.set, target);
      const Point c = apply_word(sys, start, x);
      seen.insert(key_of(c, quantum));
      frontier.push({cd.bound(), order++, start, c, img.set});
    }
    const std::uint64_t stop_at = std::min(greedy_nodes, nodes + per_restart);
    while (!frontier.empty() && nodes < stop_at) {
      std::vector<SearchNode> batch;
      while (!frontier.empty() && batch.size() < budget.beam_width) {
        batch.push_back(frontier.top());
        frontier.pop();
      }
      for (const SearchNode& node : batch) {
        if (node.score < best.certified_distance) {
          best.certified_distance = node.score;
          best.margin = threshold - node.score;
          best.word = node.word;
        }
        if (node.score < threshold) {
          WitnessResult out = certify_word(sys, node.word, x, y, r, theta, delta);
          out.stats.nodes_expanded = nodes;
          out.stats.restarts_used = attempt;
          if (out.found) return out;
        }
        if (node.word.size() >= budget.max_length) continue;
        for (const Letter& l : letters) {
          const Point c = sys.apply(l, node.center);
          if (!seen.insert(key_of(c, quantum)).second) continue;
          ++nodes;
          const Word w = Word({l}) * node.word;
          const InducedImage img = induced_apply(sys, Word({l}), node.image, {delta, false});
          const CertifiedDistance cd = certified_hausdorff(img.set, target);
          frontier.push({cd.bound(), order++, w, c, img.set});
        }
      }
    }
    best.stats.restarts_used = attempt;
  }
  if (mitm && nodes < budget.max_nodes) {
    if (auto out = meet_in_middle(sys, x, y, r, theta, delta, budget.max_nodes - nodes, budget.max_length, nodes)) {
      out->stats.nodes_expanded = nodes;
      out->stats.restarts_used = best.stats.restarts_used;
      return *out;
    }
  }
  best.found = false;
  best.stats.nodes_expanded = nodes;
  best.note = "greedy search budget exhausted";
  return best;
}

}  // namespace

WitnessResult find_witness(const IfsSystem& sys, const Point& x, const Point& y, double r, double theta,
                           const SearchBudget& budget, Strategy strategy, std::uint64_t seed) {
  require_theta(theta);
  budget.validate();
  if (x.manifold() != sys.manifold() || y.manifold() != sys.manifold())
    throw DomainError("find_witness: points on a different manifold");
  const Stopwatch clock;
  const double delta = r / (budget.resolution_factor * theta);

  if (strategy == Strategy::Auto)
    strategy = sys.witness_constructor() ? Strategy::SystemSpecific : Strategy::Greedy;

  WitnessResult out = certify_word(sys, Word{}, x, y, r, theta, delta);
  if (!out.found) {
    switch (strategy) {
      case Strategy::Exhaustive: out = search_exhaustive(sys, x, y, r, theta, budget, delta); break;
      case Strategy::Greedy: out = search_greedy(sys, x, y, r, theta, budget, delta, seed); break;
      case Strategy::SystemSpecific: {
        if (!sys.witness_constructor())
          throw CapabilityError("system '" + sys.name() + "' has no system-specific witness constructor");
        const ConstructedWitness cw = sys.witness_constructor()(x, y, r, theta, budget.max_length);
        if (cw.word) {
          out = certify_word(sys, *cw.word, x, y, r, theta, delta);
        } else {
          out = WitnessResult{};
          out.certified_distance = kInf;
          out.margin = -kInf;
        }
        out.stats.nodes_expanded = cw.steps;
        out.note = cw.note;
        break;
      }
      case Strategy::Auto: break;
    }
  }
  out.strategy = std::string(to_string(strategy));
  out.stats.wall_seconds = clock.seconds();
  return out;
}

json VerifierReport::to_json(bool include_timing) const {
  json j;
  j["condition"] = condition;
  j["parameters"] = parameters;
  j["seed"] = seed;
  j["sample_count"] = samples.size();
  json rows = json::array();
  for (const auto& s : samples) rows.push_back(sample_json(s));
  j["samples"] = std::move(rows);
  j["aggregate"] = aggregate;
  j["notes"] = notes;
  j["passed"] = passed;
  if (include_timing) j["runtime_seconds"] = runtime_seconds;
  return j;
}

std::string VerifierReport::to_csv() const {
  std::ostringstream os;
  os << "sample_id,x,y,r,found,certified_distance,margin,word\n";
  const auto coords = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ' ';
      s += format_double(v[i]);
    }
    return s;
  };
  for (const auto& s : samples) {
    os << s.id << ',' << coords(s.x) << ',' << coords(s.y) << ',' << format_double(s.r) << ','
       << (s.found ? "true" : "false") << ',' << format_double(s.certified_distance) << ','
       << format_double(s.margin) << ',';
    if (s.word) {
      const auto codes = s.word->to_signed();
      for (std::size_t i = 0; i < codes.size(); ++i) os << (i ? " " : "") << codes[i];
    }
    os << '\n';
  }
  return os.str();
}

VerifierReport check_overlap_number(Manifold m, const OverlapParams& params, const std::vector<double>& radii,
                                    std::size_t samples_per_radius, std::uint64_t seed,
                                    std::size_t monte_carlo_samples) {
  params.validate();
  if (radii.empty() || samples_per_radius == 0) throw InputError("overlap: need radii and samples");
  for (double r : radii)
    if (!(r > 0.0) || r > injectivity_bound(m)) throw DomainError("overlap: radius outside (0, 1/2]");
  const Stopwatch clock;
  VerifierReport rep;
  rep.condition = "overlap_number";
  rep.seed = seed;
  rep.parameters = {{"manifold", std::string(to_string(m))}, {"theta", params.theta}, {"t", params.t},
                    {"ell", params.ell},       {"radii", radii},      {"samples_per_radius", samples_per_radius},
                    {"monte_carlo_samples", monte_carlo_samples}};

  double min_margin = kInf, min_rel = kInf, max_rel = -kInf, max_mc_dev = 0.0, max_mc_z = 0.0;
  double max_containment_dev = 0.0;
  json predicted = json::array();
  std::size_t id = 0;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double r = radii[ri];
    const double inner = r - r / params.theta;
    const double outer_measure = ball_measure(m, r);
    const double predicted_margin = overlap_margin_closed_form(m, params, r);
    predicted.push_back({{"r", r}, {"relative_margin", predicted_margin / outer_measure}});
    for (std::size_t s = 0; s < samples_per_radius; ++s, ++id) {
      Rng rng(derive_seed(seed, id));
      const Point x = sample_uniform(m, rng);
      const Point y = sample_in_ball(x, r / params.theta, rng);
      const MeasureEstimate inter = ball_intersection_measure(x, r, y, inner);
      const double margin = inter.value - params.t * outer_measure - params.ell * ball_measure(m, inner);
      SampleRow row;
      row.id = id;
      row.x = coords_of(x);
      row.y = coords_of(y);
      row.r = r;
      row.found = margin > 0.0;
      row.certified_distance = dist(x, y);
      row.margin = margin;
      row.extra["intersection_measure"] = inter.value;
      row.extra["relative_margin"] = margin / outer_measure;
      max_containment_dev = std::max(max_containment_dev, std::abs(inter.value - ball_measure(m, inner)));
      if (monte_carlo_samples > 0) {
        const MeasureEstimate mc =
            monte_carlo_intersection(x, r, y, inner, monte_carlo_samples, derive_seed(seed ^ 0x4D43ULL, id));
        const double mc_margin = mc.value - params.t * outer_measure - params.ell * ball_measure(m, inner);
        row.extra["mc_intersection_measure"] = mc.value;
        row.extra["mc_std_error"] = mc.std_error;
        row.extra["mc_relative_margin"] = mc_margin / outer_measure;
        max_mc_dev = std::max(max_mc_dev, std::abs(mc_margin - margin) / outer_measure);
        if (mc.std_error > 0.0) max_mc_z = std::max(max_mc_z, std::abs(mc.value - inter.value) / mc.std_error);
      }
      min_margin = std::min(min_margin, margin);
      min_rel = std::min(min_rel, margin / outer_measure);
      max_rel = std::max(max_rel, margin / outer_measure);
      rep.samples.push_back(std::move(row));
    }
  }
  rep.aggregate = {{"min_margin", min_margin},
                   {"min_relative_margin", min_rel},
                   {"max_relative_margin", max_rel},
                   {"predicted", predicted},
                   {"max_containment_deviation", max_containment_dev}};
  if (monte_carlo_samples > 0) {
    rep.aggregate["max_mc_relative_deviation"] = max_mc_dev;
    rep.aggregate["max_mc_z_score"] = max_mc_z;
  }
  rep.notes.push_back("y is sampled in B(x, r/theta); B(y, r - r/theta) then lies inside B(x, r), so the margin "
                      "is independent of y");
  rep.passed = min_margin > 0.0;
  rep.runtime_seconds = clock.seconds();
  return rep;
}

namespace {

SampleRow witness_row(std::size_t id, const Point& x, const Point& y, double r, const WitnessResult& w) {
  SampleRow row;
  row.id = id;
  row.x = coords_of(x);
  row.y = coords_of(y);
  row.r = r;
  row.found = w.found;
  row.certified_distance = w.certified_distance;
  row.margin = w.margin;
  if (w.found) row.word = w.word;
  row.extra["strategy"] = w.strategy;
  row.extra["exact"] = w.exact;
  row.extra["nodes_expanded"] = w.stats.nodes_expanded;
  row.extra["word_length"] = w.word ? w.word->size() : 0;
  if (!w.note.empty()) row.extra["note"] = w.note;
  return row;
}

json budget_json(const SearchBudget& b) {
  return {{"max_nodes", b.max_nodes},
          {"max_length", b.max_length},
          {"beam_width", b.beam_width},
          {"restarts", b.restarts},
          {"exhaustive_max_length", b.exhaustive_max_length},
          {"use_inverses", b.use_inverses},
          {"resolution_factor", b.resolution_factor}};
}

void aggregate_witnesses(VerifierReport& rep) {
  std::size_t found = 0, flagged = 0;
  double worst = kInf;
  std::size_t longest = 0;
  for (const auto& s : rep.samples) {
    if (s.found) ++found;
    if (s.extra.contains("note") && !s.found) ++flagged;
    worst = std::min(worst, s.margin);
    if (s.word) longest = std::max(longest, s.word->size());
  }
  const double rate = rep.samples.empty() ? 0.0 : static_cast<double>(found) / static_cast<double>(rep.samples.size());
  rep.aggregate = {{"success_rate", rate},
                   {"found", found},
                   {"total", rep.samples.size()},
                   {"worst_margin", finite_or_null(worst)},
                   {"longest_word", longest},
                   {"flagged_failures", flagged}};
  rep.passed = !rep.samples.empty() && found == rep.samples.size();
  rep.notes.push_back("sampled check on finitely many pairs and radii; not a proof");
  rep.notes.push_back("certificate: d_H(representations) + resolution slack < r/theta");
}

}  // namespace

VerifierReport check_hyper_minimal(const IfsSystem& sys, double theta, double r0, std::size_t n_pairs,
                                   const std::vector<double>& radii, const SearchBudget& budget,
                                   std::uint64_t seed, Strategy strategy) {
  require_theta(theta);
  for (double r : radii)
    if (!(r > 0.0) || !(r < r0)) throw DomainError("check_hyper_minimal: radii must lie in (0, r0)");
  const Stopwatch clock;
  VerifierReport rep;
  rep.condition = "hyper_minimal";
  rep.seed = seed;
  rep.parameters = {{"system", sys.name()}, {"theta", theta},   {"r0", r0},
                    {"pairs", n_pairs},     {"radii", radii},   {"budget", budget_json(budget)},
                    {"strategy", std::string(to_string(strategy))}};
  std::size_t id = 0;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    Rng rng(derive_seed(seed, i));
    const Point x = sample_uniform(sys.manifold(), rng);
    const Point y = sample_uniform(sys.manifold(), rng);
    for (double r : radii) {
      const WitnessResult w = find_witness(sys, x, y, r, theta, budget, strategy, derive_seed(seed ^ 0x5745ULL, id));
      rep.samples.push_back(witness_row(id++, x, y, r, w));
    }
  }
  aggregate_witnesses(rep);
  rep.runtime_seconds = clock.seconds();
  return rep;
}

VerifierReport check_local_hyper_minimal(const IfsSystem& sys, const Ball& region, const PointSampler& inner,
                                         double theta, double r0, std::size_t n_pairs,
                                         const std::vector<double>& radii, const SearchBudget& budget,
                                         std::uint64_t seed, Strategy strategy) {
  require_theta(theta);
  if (region.manifold() != sys.manifold()) throw DomainError("check_local_hyper_minimal: region on another manifold");
  for (double r : radii)
    if (!(r > 0.0) || !(r < r0)) throw DomainError("check_local_hyper_minimal: radii must lie in (0, r0)");
  const Stopwatch clock;
  VerifierReport rep;
  rep.condition = "local_hyper_minimal";
  rep.seed = seed;
  rep.parameters = {{"system", sys.name()},
                    {"region_center", coords_of(region.center())},
                    {"region_radius", region.radius()},
                    {"theta", theta},
                    {"r0", r0},
                    {"pairs", n_pairs},
                    {"radii", radii},
                    {"budget", budget_json(budget)},
                    {"strategy", std::string(to_string(strategy))},
                    {"inner_sampler", inner ? "custom" : "uniform_in_region"}};
  std::size_t id = 0;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    Rng rng(derive_seed(seed, i));
    const Point x = inner ? inner(rng) : sample_in_ball(region.center(), region.radius(), rng);
    if (dist(x, region.center()) > region.radius())
      throw InputError("check_local_hyper_minimal: inner sampler produced a point outside the region");
    const Point y = sample_in_ball(region.center(), region.radius(), rng);
    for (double r : radii) {
      const WitnessResult w = find_witness(sys, x, y, r, theta, budget, strategy, derive_seed(seed ^ 0x5745ULL, id));
      rep.samples.push_back(witness_row(id++, x, y, r, w));
    }
  }
  aggregate_witnesses(rep);
  rep.runtime_seconds = clock.seconds();
  return rep;
}

json DensityReport::to_json() const {
  return {{"dense", dense}, {"steps_used", steps_used}, {"cells_hit", cells_hit}, {"cells_total", cells_total}};
}

DensityReport check_minimality_density(const IfsSystem& sys, const Point& x, double epsilon,
                                       std::uint64_t max_points, bool with_inverses) {
  if (!(epsilon > 0.0)) throw InputError("check_minimality_density: epsilon must be positive");
  if (x.manifold() != sys.manifold()) throw DomainError("check_minimality_density: point on another manifold");
  const CellGrid grid(sys.manifold(), epsilon);
  const CellGrid fine(sys.manifold(), epsilon / 4.0);
  std::vector<bool> hit(grid.size(), false);
  std::vector<bool> kept(fine.size(), false);
  const std::vector<Letter> letters = alphabet(sys, with_inverses);

  DensityReport rep;
  rep.cells_total = grid.size();
  std::deque<Point> queue{x};
  kept[fine.cell_of(x)] = true;
  hit[grid.cell_of(x)] = true;
  rep.cells_hit = 1;
  while (!queue.empty() && rep.cells_hit < rep.cells_total && rep.steps_used < max_points) {
    const Point p = queue.front();
    queue.pop_front();
    for (const Letter& l : letters) {
      if (rep.steps_used >= max_points) break;
      const Point q = sys.apply(l, p);
      ++rep.steps_used;
      const std::size_t c = grid.cell_of(q);
      if (!hit[c]) {
        hit[c] = true;
        ++rep.cells_hit;
      }
      const std::size_t f = fine.cell_of(q);
      if (!kept[f]) {
        kept[f] = true;
        queue.push_back(q);
      }
    }
  }
  rep.dense = rep.cells_hit == rep.cells_total;
  return rep;
}

MeasureEstimate density_ratio(const SetMembership& in_set, const Point& p, double kappa, std::size_t samples,
                              std::uint64_t seed) {
  if (samples == 0) throw InputError("density_ratio: samples must be positive");
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i)
    if (in_set(sample_in_ball(p, kappa, rng))) ++hits;
  const double f = static_cast<double>(hits) / static_cast<double>(samples);
  return {f, std::sqrt(f * (1.0 - f) / static_cast<double>(samples)), false};
}

std::vector<double> invariant_hull_coverage(const IfsSystem& sys, const Ball& u0, double epsilon,
                                            std::size_t max_depth) {
  if (u0.manifold() != sys.manifold()) throw DomainError("invariant_hull_coverage: region on another manifold");
  const CellGrid grid(sys.manifold(), epsilon);
  const CellGrid fine(sys.manifold(), epsilon / 4.0);
  if (fine.size() > (std::size_t{1} << 26)) throw BudgetError("invariant_hull_coverage: grid too fine");
  // One representative per fine cell: a dropped point stays within a fine
  // cell of one whose images are followed.
  std::vector<bool> kept(fine.size(), false);
  std::vector<bool> hit(grid.size(), false);
  double covered = 0.0;
  const auto visit = [&](const Point& p, std::vector<Point>& out) {
    const std::size_t c = grid.cell_of(p);
    if (!hit[c]) {
      hit[c] = true;
      covered += grid.cell_measure(c);
    }
    const std::size_t f = fine.cell_of(p);
    if (!kept[f]) {
      kept[f] = true;
      out.push_back(p);
    }
  };

  std::vector<Point> frontier;
  for (const Point& p : net(u0.center(), u0.radius(), std::min(epsilon, u0.radius()) / 4.0)) visit(p, frontier);
  std::vector<double> coverage{std::min(1.0, covered)};
  const std::vector<Letter> letters = alphabet(sys, false);
  for (std::size_t depth = 1; depth <= max_depth && !frontier.empty() && coverage.back() < 1.0; ++depth) {
    std::vector<Point> next;
    for (const Point& p : frontier)
      for (const Letter& l : letters) visit(sys.apply(l, p), next);
    frontier = std::move(next);
    if (frontier.empty()) break;
    coverage.push_back(std::min(1.0, covered));
  }
  return coverage;
}

}  // namespace hyperifs
