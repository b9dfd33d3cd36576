// Python bindings. Points cross the boundary as (manifold, coords) and
// reports as JSON strings decoded on the Python side.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hyperifs/cli.hpp"
#include "hyperifs/criteria.hpp"
#include "hyperifs/errors.hpp"
#include "hyperifs/hyper.hpp"
#include "hyperifs/zoo.hpp"

namespace py = pybind11;
using namespace hyperifs;

namespace {

std::vector<double> coords(const Point& p) { return {p.coords().begin(), p.coords().end()}; }

Point point(Manifold m, const std::vector<double>& c) { return Point::from_coords(m, c); }

Word word(const std::vector<int>& codes) { return Word::from_signed(codes); }

py::dict witness_dict(const WitnessResult& w) {
  py::dict d;
  d["found"] = w.found;
  d["word"] = w.word ? py::cast(w.word->to_signed()) : py::none();
  d["certified_distance"] = w.certified_distance;
  d["margin"] = w.margin;
  d["exact"] = w.exact;
  d["strategy"] = w.strategy;
  d["note"] = w.note;
  d["nodes_expanded"] = w.stats.nodes_expanded;
  return d;
}

SearchBudget budget_from(std::uint64_t max_nodes, std::size_t max_length, bool use_inverses) {
  SearchBudget b;
  b.max_nodes = max_nodes;
  b.max_length = max_length;
  b.use_inverses = use_inverses;
  return b;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Iterated function systems on S1, T2 and S2: hyperspace witnesses and verifiers";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ConstructionError>(m, "ConstructionError", PyExc_RuntimeError);
  py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);
  py::register_exception<CapabilityError>(m, "CapabilityError", PyExc_RuntimeError);

  py::enum_<Manifold>(m, "Manifold")
      .value("Circle", Manifold::Circle)
      .value("Torus2", Manifold::Torus2)
      .value("Sphere2", Manifold::Sphere2);
  m.def("manifold", [](const std::string& s) { return manifold_from_string(s); });

  m.def("dist", [](Manifold man, const std::vector<double>& p, const std::vector<double>& q) {
    return dist(point(man, p), point(man, q));
  });
  m.def("ball_measure", &ball_measure, py::arg("manifold"), py::arg("r"));
  m.def(
      "ball_intersection_measure",
      [](Manifold man, const std::vector<double>& x, double rx, const std::vector<double>& y, double ry) {
        return ball_intersection_measure(point(man, x), rx, point(man, y), ry).value;
      },
      py::arg("manifold"), py::arg("x"), py::arg("rx"), py::arg("y"), py::arg("ry"));
  m.def(
      "net",
      [](Manifold man, const std::vector<double>& x, double r, double delta) {
        std::vector<std::vector<double>> out;
        for (const auto& p : net(point(man, x), r, delta)) out.push_back(coords(p));
        return out;
      },
      py::arg("manifold"), py::arg("x"), py::arg("r"), py::arg("delta"));
  m.def(
      "hausdorff_points",
      [](Manifold man, const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
        std::vector<Point> pa, pb;
        for (const auto& c : a) pa.push_back(point(man, c));
        for (const auto& c : b) pb.push_back(point(man, c));
        return hausdorff_points(pa, pb);
      },
      py::arg("manifold"), py::arg("a"), py::arg("b"));

  py::class_<IfsSystem>(m, "IfsSystem")
      .def_property_readonly("manifold", &IfsSystem::manifold)
      .def_property_readonly("name", &IfsSystem::name)
      .def_property_readonly("size", &IfsSystem::size)
      .def("apply_word",
           [](const IfsSystem& s, const std::vector<int>& w, const std::vector<double>& p) {
             return coords(apply_word(s, word(w), point(s.manifold(), p)));
           })
      .def("fiberwise_orbit", [](const IfsSystem& s, const std::vector<int>& time_ordered, const std::vector<double>& x) {
        Sequence seq = word(time_ordered).letters();
        std::vector<std::vector<double>> out;
        for (const auto& p : fiberwise_orbit(s, seq, point(s.manifold(), x))) out.push_back(coords(p));
        return out;
      });

  m.def("circle_system", [](double blend_strength) {
    CircleExampleConfig cfg;
    cfg.blend_strength = blend_strength;
    return build_circle_system(cfg);
  }, py::arg("blend_strength") = 0.5);
  m.def("torus_system", [](std::array<double, 4> a, double rho) {
    TorusExampleConfig cfg;
    cfg.a = a;
    cfg.rho = rho;
    return build_torus_system(cfg);
  }, py::arg("a") = std::array<double, 4>{1.0, 0.2, 0.0, 1.0}, py::arg("rho") = 0.05);
  m.def("sphere_system", []() { return build_sphere_system(); });
  m.def("rotation_system", &rotation_system, py::arg("beta"));
  m.def("translation_system", &translation_system, py::arg("alpha1"), py::arg("alpha2"));

  m.def("compute_k", &compute_k, py::arg("beta"), py::arg("gamma"));
  m.def("lebesgue_number", [](std::size_t grid) { return lebesgue_number(CircleExampleConfig{}, grid); },
        py::arg("grid") = 100000);
  m.def(
      "omega_construction",
      [](double x, std::size_t n) {
        const auto om = omega_construction(CircleExampleConfig{}, x, n);
        std::vector<int> symbols;
        for (const Letter& l : om.symbols) symbols.push_back(static_cast<int>(l.generator) + 1);
        py::dict d;
        d["symbols"] = symbols;
        d["orbit"] = om.orbit;
        d["frequency_of_first"] = om.frequency_of_first();
        d["pure_rotation"] = om.pure_rotation;
        return d;
      },
      py::arg("x"), py::arg("n"));
  m.def(
      "circle_witness",
      [](double x, double y, double r, double theta) {
        const CircleExampleConfig cfg;
        return witness_dict(circle_witness(cfg, build_circle_system(cfg), Point::circle(x), Point::circle(y), r, theta));
      },
      py::arg("x"), py::arg("y"), py::arg("r"), py::arg("theta") = 6.0);
  m.def(
      "torus_return_index",
      [](const std::vector<double>& z, const std::vector<double>& y, double r, double theta, std::int64_t max_n) {
        const TorusExampleConfig cfg;
        const auto ri = torus_return_index(build_torus_system(cfg), cfg, point(Manifold::Torus2, z),
                                           point(Manifold::Torus2, y), r, theta, max_n);
        py::dict d;
        d["found"] = ri.found;
        d["n"] = ri.n;
        d["certified_distance"] = ri.certified_distance;
        d["margin"] = ri.margin;
        d["best_predicted"] = ri.best_predicted;
        d["affine"] = ri.affine;
        return d;
      },
      py::arg("z"), py::arg("y"), py::arg("r") = 0.01, py::arg("theta") = 6.0, py::arg("max_n") = 100000);
  m.def(
      "word_rotation_axis",
      [](const std::vector<int>& w) {
        const auto ax = word_rotation_axis(build_sphere_system(), word(w));
        py::dict d;
        d["axis"] = ax.axis;
        d["angle"] = ax.angle;
        d["fixed_points"] = std::vector<std::vector<double>>{coords(ax.fixed_points[0]), coords(ax.fixed_points[1])};
        d["residual"] = ax.residual;
        d["reliable"] = ax.reliable;
        return d;
      },
      py::arg("word"));

  m.def(
      "find_witness",
      [](const IfsSystem& s, const std::vector<double>& x, const std::vector<double>& y, double r, double theta,
         const std::string& strategy, std::uint64_t max_nodes, std::size_t max_length, bool use_inverses,
         std::uint64_t seed) {
        return witness_dict(find_witness(s, point(s.manifold(), x), point(s.manifold(), y), r, theta,
                                         budget_from(max_nodes, max_length, use_inverses),
                                         strategy_from_string(strategy), seed));
      },
      py::arg("system"), py::arg("x"), py::arg("y"), py::arg("r"), py::arg("theta") = 6.0,
      py::arg("strategy") = "auto", py::arg("max_nodes") = 200000, py::arg("max_length") = 10000,
      py::arg("use_inverses") = false, py::arg("seed") = 0);
  m.def(
      "check_overlap_number",
      [](Manifold man, double theta, double t, double ell, const std::vector<double>& radii, std::size_t samples,
         std::uint64_t seed, std::size_t mc) {
        return check_overlap_number(man, {theta, t, ell}, radii, samples, seed, mc).to_json().dump();
      },
      py::arg("manifold"), py::arg("theta") = 6.0, py::arg("t") = 0.1, py::arg("ell") = 0.8,
      py::arg("radii") = std::vector<double>{0.05, 0.1}, py::arg("samples") = 100, py::arg("seed") = 0,
      py::arg("monte_carlo_samples") = 0);
  m.def(
      "check_hyper_minimal",
      [](const IfsSystem& s, double theta, double r0, std::size_t pairs, const std::vector<double>& radii,
         std::uint64_t seed, const std::string& strategy, std::uint64_t max_nodes, std::size_t max_length) {
        return check_hyper_minimal(s, theta, r0, pairs, radii, budget_from(max_nodes, max_length, false), seed,
                                   strategy_from_string(strategy))
            .to_json()
            .dump();
      },
      py::arg("system"), py::arg("theta") = 6.0, py::arg("r0") = 0.5, py::arg("pairs") = 10,
      py::arg("radii") = std::vector<double>{0.02}, py::arg("seed") = 0, py::arg("strategy") = "auto",
      py::arg("max_nodes") = 200000, py::arg("max_length") = 10000);
  m.def(
      "check_minimality_density",
      [](const IfsSystem& s, const std::vector<double>& x, double eps, std::uint64_t max_points) {
        return check_minimality_density(s, point(s.manifold(), x), eps, max_points).to_json().dump();
      },
      py::arg("system"), py::arg("x"), py::arg("epsilon"), py::arg("max_points") = 1000000);
  m.def(
      "invariant_hull_coverage",
      [](const IfsSystem& s, const std::vector<double>& center, double radius, double eps, std::size_t depth) {
        return invariant_hull_coverage(s, Ball(point(s.manifold(), center), radius), eps, depth);
      },
      py::arg("system"), py::arg("center"), py::arg("radius"), py::arg("epsilon"), py::arg("max_depth") = 100000);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line front end in process; returns (exit_code, stdout, stderr).");
}
