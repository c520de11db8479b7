#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "apx/analysis.hpp"
#include "apx/cli.hpp"
#include "apx/errors.hpp"
#include "apx/generators.hpp"
#include "apx/heisenberg.hpp"
#include "apx/meyer.hpp"
#include "apx/pointset_io.hpp"
#include "apx/spec_file.hpp"
#include "apx/verify.hpp"

namespace py = pybind11;
using namespace apx;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<double> flatten(const RowMatrix& m) { return {m.data(), m.data() + m.size()}; }

RowMatrix as_matrix(std::span<const double> coords, int dim) {
  const auto n = static_cast<Eigen::Index>(coords.size() / static_cast<std::size_t>(dim));
  return Eigen::Map<const RowMatrix>(coords.data(), n, dim);
}

Subspace subspace_of(const std::vector<Vector>& gens, int dim) {
  if (gens.empty()) return Subspace::zero(dim);
  return Subspace::span(gens, dim);
}

py::dict translation_dict(const TranslationSet& F) {
  py::dict d;
  RowMatrix m(static_cast<Eigen::Index>(F.size()), F.dim());
  for (std::size_t i = 0; i < F.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = F.translates()[i].transpose();
  d["F"] = m;
  d["K"] = F.K();
  return d;
}

HeisPoint heis_point(const Vector& v, double z) { return {v, z}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Approximate subgroups of R^d and the Heisenberg group";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NotApproximateSubgroup>(m, "NotApproximateSubgroup", PyExc_RuntimeError);
  py::register_exception<WindowTooSmall>(m, "WindowTooSmall", PyExc_RuntimeError);
  py::register_exception<DegenerateForm>(m, "DegenerateForm", PyExc_RuntimeError);

  py::class_<PointSet>(m, "PointSet")
      .def(py::init([](const RowMatrix& pts, double radius, double margin, std::string label) {
             return PointSet(static_cast<int>(pts.cols()), flatten(pts), Window(radius, margin), std::move(label));
           }),
           py::arg("points"), py::arg("radius"), py::arg("margin") = 0.0, py::arg("label") = "")
      .def_property_readonly("dim", &PointSet::dim)
      .def_property_readonly("radius", [](const PointSet& p) { return p.window().radius(); })
      .def_property_readonly("margin", [](const PointSet& p) { return p.window().margin(); })
      .def_property_readonly("label", &PointSet::label)
      .def("__len__", &PointSet::size)
      .def("points", [](const PointSet& p) { return as_matrix(p.coords(), p.dim()); })
      .def("restrict", [](const PointSet& p, double r, double mg) { return p.restrict(Window(r, mg)); },
           py::arg("radius"), py::arg("margin") = 0.0)
      .def("to_text", [](const PointSet& p) {
        std::ostringstream o;
        write_points(o, p);
        return o.str();
      })
      .def_static("from_text", [](const std::string& text) {
        std::istringstream in(text);
        return read_points(in);
      });

  // generators
  m.def("gen_lattice",
        [](const Matrix& basis, double radius, double margin) { return gen_lattice({basis}, Window(radius, margin)); },
        py::arg("basis"), py::arg("radius"), py::arg("margin") = 0.0,
        "Lattice points of norm <= radius; basis vectors are the matrix columns.");
  m.def("gen_strip",
        [](const Matrix& basis, const std::vector<Vector>& directions, double width, double radius, double margin) {
          return gen_strip({basis}, subspace_of(directions, static_cast<int>(basis.rows())), width,
                           Window(radius, margin));
        },
        py::arg("basis"), py::arg("directions"), py::arg("width"), py::arg("radius"), py::arg("margin") = 0.0);
  m.def("gen_cut_project",
        [](const Matrix& basis, const std::vector<Vector>& physical, double internal_radius, double radius,
           double margin) {
          CutProjectSpec s{{basis}, subspace_of(physical, static_cast<int>(basis.rows())), internal_radius};
          return gen_cut_project(s, Window(radius, margin));
        },
        py::arg("basis"), py::arg("physical"), py::arg("internal_radius"), py::arg("radius"), py::arg("margin") = 0.0);
  m.def("gen_meyer_extension",
        [](const PointSet& ps, const std::vector<Vector>& L, double R, double radius, double margin) {
          return gen_meyer_extension(ps, subspace_of(L, ps.dim()), R, Window(radius, margin));
        },
        py::arg("ps"), py::arg("L"), py::arg("R"), py::arg("radius"), py::arg("margin") = 0.0);
  m.def("gen_perturbed", &gen_perturbed, py::arg("ps"), py::arg("amplitude"), py::arg("seed"));

  // verification
  m.def("min_pairwise_gap", &min_pairwise_gap);
  m.def("find_translation_set",
        [](const PointSet& ps, double tol) {
          TranslationOptions o;
          o.tol = tol;
          return translation_dict(find_translation_set(ps, o));
        },
        py::arg("ps"), py::arg("tol") = Tolerances{}.geom);
  m.def("check_inclusion",
        [](const PointSet& ps, const std::vector<Vector>& F, double tol) {
          const auto r = check_inclusion(ps, TranslationSet(ps.dim(), F), tol);
          return py::make_tuple(r.passed, r.failures);
        },
        py::arg("ps"), py::arg("F"), py::arg("tol") = Tolerances{}.geom);
  m.def("thickening_radius",
        [](const PointSet& ps, const std::vector<Vector>& L) { return thickening_radius(ps, subspace_of(L, ps.dim())); });

  m.def("analyze", [](const PointSet& ps) {
    const Analysis a = analyze(ps);
    py::dict d;
    d["passed"] = a.passed;
    d["K"] = a.K;
    d["F_size"] = a.F ? a.F->size() : 0;
    d["L"] = a.L ? py::cast(Matrix(a.L->basis())) : py::none();
    d["thickening"] = a.thickening;
    d["R"] = a.R;
    d["R_prime"] = a.certification ? py::cast(a.certification->R_prime) : py::none();
    d["notes"] = a.notes;
    return d;
  });

  m.def("check_meyer", [](const PointSet& ps) {
    const MeyerReport r = check_meyer(ps);
    py::dict d;
    d["verdict"] = r.verdict;
    d["discrete"] = r.discrete;
    d["gap"] = r.gap;
    d["relatively_dense"] = r.relatively_dense;
    d["radius"] = r.radius;
    d["approx_subgroup"] = r.approx_subgroup;
    return d;
  });
  m.def("restrict_to_strip", [](const PointSet& ps, const std::vector<Vector>& L, double R) {
    return restrict_to_strip(ps, subspace_of(L, ps.dim()), R, false).ps;
  });

  // Heisenberg group: points are (v, z) pairs
  m.def("heis_mul",
        [](const Vector& v1, double z1, const Vector& v2, double z2) {
          const auto form = SymplecticForm::standard(static_cast<int>(v1.size() / 2));
          const auto p = heis_mul(heis_point(v1, z1), heis_point(v2, z2), form);
          return py::make_tuple(p.v, p.z);
        });
  m.def("heis_commutator",
        [](const Vector& v1, double z1, const Vector& v2, double z2) {
          const auto form = SymplecticForm::standard(static_cast<int>(v1.size() / 2));
          const auto p = heis_commutator(heis_point(v1, z1), heis_point(v2, z2), form);
          return py::make_tuple(p.v, p.z);
        });
  m.def("heis_dist", [](const Vector& v1, double z1, const Vector& v2, double z2) {
    const auto form = SymplecticForm::standard(static_cast<int>(v1.size() / 2));
    return heis_dist(heis_point(v1, z1), heis_point(v2, z2), form);
  });

  py::class_<HeisPointSet>(m, "HeisPointSet")
      .def_property_readonly("n", &HeisPointSet::n)
      .def_property_readonly("radius", [](const HeisPointSet& p) { return p.window().radius(); })
      .def_property_readonly("label", &HeisPointSet::label)
      .def("__len__", &HeisPointSet::size)
      .def("points", [](const HeisPointSet& p) { return as_matrix(p.coords(), p.stride()); });
  m.def("gen_heis_line", [](double radius, double margin) { return gen_heis_line(Window(radius, margin)); },
        py::arg("radius"), py::arg("margin") = 0.0);
  m.def("gen_heis_coset_lattice",
        [](double radius, double margin) { return gen_heis_coset_lattice(Window(radius, margin)); },
        py::arg("radius"), py::arg("margin") = 0.0);
  m.def("pi_V", [](const HeisPointSet& ps) { return pi_V(ps); });
  m.def("check_center_density", [](const HeisPointSet& ps, double R) {
    const auto c = check_center_density(ps, R);
    return py::make_tuple(c.passed, c.max_gap);
  });
  m.def("check_projection_discreteness", [](const HeisPointSet& ps) {
    const auto p = check_projection_discreteness(ps);
    return py::make_tuple(p.passed, p.gap, p.gap_half);
  });
  m.def("analyze_heis", [](const HeisPointSet& ps) {
    const HeisAnalysis a = analyze_heis(ps);
    py::dict d;
    d["route"] = to_string(a.route);
    d["passed"] = a.passed;
    d["projection_discrete"] = a.projection.passed;
    d["approximate_lattice"] = a.approximate_lattice;
    return d;
  });

  // presets and the CLI pipeline
  m.def("preset_names", &preset_names);
  m.def(
      "preset",
      [](const std::string& name, std::optional<double> window, std::optional<double> margin, std::uint64_t seed)
          -> py::object {
        const auto spec = preset_spec(name);
        const auto inst = build_instance(spec, spec_window(spec, window, margin), seed);
        if (inst.heis) return py::cast(*inst.heis);
        return py::cast(*inst.flat);
      },
      py::arg("name"), py::arg("window") = py::none(), py::arg("margin") = py::none(), py::arg("seed") = 1);
  m.def(
      "run",
      [](const std::string& command, std::optional<std::string> preset, std::optional<std::string> spec,
         std::optional<std::string> points, std::optional<double> window, std::optional<double> margin,
         std::optional<int> dim, std::uint64_t seed, double tol_geom, double tol_exact,
         std::optional<std::string> out, std::optional<std::string> json, std::optional<std::string> svg,
         std::optional<std::string> emit_chains) {
        RunConfig c;
        c.command = command;
        c.preset = std::move(preset);
        c.spec = std::move(spec);
        c.points = std::move(points);
        c.window = window;
        c.margin = margin;
        c.dim = dim;
        c.seed = seed;
        c.tol = {tol_exact, tol_geom};
        c.out = std::move(out);
        c.json = std::move(json);
        c.svg = std::move(svg);
        c.emit_chains = std::move(emit_chains);
        RunResult r;
        {
          py::gil_scoped_release release;
          r = execute(c);
        }
        py::dict d;
        d["exit_code"] = r.exit_code;
        d["error"] = r.error;
        d["summary"] = r.report.summary();
        d["text"] = r.report.text();
        d["json"] = r.report.json();
        return d;
      },
      py::arg("command"), py::kw_only(), py::arg("preset") = py::none(), py::arg("spec") = py::none(),
      py::arg("points") = py::none(), py::arg("window") = py::none(), py::arg("margin") = py::none(),
      py::arg("dim") = py::none(), py::arg("seed") = 1, py::arg("tol_geom") = Tolerances{}.geom,
      py::arg("tol_exact") = Tolerances{}.exact, py::arg("out") = py::none(), py::arg("json") = py::none(),
      py::arg("svg") = py::none(), py::arg("emit_chains") = py::none(),
      "Runs one CLI command; returns exit_code, error, summary, text and json.");
}
