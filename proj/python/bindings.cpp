#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/stl.h>

#include <sstream>

#include "geodeq/cli.hpp"
#include "geodeq/glue.hpp"
#include "geodeq/scene.hpp"
#include "geodeq/verify.hpp"

namespace py = pybind11;
using namespace geodeq;

namespace {

using Rows = std::vector<std::vector<double>>;

Rows to_rows(const RMatrix& m) {
  Rows r(m.dim(), std::vector<double>(m.dim()));
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) r[i][j] = m(i, j);
  return r;
}

RMatrix from_rows(const Rows& r) {
  RMatrix m(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i].size() != r.size()) throw SpecError("matrix must be square");
    for (std::size_t j = 0; j < r.size(); ++j) m(i, j) = r[i][j];
  }
  return m;
}

void check_point(const MetricPair& p, const Point& x) {
  if (x.size() != p.dim()) throw SpecError("point has " + std::to_string(x.size()) + " coordinates, expected " +
                                           std::to_string(p.dim()));
}

std::vector<Rows> tensor_rows(const Tensor3& t, std::size_t n) {
  std::vector<Rows> r(n, Rows(n, std::vector<double>(n)));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) r[k][i][j] = t(k, i, j);
  return r;
}

MetricPair pair_from_json(const std::string& text) {
  return build_pair(scene_from_json(nlohmann::json::parse(text)).construction);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Geodesically equivalent metric pairs: construction, gluing and verification.";

  auto base = py::register_exception<Error>(m, "GeodeqError", PyExc_RuntimeError);
  static const py::handle spec_error = py::register_exception<SpecError>(m, "SpecError", base.ptr()).ptr();
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<SingularError>(m, "SingularError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  py::register_exception<SpectralError>(m, "SpectralError", base.ptr());
  // nlohmann parse errors surface as SpecError too.
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const nlohmann::json::exception& e) {
      PyErr_SetString(spec_error.ptr(), e.what());
    }
  });

  py::class_<MetricPair>(m, "MetricPair")
      .def_readonly("kind", &MetricPair::kind)
      .def_property_readonly("dim", &MetricPair::dim)
      .def_property_readonly("box", [](const MetricPair& p) { return p.chart.box(); })
      .def("g", [](const MetricPair& p, const Point& x) { check_point(p, x); return to_rows(p.g.value_at(x)); })
      .def("L", [](const MetricPair& p, const Point& x) { check_point(p, x); return to_rows(p.L.value_at(x)); })
      .def("gbar", [](const MetricPair& p, const Point& x) {
        check_point(p, x);
        return to_rows(p.second_metric().value_at(x));
      })
      .def("sample", [](const MetricPair& p, std::size_t n, std::uint64_t seed) { return p.chart.sample(n, seed).points; },
           py::arg("n"), py::arg("seed") = 1)
      .def("compatibility_residual", [](const MetricPair& p, const Point& x) {
        check_point(p, x);
        return compatibility_residual(p.g, p.L, x);
      })
      .def("selfadjoint_residual", [](const MetricPair& p, const Point& x) {
        check_point(p, x);
        return selfadjoint_residual(p.g, p.L, x);
      })
      .def("nabla_L", [](const MetricPair& p, const Point& x) {
        check_point(p, x);
        return tensor_rows(nabla_L(p.g, p.L, x), p.dim());
      }, "Components [k][i][j] of the covariant derivative of L along x_k.")
      .def("nijenhuis", [](const MetricPair& p, const Point& x) {
        check_point(p, x);
        return tensor_rows(nijenhuis(p.L, x), p.dim());
      });

  m.def("pair_from_json", &pair_from_json, py::arg("text"), "Build a pair from a scene or construction in JSON.");
  m.def("load_scene", [](const std::string& path) { return build_pair(load_scene(path).construction); },
        py::arg("path"));
  m.def("glue", [](const std::vector<MetricPair>& pairs) {
    std::vector<Block> blocks;
    for (const auto& p : pairs) blocks.push_back(make_block(p));
    return glue(blocks).pair;
  }, py::arg("pairs"));

  m.def("verify", [](const MetricPair& p, std::size_t n_points, std::uint64_t seed) {
    VerifyOptions opt;
    opt.n_points = n_points;
    opt.seed = seed;
    py::list out;
    for (const auto& r : verify_pair(p, opt)) {
      py::dict d;
      d["check"] = r.check;
      d["attempted"] = r.attempted;
      d["accepted"] = r.accepted;
      d["max_residual"] = r.max_residual;
      d["mean_residual"] = r.mean_residual;
      d["tolerance"] = r.tolerance;
      d["pass"] = r.pass;
      d["worst_point"] = r.worst_point;
      out.append(d);
    }
    return out;
  }, py::arg("pair"), py::arg("n_points") = 100, py::arg("seed") = 1);

  m.def("geodesic", [](const MetricPair& p, const Point& p0, const Point& v0, double T, std::size_t samples) {
    check_point(p, p0);
    check_point(p, v0);
    GeodesicOptions opt;
    opt.uniform_samples = samples;
    const auto traj = integrate_geodesic(p.g, p.chart, p0, v0, T, opt);
    std::vector<double> t;
    std::vector<Point> x, v;
    for (const auto& s : traj.samples) {
      t.push_back(s.t);
      x.push_back(s.point);
      v.push_back(s.velocity);
    }
    py::dict d;
    d["t"] = t;
    d["x"] = x;
    d["v"] = v;
    d["status"] = to_string(traj.status);
    d["message"] = traj.message;
    return d;
  }, py::arg("pair"), py::arg("p0"), py::arg("v0"), py::arg("T") = 1.0, py::arg("samples") = 0);

  m.def("integral", [](const Rows& g, const Rows& L, double t, const Point& xi) {
    return integral_It(from_rows(g), from_rows(L), t, xi);
  }, py::arg("g"), py::arg("L"), py::arg("t"), py::arg("xi"), "g(adj(L - t) xi, xi)");

  m.def("split", [](const MetricPair& p, const Point& x, double tol) {
    check_point(p, x);
    const auto s = split_pointwise(p.g, p.L, x, tol);
    py::list blocks;
    for (const auto& b : s.blocks) {
      py::dict d;
      d["eigenvalue"] = b.eigenvalue;
      d["multiplicity"] = b.multiplicity;
      d["complex_pair"] = b.complex_pair;
      d["projector"] = to_rows(b.projector);
      d["h_block"] = to_rows(b.h_block);
      blocks.append(d);
    }
    py::dict d;
    d["blocks"] = blocks;
    d["h"] = to_rows(s.h);
    d["cross_term"] = s.cross_term;
    return d;
  }, py::arg("pair"), py::arg("point"), py::arg("tol") = 1e-6);

  m.def("char_poly", [](const Rows& a) { return char_poly(from_rows(a)).coeffs; }, py::arg("matrix"),
        "Coefficients of det(t I - A), constant term first.");

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::vector<const char*> argv{"geodeq"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(int(argv.size()), argv.data(), out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Run a geodeq command in-process; returns (exit code, stdout, stderr).");
}
