#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "manipyr/apps.hpp"
#include "manipyr/error.hpp"
#include "manipyr/io.hpp"

namespace py = pybind11;
using namespace manipyr;

namespace {

py::dict laurent_dict(const LaurentPoly& p) {
  py::dict d;
  d["min_index"] = p.min_index();
  d["coeffs"] = std::vector<double>(p.coeffs().begin(), p.coeffs().end());
  return d;
}

// Largest J with 2^J dividing n - 1; the dyadic depth available to a curve
// of n samples when no scale is given.
int inferred_scale(std::size_t n) {
  if (n < 2) return 0;
  int J = 0;
  while (J < 30 && (n - 1) % (std::size_t{1} << (J + 1)) == 0) ++J;
  return J;
}

// Curves travel as (n, d), (n, 3, 3) or (n, 4, 4) arrays.
py::array_t<double> curve_to_array(const ManifoldSequence& c) {
  const std::size_t n = c.size();
  if (c.kind() == ManifoldKind::Euclidean) {
    const std::size_t d = n ? static_cast<std::size_t>(c.points[0].x.size()) : 0;
    py::array_t<double> out({n, d});
    auto a = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < d; ++k) a(i, k) = c.points[i].x[static_cast<Eigen::Index>(k)];
    return out;
  }
  const std::size_t m = c.kind() == ManifoldKind::SO3 ? 3 : 4;
  py::array_t<double> out({n, m, m});
  auto a = out.mutable_unchecked<3>();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::MatrixXd M = c.points[i].matrix();
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t k = 0; k < m; ++k) a(i, r, k) = M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k));
  }
  return out;
}

ManifoldSequence curve_from_array(const std::string& manifold, py::array_t<double, py::array::c_style | py::array::forcecast> arr,
                                  int scale) {
  const ManifoldKind kind = manifold_kind_from_string(manifold);
  ManifoldSequence c;
  const auto buf = arr.request();
  const std::size_t n = buf.ndim > 0 ? static_cast<std::size_t>(buf.shape[0]) : 0;
  c.scale = scale >= 0 ? scale : inferred_scale(n);
  const std::size_t block = n ? static_cast<std::size_t>(buf.size) / n : 0;
  const std::size_t want = kind == ManifoldKind::SO3 ? 9 : kind == ManifoldKind::SE3 ? 16 : block;
  if (buf.ndim < 2 || block != want)
    throw ValidationError("curve array has the wrong shape for " + manifold);
  const double* data = static_cast<const double*>(buf.ptr);
  for (std::size_t i = 0; i < n; ++i) {
    try {
      c.points.push_back(ManifoldPoint::from_coords(kind, std::span<const double>(data + i * block, block)));
    } catch (const ValidationError& e) {
      throw InvalidPoint("curve[" + std::to_string(i) + "]: " + e.what());
    }
  }
  validate(c);
  return c;
}

ExperimentConfig config_from_kwargs(const py::kwargs& kw) {
  nlohmann::json j = io::to_json(ExperimentConfig{});
  for (const auto& item : kw) {
    const std::string key = py::str(item.first);
    const py::handle v = item.second;
    if (py::isinstance<py::bool_>(v)) throw ValidationError("config: field '" + key + "' must be numeric or a string");
    if (py::isinstance<py::int_>(v)) {
      const long long i = v.cast<long long>();
      if (i >= 0) j[key] = static_cast<std::uint64_t>(i);
      else j[key] = i;
    }
    else if (py::isinstance<py::float_>(v)) j[key] = v.cast<double>();
    else if (py::isinstance<py::str>(v)) j[key] = v.cast<std::string>();
    else if (py::isinstance<py::dict>(v)) j[key] = nlohmann::json::parse(py::str(py::module_::import("json").attr("dumps")(v)).cast<std::string>());
    else throw ValidationError("config: unsupported value for field '" + key + "'");
  }
  return io::config_from_json(j);
}

// A reversed pair plus the solver settings of the config that built it.
struct BoundPair : ReversedPair {
  MeanOptions mean;
};

py::object json_to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_manipyr, m) {
  m.doc() = "Pyramid transforms with pseudo-reversed decimation on scalars, SO(3) and SE(3)";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  (void)base;
  (void)validation;
  (void)numerical;

  py::class_<ExperimentConfig>(m, "Config")
      .def(py::init([](const py::kwargs& kw) { return config_from_kwargs(kw); }))
      .def_readonly("mask", &ExperimentConfig::mask)
      .def_readonly("xi", &ExperimentConfig::xi)
      .def_readonly("mode", &ExperimentConfig::mode)
      .def_readonly("layers", &ExperimentConfig::layers)
      .def_readonly("seed", &ExperimentConfig::seed)
      .def("to_dict", [](const ExperimentConfig& c) { return json_to_py(io::to_json(c)); });

  py::class_<BoundPair>(m, "Pair")
      .def(py::init([](const ExperimentConfig& cfg) { return BoundPair{make_pair(cfg), cfg.mean_options()}; }),
           py::arg("config") = ExperimentConfig{})
      .def_property_readonly("name", [](const BoundPair& p) { return p.mask.name; })
      .def_property_readonly("xi", [](const BoundPair& p) { return p.kernel.xi; })
      .def_property_readonly("alpha", [](const BoundPair& p) { return laurent_dict(p.mask.alpha); })
      .def_property_readonly("approx_alpha", [](const BoundPair& p) { return laurent_dict(p.approx.alpha); })
      .def_property_readonly("gamma", [](const BoundPair& p) { return laurent_dict(p.kernel.gamma); })
      .def_property_readonly("kappa", [](const BoundPair& p) { return p.reverse.kappa_after; })
      .def_property_readonly("kappa_before", [](const BoundPair& p) { return p.reverse.kappa_before; })
      .def_property_readonly("residual", [](const BoundPair& p) { return p.kernel.residual; })
      .def_property_readonly("mask_perturbation", [](const BoundPair& p) { return (p.mask.alpha - p.approx.alpha).l1_norm(); })
      .def(
          "analyze",
          [](const BoundPair& p, std::vector<double> values, int layers, int scale) {
            if (scale < 0) scale = inferred_scale(values.size());
            const auto pyr = analyze(p.mask, p.kernel, RealSequence{std::move(values), scale, 0.0}, layers);
            std::vector<std::vector<double>> details;
            for (const auto& d : pyr.details) details.push_back(d.values);
            return py::make_tuple(pyr.coarse.values, details);
          },
          py::arg("values"), py::arg("layers"), py::arg("scale") = -1,
          "Returns (coarse, details) with details ordered coarse to fine.")
      .def(
          "synthesize",
          [](const BoundPair& p, std::vector<double> coarse, const std::vector<std::vector<double>>& details) {
            LinearPyramid pyr;
            pyr.coarse = RealSequence{std::move(coarse), 0, 0.0};
            for (const auto& d : details) pyr.details.push_back(RealSequence{d, 0, 0.0});
            pyr.mask_name = p.mask.name;
            return synthesize(p.mask, pyr).values;
          },
          py::arg("coarse"), py::arg("details"))
      .def(
          "zero_even_error",
          [](const BoundPair& p, std::vector<double> values, int layers) {
            const int scale = inferred_scale(values.size());
            return zero_even_error(p, RealSequence{std::move(values), scale, 0.0}, layers);
          },
          py::arg("values"), py::arg("layers"))
      .def(
          "m_roundtrip",
          [](const BoundPair& p, const std::string& manifold, py::array_t<double> curve, int layers) {
            const auto c = curve_from_array(manifold, curve, -1);
            const auto pyr = m_analyze(p.mask, p.kernel, c, layers, p.mean);
            const auto rec = m_synthesize(p.mask, pyr);
            std::vector<double> dist(c.size());
            for (std::size_t i = 0; i < c.size(); ++i) dist[i] = distance(c.points[i], rec.points[i]);
            return py::make_tuple(curve_to_array(rec), dist);
          },
          py::arg("manifold"), py::arg("curve"), py::arg("layers"),
          "Analyze and resynthesize a curve; returns (reconstruction, per-index geodesic error).")
      .def(
          "compress",
          [](const BoundPair& p, const std::string& manifold, py::array_t<double> curve, int layers, double q) {
            const auto c = curve_from_array(manifold, curve, -1);
            const auto res = compress(p.mask, m_analyze(p.mask, p.kernel, c, layers, p.mean), q, &c);
            return py::make_tuple(curve_to_array(res.reconstruction), json_to_py(io::to_json(res.report)));
          },
          py::arg("manifold"), py::arg("curve"), py::arg("layers"), py::arg("q"));

  m.def("kappa", [](const std::string& mask, double xi, const std::string& mode) {
    return pseudo_reverse_symbol(mask_by_name(mask).even_symbol(), xi, displace_mode_from_string(mode)).kappa_after;
  }, py::arg("mask"), py::arg("xi"), py::arg("mode") = "on_circle",
        "Condition number of the pseudo-reversed even symbol.");
  m.def("gen_morlet", [](int J) { return gen_morlet(J).values; }, py::arg("J") = 6);
  m.def("add_noise", [](std::vector<double> values, double frac, std::uint64_t seed) {
    return add_noise(RealSequence{std::move(values), 0, 0.0}, frac, seed).values;
  }, py::arg("values"), py::arg("frac"), py::arg("seed"));
  m.def("gen_so3_curve", [](std::uint64_t seed) { return curve_to_array(gen_so3_curve(seed)); }, py::arg("seed") = 1);
  m.def("gen_se3_curve", [](std::uint64_t seed) { return curve_to_array(wrap_on_cone(gen_so3_curve(seed))); },
        py::arg("seed") = 1);
  m.def("distance", [](const std::string& manifold, py::array_t<double> a, py::array_t<double> b) {
    const auto c = curve_from_array(manifold, a, -1);
    const auto d = curve_from_array(manifold, b, -1);
    if (c.size() != d.size()) throw LengthMismatch("distance: curves differ in length");
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = distance(c.points[i], d.points[i]);
    return out;
  }, py::arg("manifold"), py::arg("a"), py::arg("b"), "Per-index geodesic distances between two curves.");
  m.def("run_table", [](int id, const ExperimentConfig& cfg) { return run_table(id, cfg); }, py::arg("id"),
        py::arg("config") = ExperimentConfig{}, "CSV text of one of the reproduced tables.");
}
