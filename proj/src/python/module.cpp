#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "teichlab/cli.hpp"
#include "teichlab/cocycle.hpp"
#include "teichlab/error.hpp"
#include "teichlab/holo.hpp"
#include "teichlab/mcg.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace teichlab;

namespace {

ModelPoint to_point(const py::object& o) {
  if (py::isinstance<TorusPoint>(o)) return o.cast<TorusPoint>();
  if (py::isinstance<FrickePoint>(o)) return o.cast<FrickePoint>();
  throw InvalidArgument("expected a TorusPoint or FrickePoint");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Model Teichmueller spaces of the torus and the once-punctured torus";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidCurve>(m, "InvalidCurve", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<InvalidMappingClass>(m, "InvalidMappingClass", base.ptr());
  py::register_exception<InvalidPoint>(m, "InvalidPoint", base.ptr());
  py::register_exception<NonConvergence>(m, "NonConvergence", base.ptr());
  py::register_exception<InsufficientGap>(m, "InsufficientGap", base.ptr());
  py::register_exception<BoundedOrbit>(m, "BoundedOrbit", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  py::class_<Slope>(m, "Slope")
      .def(py::init([](std::int64_t p, std::int64_t q) { return canonicalize_slope(p, q); }), "p"_a, "q"_a)
      .def_readonly("p", &Slope::p)
      .def_readonly("q", &Slope::q)
      .def("height", &Slope::height)
      .def("__eq__", [](const Slope& a, const Slope& b) { return a == b; })
      .def("__repr__", [](const Slope& s) { return "Slope" + s.str(); });

  py::class_<MappingClass>(m, "MappingClass")
      .def(py::init<std::int64_t, std::int64_t, std::int64_t, std::int64_t>(), "a"_a, "b"_a, "c"_a, "d"_a)
      .def("__mul__", &MappingClass::operator*)
      .def("inverse", &MappingClass::inverse)
      .def("trace", &MappingClass::trace)
      .def("__eq__", [](const MappingClass& a, const MappingClass& b) { return a == b; })
      .def("__repr__", &MappingClass::str);

  py::class_<TorusPoint>(m, "TorusPoint")
      .def(py::init<double, double>(), "re"_a, "im"_a)
      .def_property_readonly("re", &TorusPoint::re)
      .def_property_readonly("im", &TorusPoint::im)
      .def("__repr__", [](const TorusPoint& x) {
        std::ostringstream s;
        s << "TorusPoint(" << x.re() << ", " << x.im() << ")";
        return s.str();
      });

  py::class_<FrickePoint>(m, "FrickePoint")
      .def(py::init<double, double, double>(), "tx"_a, "ty"_a, "tz"_a)
      .def_static("from_pair", &FrickePoint::from_pair, "tx"_a, "ty"_a, "larger_root"_a = true)
      .def_property_readonly("log_traces",
                             [](const FrickePoint& x) {
                               return py::make_tuple(x.tx().log(), x.ty().log(), x.tz().log());
                             })
      .def("markov_residual", &FrickePoint::markov_residual);

  m.def("intersection", py::overload_cast<const Slope&, const Slope&>(&intersection));
  m.def("farey_enumerate", &farey_enumerate, "max_height"_a);
  m.def("apply_to_slope", &apply_mapping_class_to_slope, "m"_a, "s"_a);

  m.def("length", py::overload_cast<const TorusPoint&, const Slope&>(&length), "x"_a, "s"_a);
  m.def("teich_distance", &teich_distance, "x"_a, "y"_a);
  m.def("thurston_metric", [](const py::object& x, const py::object& y, int height) {
    const ModelPoint a = to_point(x), b = to_point(y);
    if (a.index() != b.index()) throw InvalidArgument("points belong to different models");
    if (const auto* t = std::get_if<TorusPoint>(&a)) return thurston_metric_exact(*t, std::get<TorusPoint>(b));
    return thurston_metric_enumerated(std::get<FrickePoint>(a), std::get<FrickePoint>(b), height).value;
  }, "x"_a, "y"_a, "height"_a = 200);
  m.def("hyp_length", [](const FrickePoint& x, const Slope& s) { return hyp_length(x, s); }, "x"_a, "s"_a);
  m.def("log_trace", [](const FrickePoint& x, const Slope& s) { return trace_of_slope(x, s).log(); }, "x"_a, "s"_a);
  m.def("act", [](const MappingClass& g, const py::object& x) -> py::object {
    const ModelPoint y = act_on_point(g, to_point(x));
    if (const auto* t = std::get_if<TorusPoint>(&y)) return py::cast(*t);
    return py::cast(std::get<FrickePoint>(y));
  }, "g"_a, "x"_a);

  m.def("classify", [](const MappingClass& g) { return to_string(classify(g)); });
  m.def("dilatation", &dilatation);
  m.def("spectral_limit", [](const py::object& x, const MappingClass& g, const Slope& a, int n) {
    return spectral_limit(to_point(x), g, a, n).limit;
  }, "x"_a, "g"_a, "alpha"_a, "n_max"_a = 40);

  m.def("drift", [](const std::vector<MappingClass>& gens, const py::object& x0, int n, int trials,
                    std::uint64_t seed, int threads) {
    CocycleSpec spec;
    spec.source = IidSource{gens, std::vector<double>(gens.size(), 1.0 / static_cast<double>(gens.size()))};
    spec.seed = seed;
    const DriftEstimate e = drift_estimate(spec, to_point(x0), n, trials, threads);
    return py::make_tuple(e.value, e.stderr_);
  }, "generators"_a, "x0"_a, "n"_a = 400, "trials"_a = 500, "seed"_a = 0, "threads"_a = 1,
        "Uniform iid walk; returns (drift, stderr).");

  m.def("classify_orbit", [](const std::string& map, const TorusPoint& x0) {
    const OrbitAnalysis oa = classify_orbit(SelfMap::parse(map), x0);
    py::dict d;
    d["classification"] = to_string(oa.classification);
    d["drift"] = oa.drift;
    d["lambda"] = oa.lambdaExt;
    d["last"] = oa.last;
    return d;
  }, "map"_a, "x0"_a);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, "args"_a, "Run the command line in-process; returns (exit code, stdout, stderr).");

  m.attr("__version__") = cli::kToolVersion;
}
