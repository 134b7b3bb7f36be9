#include "entrobound/bounds.hpp"
#include "entrobound/densities.hpp"
#include "entrobound/errors.hpp"
#include "entrobound/estimators.hpp"
#include "entrobound/experiment.hpp"
#include "entrobound/histogram.hpp"
#include "entrobound/oracle.hpp"

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>

namespace py = pybind11;
using namespace entrobound;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

SampleSet
to_samples(const Array& a)
{
  if (a.ndim() == 1)
    return SampleSet(1, std::vector<double>(a.data(), a.data() + a.size()));
  if (a.ndim() != 2)
    throw py::value_error("samples must be a 1-D or 2-D array");
  return SampleSet(static_cast<std::size_t>(a.shape(1)), std::vector<double>(a.data(), a.data() + a.size()));
}

Array
to_array(const SampleSet& s)
{
  Array out({ s.size(), s.dim() });
  std::copy(s.data().begin(), s.data().end(), out.mutable_data());
  return out;
}

// Wraps a Python callable so that demo worker threads can call it.
SampleEstimator
wrap_estimator(py::object fn)
{
  if (fn.is_none())
    return {};
  auto holder = std::make_shared<py::object>(std::move(fn));
  return [holder](const SampleSet& s) {
    py::gil_scoped_acquire gil;
    try {
      return (*holder)(to_array(s)).cast<double>();
    } catch (const py::error_already_set&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
}

DemoConfig
demo_config(double C, double delta, std::size_t N, std::size_t trials, std::uint64_t seed, std::size_t K,
            double assumed_L, py::object estimator)
{
  DemoConfig d;
  d.C = C;
  d.delta = delta;
  d.N = N;
  d.trials = trials;
  d.seed = seed;
  d.K = K;
  d.assumed_L = assumed_L;
  d.estimator = wrap_estimator(std::move(estimator));
  return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Histogram differential entropy estimation with finite-sample confidence bounds";
  m.attr("__version__") = std::string(version());

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto domain = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ValidityError>(m, "ValidityError", error.ptr());
  py::register_exception<OutOfSupportError>(m, "OutOfSupportError", domain.ptr());
  py::register_exception<EmptySampleError>(m, "EmptySampleError", domain.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", error.ptr());
  py::register_exception<InfeasibleError>(m, "InfeasibleError", error.ptr());
  auto io = py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<ParseError>(m, "ParseError", io.ptr());

  py::class_<BoundParams>(m, "BoundParams")
    .def(py::init([](std::size_t K, double L, std::uint64_t M, std::uint64_t N, double delta) {
           return BoundParams{ K, L, M, N, delta };
         }),
         py::arg("K"), py::arg("L"), py::arg("M"), py::arg("N"), py::arg("delta"))
    .def_readwrite("K", &BoundParams::K)
    .def_readwrite("L", &BoundParams::L)
    .def_readwrite("M", &BoundParams::M)
    .def_readwrite("N", &BoundParams::N)
    .def_readwrite("delta", &BoundParams::delta)
    .def("validate", &BoundParams::validate)
    .def("valid_for_theorem", &BoundParams::valid_for_theorem)
    .def("__repr__", [](const BoundParams& p) {
      return "BoundParams(K=" + std::to_string(p.K) + ", L=" + std::to_string(p.L) + ", M=" + std::to_string(p.M) +
             ", N=" + std::to_string(p.N) + ", delta=" + std::to_string(p.delta) + ")";
    });

  py::class_<ConfidenceBound>(m, "ConfidenceBound")
    .def_readonly("quant_bias", &ConfidenceBound::quant_bias)
    .def_readonly("stat_dev", &ConfidenceBound::stat_dev)
    .def_readonly("emp_bias", &ConfidenceBound::emp_bias)
    .def_readonly("total", &ConfidenceBound::total);

  m.def("alpha_const", &alpha_const);
  m.def("eta", &eta, py::arg("K"), py::arg("L"));
  m.def("min_valid_M", &min_valid_M, py::arg("K"), py::arg("L"));
  m.def("quantization_bias", &quantization_bias, py::arg("K"), py::arg("L"), py::arg("M"));
  m.def("statistical_deviation", &statistical_deviation, py::arg("N"), py::arg("delta"));
  m.def("empirical_bias", &empirical_bias, py::arg("K"), py::arg("M"), py::arg("N"));
  m.def("total_bound", &total_bound, py::arg("params"));
  m.def(
    "optimize_M",
    [](std::size_t K, double L, std::uint64_t N, double delta) {
      const OptimizedM r = optimize_M(K, L, N, delta);
      return py::make_tuple(r.M, r.bound);
    },
    py::arg("K"), py::arg("L"), py::arg("N"), py::arg("delta"));

  m.def(
    "plugin_entropy", [](const Array& x, std::uint64_t M) { return plugin_entropy(build_histogram(to_samples(x), M)); },
    py::arg("samples"), py::arg("M"));
  m.def(
    "estimate_differential_entropy",
    [](const Array& x, std::uint64_t M) { return estimate_differential_entropy(to_samples(x), M); },
    py::arg("samples"), py::arg("M"));

  py::enum_<EstimateKind>(m, "EstimateKind")
    .value("entropy", EstimateKind::entropy)
    .value("mutual_information", EstimateKind::mutual_information);

  py::class_<EstimateReport>(m, "EstimateReport")
    .def_readonly("estimate", &EstimateReport::estimate)
    .def_readonly("bound", &EstimateReport::bound)
    .def_readonly("params", &EstimateReport::params)
    .def_readonly("seed", &EstimateReport::seed)
    .def_readonly("kind", &EstimateReport::kind)
    .def_readonly("components", &EstimateReport::components);

  m.def(
    "estimate_entropy_certified",
    [](const Array& x, double L, double delta, std::optional<std::uint64_t> M, std::uint64_t seed) {
      return estimate_entropy_certified(to_samples(x), L, delta, M, seed);
    },
    py::arg("samples"), py::arg("L"), py::arg("delta"), py::arg("M") = py::none(), py::arg("seed") = 0);
  m.def(
    "estimate_mi_certified",
    [](const Array& x, std::size_t dim_x, double L, double delta, std::uint64_t seed) {
      return estimate_mi_certified(to_samples(x), dim_x, L, delta, seed);
    },
    py::arg("joint"), py::arg("dim_x"), py::arg("L"), py::arg("delta"), py::arg("seed") = 0);

  py::class_<DensityModel>(m, "DensityModel")
    .def_property_readonly("name", &DensityModel::name)
    .def_property_readonly("dim", &DensityModel::dim)
    .def_property_readonly("lipschitz", &DensityModel::lipschitz)
    .def_property_readonly("entropy", &DensityModel::analytic_entropy)
    .def("pdf", [](const DensityModel& d, std::vector<double> x) { return d.pdf(x); })
    .def(
      "sample", [](const DensityModel& d, std::size_t n, std::uint64_t seed) { return to_array(d.sample(n, seed)); },
      py::arg("n"), py::arg("seed"));

  m.def("tent_density", &tent_density, py::arg("K"));
  m.def("uniform_density", &uniform_density, py::arg("K"));
  m.def("low_entropy_alt", &low_entropy_alt, py::arg("K"), py::arg("target_h"));
  m.def("trapezoid_density", &trapezoid_density, py::arg("c"));
  m.def("binary_entropy", &binary_entropy, py::arg("e"));
  m.def("kl_true_divergence", &oracle::kl_true_divergence, py::arg("a"), py::arg("k"));
  m.def(
    "numeric_entropy", [](const DensityModel& d, double tol) { return oracle::numeric_entropy(d, tol).value; },
    py::arg("model"), py::arg("tol") = 1e-6);
  m.def("expected_plugin_entropy_enum", [](std::vector<double> pmf, std::uint64_t N) {
    return oracle::expected_plugin_entropy_enum(pmf, N);
  });

  py::class_<DemoReport>(m, "DemoReport")
    .def_readonly("trials", &DemoReport::trials)
    .def_readonly("failure_fraction", &DemoReport::failure_fraction)
    .def_readonly("C", &DemoReport::C)
    .def_readonly("delta", &DemoReport::delta)
    .def_readonly("calibrated_b", &DemoReport::calibrated_b)
    .def_readonly("true_value", &DemoReport::true_value)
    .def_readonly("epsilon", &DemoReport::epsilon)
    .def_readonly("a", &DemoReport::a)
    .def_readonly("estimates", &DemoReport::estimates);

  // Demos release the GIL so their worker threads can call back a Python
  // estimator.
  auto demo = [&](const char* name, DemoReport (*fn)(const DemoConfig&)) {
    m.def(
      name,
      [fn](double C, double delta, std::size_t N, std::size_t trials, std::uint64_t seed, std::size_t K,
           double assumed_L, py::object estimator) {
        const DemoConfig cfg = demo_config(C, delta, N, trials, seed, K, assumed_L, std::move(estimator));
        py::gil_scoped_release release;
        return fn(cfg);
      },
      py::arg("C") = 1.0, py::arg("delta") = 0.1, py::arg("N") = 100, py::arg("trials") = 100,
      py::arg("seed") = 0, py::arg("K") = 1, py::arg("assumed_L") = 1.0, py::arg("estimator") = py::none());
  };
  demo("prop1_demo", &prop1_demo);
  demo("mi_adversary_demo", &mi_adversary_demo);
  demo("kl_demo", &kl_demo);
}
