#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sparsetrig/dictionary.hpp"
#include "sparsetrig/errors.hpp"
#include "sparsetrig/experiment.hpp"
#include "sparsetrig/function_classes.hpp"
#include "sparsetrig/greedy.hpp"
#include "sparsetrig/index_set.hpp"
#include "sparsetrig/layered.hpp"
#include "sparsetrig/norms.hpp"
#include "sparsetrig/oracle.hpp"
#include "sparsetrig/rate_fit.hpp"
#include "sparsetrig/sparse_grid.hpp"

namespace py = pybind11;
using namespace sparsetrig;

namespace {

using TermList = std::vector<std::pair<std::vector<int>, Complex>>;

TrigPolynomial from_term_list(int dim, const TermList& terms) {
  std::vector<TrigPolynomial::Term> t;
  for (const auto& [k, c] : terms) {
    if (static_cast<int>(k.size()) != dim) throw DimensionMismatch("frequency has the wrong dimension");
    t.emplace_back(FrequencyIndex(k), c);
  }
  return TrigPolynomial::from_terms(dim, std::move(t));
}

TermList to_term_list(const TrigPolynomial& t) {
  TermList out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto k = t.frequency(i);
    out.emplace_back(std::vector<int>(k.begin(), k.end()), t.coeff(i));
  }
  return out;
}

Exponent exponent_of(double p) { return std::isinf(p) ? Exponent::sup() : Exponent::lp(p); }

py::dict summary_dict(const RunResult& r) {
  py::dict d;
  d["csv"] = r.csv;
  d["summary"] = r.summary().dump();
  d["exit_code"] = r.exit_code();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparse trigonometric approximation: greedy algorithms, hyperbolic crosses, sparse grids";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<RegimeError>(m, "RegimeError", PyExc_ValueError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);

  py::class_<TrigPolynomial>(m, "TrigPolynomial")
      .def(py::init(&from_term_list), py::arg("dim"), py::arg("terms"),
           "Build from [(frequency, coefficient), ...]; repeated frequencies are summed")
      .def_property_readonly("dim", &TrigPolynomial::dim)
      .def("__len__", &TrigPolynomial::size)
      .def("terms", &to_term_list)
      .def("coefficient", [](const TrigPolynomial& t, const std::vector<int>& k) { return t.at(std::span<const int>(k)); })
      .def("__call__", [](const TrigPolynomial& t, const std::vector<double>& x) { return t.evaluate(x); })
      .def("is_real", &TrigPolynomial::is_real, py::arg("tol") = 0.0)
      .def("a_norm", [](const TrigPolynomial& t) { return a_norm(t); })
      .def("real_a_norm", [](const TrigPolynomial& t) { return real_a_norm(t); })
      .def("l2_norm", [](const TrigPolynomial& t) { return l2_norm(t); })
      .def("norm", [](const TrigPolynomial& t, double p, int oversampling) { return norm_value(t, exponent_of(p), oversampling); },
           py::arg("p"), py::arg("oversampling") = 4, "L_p norm on an oversampled grid; p = inf gives the grid maximum")
      .def("__add__", [](const TrigPolynomial& a, const TrigPolynomial& b) { return a + b; })
      .def("__sub__", [](const TrigPolynomial& a, const TrigPolynomial& b) { return a - b; })
      .def("__mul__", [](const TrigPolynomial& a, Complex c) { return a * c; })
      .def("partial_sum", [](const TrigPolynomial& t, int n) { return hyperbolic_partial_sum(t, n); },
           "Restriction to the step hyperbolic cross Q_n");

  m.def("hyperbolic_cross_size", [](int d, int n) { return IndexSet::step_hyperbolic_cross(d, n).size(); });
  m.def("random_box_polynomial", &random_box_polynomial, py::arg("box"), py::arg("seed"));

  py::class_<TrigDictionary>(m, "TrigDictionary")
      .def(py::init([](std::vector<int> box, double p, bool unit) {
             return TrigDictionary(std::move(box), p, unit ? AtomScaling::Unit : AtomScaling::LpNormalized);
           }),
           py::arg("box"), py::arg("p"), py::arg("unit") = false)
      .def("__len__", &TrigDictionary::size)
      .def_property_readonly("p", &TrigDictionary::p)
      .def_property_readonly("box", &TrigDictionary::box);

  m.def(
      "wcga",
      [](const TrigPolynomial& f, const TrigDictionary& dict, double t, int m_max) {
        WcgaOptions o;
        o.t = t;
        o.m_max = m_max;
        o.keep_snapshots = false;
        const auto trace = wcga(f, dict, o);
        return py::make_tuple(trace.residuals(), trace.approximant);
      },
      py::arg("f"), py::arg("dictionary"), py::arg("t") = 1.0, py::arg("m_max") = 64,
      "Weak Chebyshev greedy algorithm; returns (residuals, approximant)");
  m.def(
      "ia_epsilon",
      [](const TrigPolynomial& f, const TrigDictionary& dict, int m_max, double v) {
        IaOptions o;
        o.schedule = Schedule::for_lp(dict.p(), v);
        o.m_max = m_max;
        o.keep_snapshots = false;
        const auto trace = ia_epsilon(f, dict, o);
        return py::make_tuple(trace.residuals(), trace.approximant);
      },
      py::arg("f"), py::arg("dictionary"), py::arg("m_max") = 64, py::arg("v") = 1.0,
      "Incremental algorithm IA(eps) on f in A_1; returns (residuals, approximant)");
  m.def("oracle_sigma", [](const TrigPolynomial& f, const TrigDictionary& dict, int mm) { return oracle_sigma(f, dict, mm); },
        py::arg("f"), py::arg("dictionary"), py::arg("m"), "Best m-term error");
  m.def(
      "g_p_m",
      [](const TrigPolynomial& t, int mm, double p) {
        const auto g = std::isinf(p) ? g_inf_m(t, mm) : g_p_m(t, mm, p);
        return py::make_tuple(g.approximant, g.error);
      },
      py::arg("t"), py::arg("m"), py::arg("p"), "Greedy m-term approximant and its L_p error");

  m.def(
      "fit_rate",
      [](std::vector<std::pair<double, double>> rows, double kappa) {
        const auto f = fit_rate(std::move(rows), kappa);
        py::dict d;
        d["slope"] = f.slope;
        d["intercept"] = f.intercept;
        d["kappa"] = f.kappa;
        d["residual"] = f.residual;
        d["band"] = py::make_tuple(f.band_lo, f.band_hi);
        return d;
      },
      py::arg("rows"), py::arg("kappa") = 0.0, "Slope of log(error / (ln m)^kappa) against log m");

  py::enum_<ClassKind>(m, "ClassKind")
      .value("W", ClassKind::W)
      .value("H", ClassKind::H)
      .value("B", ClassKind::B)
      .value("Htheta", ClassKind::Htheta)
      .value("WAb", ClassKind::WAb);
  py::class_<ClassSpec>(m, "ClassSpec")
      .def_static("W", &ClassSpec::W, py::arg("r"), py::arg("q"), py::arg("d"))
      .def_static("H", &ClassSpec::H, py::arg("r"), py::arg("q"), py::arg("d"))
      .def_static("B", &ClassSpec::B, py::arg("r"), py::arg("q"), py::arg("theta"), py::arg("d"))
      .def_static("Htheta", &ClassSpec::Htheta, py::arg("r"), py::arg("q"), py::arg("theta"), py::arg("d"))
      .def_static("WAb", &ClassSpec::WAb, py::arg("a"), py::arg("b"), py::arg("d"))
      .def_readonly("kind", &ClassSpec::kind)
      .def_readonly("d", &ClassSpec::d)
      .def_readonly("r", &ClassSpec::r)
      .def_readonly("q", &ClassSpec::q)
      .def("__repr__", &ClassSpec::describe);
  m.def(
      "sample_class",
      [](const ClassSpec& spec, int level, std::uint64_t seed) {
        return sample_class(spec, IndexSet::step_hyperbolic_cross(spec.d, level), seed).f;
      },
      py::arg("spec"), py::arg("level"), py::arg("seed"), "Random class member on Q_level");
  m.def("class_norm", &class_norm, py::arg("f"), py::arg("spec"));
  m.def(
      "rate_line",
      [](const ClassSpec& spec, double p, double mu) {
        const auto l = rate_line(RateTarget::of(spec), p, mu);
        py::dict d;
        d["id"] = l.id;
        d["rho"] = l.rho;
        d["kappa"] = l.kappa;
        d["guard"] = l.guard;
        return d;
      },
      py::arg("spec"), py::arg("p"), py::arg("mu") = 0.0);

  m.def("fejer_kernel", py::overload_cast<int, int>(&fejer_kernel), py::arg("N"), py::arg("d"));
  m.def(
      "sparse_grid",
      [](int n, int d, bool full_period) {
        const auto X = sparse_grid(n, d, {full_period ? GridPeriod::Full : GridPeriod::Half, false, false});
        std::vector<std::vector<double>> pts;
        for (const auto& k : X.knots()) pts.push_back(k.x);
        return pts;
      },
      py::arg("n"), py::arg("d"), py::arg("full_period") = false);
  m.def(
      "smolyak_cubature",
      [](int n, int d) {
        const auto X = smolyak_cubature(n, d);
        std::vector<std::vector<double>> pts;
        for (const auto& k : X.knots()) pts.push_back(k.x);
        return py::make_tuple(pts, X.weights());
      },
      py::arg("n"), py::arg("d"), "Smolyak rule on SG(n): (points, weights)");
  m.def("smolyak_integrate", [](const TrigPolynomial& f, int n) { return smolyak_cubature_fast(f, n); },
        py::arg("f"), py::arg("n"));

  m.def("preset_names", [] {
    std::vector<std::string> names;
    for (const auto& [name, cfg] : presets()) names.push_back(name);
    return names;
  });
  m.def("preset_json", [](const std::string& name) { return preset(name).to_json().dump(); });
  m.def(
      "run_json",
      [](const std::string& config_json) {
        const auto cfg = ExperimentConfig::from_json(nlohmann::json::parse(config_json));
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(cfg);
        }
        return summary_dict(r);
      },
      py::arg("config_json"));
}
