// Python bindings. Exact values cross the boundary as fractions.Fraction,
// reports as plain dicts (decoded from the same JSON the CLI writes).

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "multsys/cli.hpp"
#include "multsys/error.hpp"
#include "multsys/io.hpp"

namespace py = pybind11;
using namespace multsys;

namespace {

py::object fraction_type() {
  static py::object cls = py::module_::import("fractions").attr("Fraction");
  return cls;
}

py::object to_py(const Rational& q) { return fraction_type()(py::str(to_string(q))); }

Rational from_py(const py::handle& obj) {
  if (py::isinstance<py::float_>(obj)) return rational_from_double(obj.cast<double>());
  return parse_rational(py::str(obj).cast<std::string>());
}

std::vector<Rational> rationals(const py::iterable& xs) {
  std::vector<Rational> out;
  for (auto x : xs) out.push_back(from_py(x));
  return out;
}

py::object to_dict(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_dict(const py::handle& obj) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

IndexFamily family_for(const BoundedSystem& sys, std::optional<std::size_t> l) {
  return IndexFamily::cardinality_cap(l.value_or(sys.size()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact multiplicative-system analysis";

  static py::exception<Error> error_type(m, "MultsysError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type.ptr())(py::str(e.what()));
      exc.attr("code") = py::str(std::string(error_name(e.code())));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<StepFunction>(m, "StepFunction")
      .def(py::init([](const py::iterable& breakpoints, const py::iterable& values) {
             return make_step(rationals(breakpoints), rationals(values));
           }),
           py::arg("breakpoints"), py::arg("values"))
      .def_property_readonly("breakpoints",
                             [](const StepFunction& f) {
                               py::list out;
                               for (const auto& b : f.breakpoints()) out.append(to_py(b));
                               return out;
                             })
      .def_property_readonly("values",
                             [](const StepFunction& f) {
                               py::list out;
                               for (const auto& v : f.values()) out.append(to_py(v));
                               return out;
                             })
      .def_property_readonly("length", [](const StepFunction& f) { return to_py(f.length()); })
      .def("integral", [](const StepFunction& f) { return to_py(integral(f)); })
      .def("__call__", [](const StepFunction& f, const py::handle& x) { return to_py(evaluate(f, from_py(x))); })
      .def("__len__", &StepFunction::pieces)
      .def("__repr__", [](const StepFunction& f) { return "StepFunction(" + io::to_json(f).dump() + ")"; });

  py::class_<BoundedSystem>(m, "BoundedSystem")
      .def(py::init([](std::vector<StepFunction> fs, std::optional<py::iterable> lower,
                       std::optional<py::iterable> upper) {
             if (!lower && !upper) return BoundedSystem::unit(std::move(fs));
             std::vector<Rational> lo = lower ? rationals(*lower) : std::vector<Rational>(fs.size(), Rational(-1));
             std::vector<Rational> hi = upper ? rationals(*upper) : std::vector<Rational>(fs.size(), Rational(1));
             return BoundedSystem::make(std::move(fs), std::move(lo), std::move(hi));
           }),
           py::arg("functions"), py::arg("lower") = py::none(), py::arg("upper") = py::none())
      .def_property_readonly("functions", &BoundedSystem::functions)
      .def("__len__", &BoundedSystem::size)
      .def("to_dict", [](const BoundedSystem& s) { return to_dict(io::to_json(s)); })
      .def_static("from_dict", [](const py::handle& d) { return io::system_from_json(from_dict(d)); });

  m.def("rademacher", &io::rademacher_system, py::arg("n"));
  m.def("builtin", &io::builtin_system, py::arg("name"));

  m.def(
      "multiplicative_error",
      [](const BoundedSystem& sys, std::optional<std::size_t> l, unsigned threads) {
        return to_py(multiplicative_error(sys, family_for(sys, l), MomentOptions{threads}).mu);
      },
      py::arg("system"), py::arg("l") = py::none(), py::arg("threads") = 1);

  m.def(
      "reduce",
      [](const BoundedSystem& sys, std::optional<std::size_t> l) {
        return to_dict(io::to_json(reduce_to_independent(sys, family_for(sys, l))));
      },
      py::arg("system"), py::arg("l") = py::none());

  m.def(
      "verify_domination",
      [](const BoundedSystem& sys, const py::iterable& coeffs, const std::string& phi, std::optional<std::size_t> l) {
        auto c = rationals(coeffs);
        return to_dict(io::to_json(verify_domination(sys, family_for(sys, l), c, ConvexSpec::parse(phi))));
      },
      py::arg("system"), py::arg("coeffs"), py::arg("phi") = "power:4", py::arg("l") = py::none());

  m.def("khintchine_constant", &khintchine_constant, py::arg("p"));
  m.def(
      "verify_khintchine",
      [](const BoundedSystem& sys, const py::iterable& coeffs, double p, bool even) {
        auto c = rationals(coeffs);
        return to_dict(io::to_json(
            verify_khintchine(sys, c, p, even ? KhintchinMode::EvenInteger : KhintchinMode::General)));
      },
      py::arg("system"), py::arg("coeffs"), py::arg("p") = 4.0, py::arg("even") = false);

  m.def(
      "hoeffding_tail",
      [](const BoundedSystem& sys, const py::handle& lambda, std::optional<std::size_t> l) {
        return to_dict(io::to_json(hoeffding_tail(sys, from_py(lambda), family_for(sys, l))));
      },
      py::arg("system"), py::arg("level"), py::arg("l") = py::none());

  m.def(
      "truncated_mu",
      [](std::vector<double> tau, double lambda, std::size_t nu_max, unsigned threads) {
        auto spec = build_tau_explicit(std::move(tau), lambda);
        return to_dict(io::to_json(truncated_mu(spec, nu_max, threads)));
      },
      py::arg("tau"), py::arg("lam"), py::arg("nu_max"), py::arg("threads") = 1);
  m.def(
      "geometric_tau",
      [](double lambda, double tau1, std::size_t n) { return build_tau_geometric(lambda, tau1, n).tau; },
      py::arg("lam"), py::arg("tau1"), py::arg("n"));

  m.def(
      "greedy_subsequence",
      [](const std::string& system, std::size_t rho, std::size_t steps) {
        OrthogonalSystem sys;
        if (system.rfind("walsh:", 0) == 0) {
          sys = walsh_system(static_cast<unsigned>(std::stoul(system.substr(6))));
        } else {
          sys = certify(io::resolve_system(system).functions());
        }
        auto cert = greedy_subsequence(sys, rho, steps);
        auto j = io::to_json(cert);
        j["mu"] = io::exact(selected_mu(sys, cert));
        return to_dict(j);
      },
      py::arg("system"), py::arg("rho") = 8, py::arg("steps") = 2);

  m.def(
      "verify_rubinshtein",
      [](const StepFunction& f, std::size_t n, std::optional<std::size_t> l) {
        return to_dict(io::to_json(verify_rubinshtein(f, n, l.value_or(n))));
      },
      py::arg("f"), py::arg("n"), py::arg("l") = py::none());
  m.def(
      "dilated_system", [](const StepFunction& f, std::size_t n) { return dilated_system(build_phi(f), n); },
      py::arg("f"), py::arg("n"));

  m.def(
      "run",
      [](const std::string& command, const std::string& system, const std::string& family) {
        cli::RunConfig config;
        config.command = command;
        config.system = system;
        config.family = family;
        config.no_meta = true;
        std::ostringstream out, err;
        const int code = cli::run(config, out, err);
        if (code == 2) throw Error(ErrorCode::ParseError, err.str());
        return py::make_tuple(code, to_dict(nlohmann::json::parse(out.str())));
      },
      py::arg("command"), py::arg("system"), py::arg("family") = "full");
}
