#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "massey4/brauer.hpp"
#include "massey4/conics.hpp"
#include "massey4/jobs.hpp"
#include "massey4/localfields.hpp"

namespace py = pybind11;
using namespace massey4;

namespace {

// Rationals cross the boundary as decimal strings "p" or "p/q".
Rat rat(const std::string& s) { return parse_rational(s); }

std::optional<std::tuple<std::string, std::string, std::string>> conic(const std::string& a, const std::string& b) {
  const ConicResult r = solve_conic(rat(a), rat(b));
  if (!r.solution) return std::nullopt;
  return std::make_tuple(to_string(r.solution->x), to_string(r.solution->y), to_string(r.solution->z));
}

std::vector<std::string> ramified_places(const std::string& a, const std::string& b) {
  std::vector<std::string> out;
  for (const Int& p : symbol(rat(a), rat(b)).primes()) out.push_back(p == 0 ? "inf" : p.get_str());
  return out;
}

}  // namespace

PYBIND11_MODULE(_massey4, m) {
  m.doc() = "Native core of massey4";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const MathError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("run_job", [](const std::string& line) {
    py::gil_scoped_release release;
    const JobResult r = run_job_line(line, JobDefaults{});
    return std::make_pair(r.exit_code, r.document.dump());
  }, py::arg("line"), "Run one JSON job line; returns (exit_code, result document as JSON text).");

  m.def("hilbert_symbol", [](const std::string& a, const std::string& b, long p) {
    return hilbert_symbol_qp(rat(a), rat(b), Int(p));
  }, py::arg("a"), py::arg("b"), py::arg("p"), "(a, b)_p over Q_p; p = 0 is the real place.");

  m.def("ramified_places", &ramified_places, py::arg("a"), py::arg("b"));
  m.def("solve_conic", &conic, py::arg("a"), py::arg("b"), "(x, y, z) with z^2 = a x^2 + b y^2, or None.");
  m.def("squarefree_part", [](const std::string& q) { return squarefree_class(rat(q)).rep().get_str(); },
        py::arg("q"));
}
