#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "multab/arith.hpp"
#include "multab/asymptotics.hpp"
#include "multab/counting.hpp"
#include "multab/divisor_geometry.hpp"
#include "multab/errors.hpp"
#include "multab/harness.hpp"
#include "multab/poisson.hpp"
#include "multab/suites.hpp"

namespace py = pybind11;
using namespace multab;

namespace {

// Sieves are cached by limit; counting calls reuse the largest one built.
const PrimeSieve& sieve_for(std::uint64_t need) {
  static std::unique_ptr<PrimeSieve> cached;
  const auto limit = static_cast<std::uint32_t>(std::max<std::uint64_t>(need, 1000));
  if (!cached || cached->limit() < limit) cached = std::make_unique<PrimeSieve>(limit);
  return *cached;
}

py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_multab, m) {
  m.doc() = "Multiplication-table counts, divisor-chain geometry and density predictions";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<OutOfRange>(m, "OutOfRange", PyExc_ValueError);
  py::register_exception<UnsupportedDimension>(m, "UnsupportedDimension", PyExc_ValueError);
  py::register_exception<ResourceLimit>(m, "ResourceLimit", PyExc_MemoryError);

  m.def("count_a", [](const std::vector<std::uint64_t>& sides, std::uint64_t budget_bits,
                      unsigned workers) {
          py::gil_scoped_release release;
          return count_A(sides, budget_bits, workers);
        },
        py::arg("sides"), py::arg("budget_bits") = kDefaultBudgetBits, py::arg("workers") = 1);

  m.def("count_h", [](std::uint64_t x, const std::vector<double>& y, const std::vector<double>& z,
                      bool squarefree) {
          const auto& s = sieve_for(x);
          py::gil_scoped_release release;
          return squarefree ? count_H_star(x, y, z, s) : count_H(x, y, z, s);
        },
        py::arg("x"), py::arg("y"), py::arg("z"), py::arg("squarefree") = false);

  m.def("tau_chain", [](const std::vector<std::uint64_t>& a) {
          std::uint64_t mx = 1;
          for (auto v : a) mx = std::max(mx, v);
          return tau_chain(FactoredTuple::from_values(a, sieve_for(mx)));
        });
  m.def("l_volume", [](const std::vector<std::uint64_t>& a) {
          std::uint64_t mx = 1;
          for (auto v : a) mx = std::max(mx, v);
          return l_volume(FactoredTuple::from_values(a, sieve_for(mx)));
        });

  m.def("q", &q_of, py::arg("u"));
  m.def("alpha_seq", &alpha_seq, py::arg("i"));
  m.def("solve_alpha", [](const std::vector<double>& ell) {
          const auto s = solve_alpha(ell.size(), ell);
          return py::make_tuple(s.alpha, s.residual);
        }, py::arg("ell"));
  m.def("predict", [](const std::vector<double>& y, double x) {
          const auto p = profile(y);
          DensityOptions opt;
          opt.x = x;
          Json d = Json::object();
          for (auto v : {DensityVariant::general, DensityVariant::small_k, DensityVariant::large_k,
                         DensityVariant::equal_size}) {
            const auto r = predicted_density(p, v, opt);
            d[to_string(v)] = {{"value", r.value}, {"hypotheses_hold", r.hypotheses_hold}, {"flags", r.flags}};
          }
          return to_py({{"k", p.k}, {"ell", p.ell}, {"alpha", p.alpha}, {"beta", p.beta},
                        {"i0", p.i0}, {"i1", p.i1}, {"densities", d}});
        }, py::arg("y"), py::arg("x") = 0.0);

  m.def("qr_exact", &qr_exact, py::arg("r"), py::arg("u"), py::arg("v"));
  m.def("gr_sum", [](int r, double u, int v) { return gr_sum(r, u, v); },
        py::arg("r"), py::arg("u"), py::arg("v"));
  m.def("slab_prob", [](const std::vector<double>& z, const std::vector<double>& lambda, double R) {
          return slab_prob_exact(PoissonSpec{z, lambda}, R).value;
        }, py::arg("z"), py::arg("lam"), py::arg("R"));
  m.def("alpha_r", [](const std::vector<double>& z, const std::vector<double>& lambda, double R) {
          return alpha_R(PoissonSpec{z, lambda}, R);
        }, py::arg("z"), py::arg("lam"), py::arg("R"));

  m.def("run_suite", [](const std::string& name, std::uint64_t seed, std::uint64_t trials) {
          SuiteResult r;
          {
            py::gil_scoped_release release;
            r = run_suite(name, SuiteParams{seed, trials, 0, nullptr});
          }
          return to_py({{"name", r.name}, {"passed", r.passed}, {"checks", r.checks},
                        {"violations", r.violations}, {"worst", r.worst}, {"details", r.details}});
        }, py::arg("name"), py::arg("seed") = 0, py::arg("trials") = 0);

  m.def("run_experiment", [](const std::string& config_json, bool with_meta) {
          const auto cfg = ExperimentConfig::from_json(Json::parse(config_json));
          std::vector<ResultRecord> rows;
          {
            py::gil_scoped_release release;
            rows = run_experiment(cfg);
          }
          py::list out;
          for (const auto& r : rows) out.append(to_py(r.to_json(with_meta)));
          return out;
        }, py::arg("config_json"), py::arg("with_meta") = true);
}
