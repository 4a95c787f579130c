#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spdeflow/checks.hpp"
#include "spdeflow/hermite.hpp"
#include "spdeflow/operators.hpp"

namespace py = pybind11;
using namespace spdeflow;

namespace {

MultiIndex to_multi_index(const std::vector<int>& v) { return MultiIndex(v); }

CoefficientModel make_model(const std::string& name, int d) {
    if (name == "brownian") return CoefficientModel::brownian(d);
    if (name == "ou") return CoefficientModel::ou(d);
    throw std::invalid_argument("unknown builtin model: " + name);
}

}  // namespace

PYBIND11_MODULE(_spdeflow, m) {
    m.doc() = "Stochastic representations of forward-equation solutions in Hermite-Sobolev spaces";

    py::class_<Basis, std::shared_ptr<Basis>>(m, "Basis")
        .def(py::init([](int d, int n_max, int quad_nodes) {
                 return std::make_shared<Basis>(BasisSpec{d, n_max, quad_nodes});
             }),
             py::arg("d"), py::arg("n_max"), py::arg("quad_nodes") = 0)
        .def_property_readonly("d", &Basis::d)
        .def_property_readonly("n_max", &Basis::n_max)
        .def_property_readonly("size", &Basis::size)
        .def("indices", [](const Basis& b) {
            std::vector<std::vector<int>> out;
            for (const auto& k : b.indices()) out.push_back(k.entries());
            return out;
        });

    py::class_<HermiteSeries>(m, "HermiteSeries")
        .def_property_readonly("coeffs",
                               [](const HermiteSeries& s) { return s.coeffs(); })
        .def("sobolev_norm", [](const HermiteSeries& s, double p) { return sobolev_norm(s, p); })
        .def("evaluate", &HermiteSeries::evaluate)
        .def("to_json", [](const HermiteSeries& s) { return s.to_json().dump(); });

    py::class_<CoefficientModel>(m, "CoefficientModel")
        .def_static("brownian", &CoefficientModel::brownian, py::arg("d") = 1)
        .def_static("ou", &CoefficientModel::ou, py::arg("d") = 1)
        .def_static("constant",
                    [](const Eigen::MatrixXd& sigma, const Eigen::VectorXd& b) {
                        return CoefficientModel::constant(sigma, b);
                    })
        .def_property_readonly("d", &CoefficientModel::d)
        .def_property_readonly("r", &CoefficientModel::r)
        .def_property_readonly("is_constant", &CoefficientModel::is_constant);

    py::class_<CompactDistribution>(m, "CompactDistribution")
        .def(py::init<int>(), py::arg("d"))
        .def_static("delta", &CompactDistribution::delta)
        .def_static("delta_derivative",
                    [](const Eigen::VectorXd& x, const std::vector<int>& gamma) {
                        return CompactDistribution::delta_derivative(x, to_multi_index(gamma));
                    })
        .def_static("uniform_density", &CompactDistribution::uniform_density)
        .def_static("bump_density", &CompactDistribution::bump_density)
        .def("add_atom",
             [](CompactDistribution& psi, double w, const std::vector<int>& gamma,
                const Eigen::VectorXd& x) { psi.add_atom(w, to_multi_index(gamma), x); })
        .def_property_readonly("order", &CompactDistribution::order)
        .def_property_readonly("default_p", &CompactDistribution::default_p)
        .def_property_readonly("default_q", &CompactDistribution::default_q)
        .def("to_series", &CompactDistribution::to_series);

    py::class_<SolveReport>(m, "SolveReport")
        .def_readonly("t", &SolveReport::t)
        .def_readonly("paths", &SolveReport::paths)
        .def_readonly("blowups", &SolveReport::blowups)
        .def_readonly("second_moment", &SolveReport::second_moment)
        .def_readonly("mean", &SolveReport::mean)
        .def_readonly("std_error", &SolveReport::std_error)
        .def("to_json", [](const SolveReport& r) { return r.to_json().dump(); });

    py::class_<KernelEstimate>(m, "KernelEstimate")
        .def_readonly("series", &KernelEstimate::series)
        .def_readonly("std_error", &KernelEstimate::std_error)
        .def_readonly("mass", &KernelEstimate::mass)
        .def_readonly("mass_std_error", &KernelEstimate::mass_std_error);

    // Hermite calculus
    m.def("hermite_eval",
          [](const std::vector<int>& k, const Eigen::VectorXd& x, const std::vector<int>& gamma) {
              return hermite_eval(to_multi_index(k), x, to_multi_index(gamma));
          },
          py::arg("k"), py::arg("x"), py::arg("gamma"));
    m.def("hermite_values", &hermite_values, py::arg("n_max"), py::arg("t"));
    m.def("delta_norm_sq_series", &delta_norm_sq_series, py::arg("x"), py::arg("p"),
          py::arg("n_max"));
    m.def("delta_norm_sq_mehler", &delta_norm_sq_mehler, py::arg("x"), py::arg("p"),
          py::arg("abs_tol") = 1e-10);
    m.def("delta_coeffs",
          [](const Eigen::VectorXd& x, const std::vector<int>& gamma, BasisPtr basis) {
              return delta_coeffs(x, to_multi_index(gamma), std::move(basis));
          },
          py::arg("x"), py::arg("gamma"), py::arg("basis"));
    m.def("transform",
          [](const std::function<double(const Eigen::VectorXd&)>& f, BasisPtr basis) {
              return transform(f, std::move(basis));
          });
    m.def("translate", &translate, py::arg("series"), py::arg("shift"));
    m.def("apply_derivative", &apply_derivative, py::arg("series"), py::arg("axis"));
    m.def("sobolev_inner", &sobolev_inner, py::arg("f"), py::arg("g"), py::arg("p"));

    // Solvers and checkers
    m.def("make_model", &make_model, py::arg("name"), py::arg("d") = 1);
    m.def("solve_forward_mc",
          [](const CompactDistribution& psi, const CoefficientModel& model, double T, long paths,
             double dt, double p, BasisPtr basis, std::uint64_t seed) {
              return solve_forward_mc_at(psi, model, T, paths, dt, p, std::move(basis), seed);
          },
          py::arg("psi"), py::arg("model"), py::arg("T"), py::arg("paths"), py::arg("dt"),
          py::arg("p"), py::arg("basis"), py::arg("seed"));
    m.def("solve_forward_galerkin",
          [](const CompactDistribution& psi, const CoefficientModel& model, double T, double dt,
             BasisPtr basis, double q) {
              const GalerkinReport rep = solve_forward_galerkin(psi, model, T, dt, std::move(basis), 1, q);
              return rep.final_state();
          },
          py::arg("psi"), py::arg("model"), py::arg("T"), py::arg("dt"), py::arg("basis"),
          py::arg("q"));
    m.def("estimate_kernel", &estimate_kernel, py::arg("model"), py::arg("x"), py::arg("t"),
          py::arg("paths"), py::arg("dt"), py::arg("basis"), py::arg("seed"));
    m.def("check_monotonicity",
          [](const CoefficientModel& model, double q, BasisPtr basis) {
              const MonotonicityReport rep = check_monotonicity(model, q, std::move(basis));
              return py::make_tuple(rep.c_star, rep.drift);
          },
          py::arg("model"), py::arg("q"), py::arg("basis"));
}
