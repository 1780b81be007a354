#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "matrixopt/baselines.hpp"
#include "matrixopt/care_admm.hpp"
#include "matrixopt/ccom.hpp"
#include "matrixopt/harness.hpp"
#include "matrixopt/newton_admm.hpp"
#include "matrixopt/quasi_newton.hpp"
#include "matrixopt/sylvester.hpp"

namespace py = pybind11;
using namespace matrixopt;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
  if (a.ndim() == 1) {
    std::vector<double> v(a.data(), a.data() + a.shape(0));
    return Matrix(static_cast<std::size_t>(a.shape(0)), 1, std::move(v));
  }
  if (a.ndim() != 2) throw py::value_error("expected a 2-d array");
  const auto r = static_cast<std::size_t>(a.shape(0)), c = static_cast<std::size_t>(a.shape(1));
  return Matrix(r, c, std::vector<double>(a.data(), a.data() + r * c));
}

Array to_array(const Matrix& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["solution"] = r.solution.empty() ? py::object(py::none()) : py::object(to_array(r.solution));
  d["iterations"] = r.iterations;
  d["residual_history"] = r.residual_history;
  d["final_residual"] = r.final_residual;
  d["termination"] = std::string(to_string(r.termination));
  d["wall_time_seconds"] = r.wall_time_seconds;
  d["scalars"] = r.detail.scalars;
  d["series"] = r.detail.series;
  d["warnings"] = r.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sylvester, Lyapunov and Riccati solvers";

  py::register_exception<Error>(m, "MatrixOptError", PyExc_ValueError);

  m.def("sylvester_residual", [](const Array& a, const Array& b, const Array& c, const Array& x) {
    return sylvester_residual(SylvesterProblem(to_matrix(a), to_matrix(b), to_matrix(c)), to_matrix(x));
  });
  m.def("lyapunov_residual", [](const Array& a, const Array& q, const Array& x) {
    return lyapunov_residual(LyapunovProblem(to_matrix(a), to_matrix(q)), to_matrix(x));
  });
  m.def("care_residual", [](const Array& a, const Array& n, const Array& k, const Array& x) {
    return care_residual(CareProblem(to_matrix(a), to_matrix(n), to_matrix(k)), to_matrix(x));
  });

  m.def("solve_sylvester_direct", [](const Array& a, const Array& b, const Array& c) {
    return to_array(solve_kronecker_direct(SylvesterProblem(to_matrix(a), to_matrix(b), to_matrix(c))));
  });
  m.def("solve_lyapunov_direct", [](const Array& a, const Array& q) {
    return to_array(solve_lyapunov_direct(LyapunovProblem(to_matrix(a), to_matrix(q))));
  });

  m.def(
      "ccom",
      [](const Array& a, const Array& b, const Array& c, double epsilon, long max_iterations) {
        CcomConfig cfg;
        cfg.epsilon = epsilon;
        cfg.max_iterations = max_iterations;
        return report_dict(solve_ccom(SylvesterProblem(to_matrix(a), to_matrix(b), to_matrix(c)), cfg));
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("epsilon") = 1e-8,
      py::arg("max_iterations") = 100);

  m.def(
      "quasi_newton",
      [](const Array& a, const Array& b, const Array& c, const std::string& method,
         const std::string& linesearch, const std::string& mode, double grad_tol,
         long max_iterations) {
        QnConfig cfg;
        if (method == "dfp") cfg.method = QnMethod::dfp;
        else if (method == "bfgs") cfg.method = QnMethod::bfgs;
        else throw py::value_error("method must be 'dfp' or 'bfgs'");
        cfg.linesearch = parse_linesearch(linesearch);
        cfg.mode = parse_qn_mode(mode);
        cfg.grad_tol = grad_tol;
        cfg.max_iterations = max_iterations;
        return report_dict(
            solve_quasi_newton(SylvesterProblem(to_matrix(a), to_matrix(b), to_matrix(c)), cfg));
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("method") = "bfgs",
      py::arg("linesearch") = "exact", py::arg("mode") = "matrix_form", py::arg("grad_tol") = 1e-8,
      py::arg("max_iterations") = 500);

  m.def(
      "care_admm",
      [](const Array& a, const Array& n, const Array& k, double alpha, double beta, double gamma,
         double tol, long max_iterations) {
        AdmmConfig cfg;
        cfg.alpha = alpha;
        cfg.beta = beta;
        cfg.gamma = gamma;
        cfg.tol = tol;
        cfg.max_iterations = max_iterations;
        return report_dict(solve_care_admm(CareProblem(to_matrix(a), to_matrix(n), to_matrix(k)), cfg));
      },
      py::arg("a"), py::arg("n"), py::arg("k"), py::arg("alpha") = 0.5, py::arg("beta") = 10.0,
      py::arg("gamma") = 0.05, py::arg("tol") = 1e-8, py::arg("max_iterations") = 50000);

  m.def(
      "lyapunov_admm",
      [](const Array& a, const Array& q, double alpha, double beta, double tol, long max_iterations) {
        LyapAdmmConfig cfg;
        cfg.alpha = alpha;
        cfg.beta = beta;
        cfg.tol = tol;
        cfg.max_iterations = max_iterations;
        return report_dict(solve_lyapunov_admm(LyapunovProblem(to_matrix(a), to_matrix(q)), cfg));
      },
      py::arg("a"), py::arg("q"), py::arg("alpha") = 0.5, py::arg("beta") = 10.0,
      py::arg("tol") = 1e-8, py::arg("max_iterations") = 5000);

  m.def(
      "newton_admm",
      [](const Array& a, const Array& n, const Array& k, double alpha, double beta, double tol,
         std::optional<double> inner_tol, long outer_max) {
        const CareProblem p(to_matrix(a), to_matrix(n), to_matrix(k));
        NewtonAdmmConfig cfg;
        cfg.alpha = alpha;
        cfg.beta = beta;
        cfg.outer_tol = tol;
        cfg.outer_max = outer_max;
        if (inner_tol) cfg.inner_tol_rule = InnerTolRule::fixed(*inner_tol);
        return report_dict(solve_newton_admm(p, Matrix::zeros(p.n(), p.n()), cfg));
      },
      py::arg("a"), py::arg("n"), py::arg("k"), py::arg("alpha") = 0.5, py::arg("beta") = 10.0,
      py::arg("tol") = 1e-8, py::arg("inner_tol") = py::none(), py::arg("outer_max") = 50);

  m.def(
      "newton_care",
      [](const Array& a, const Array& n, const Array& k, double tol, long max_iterations) {
        const CareProblem p(to_matrix(a), to_matrix(n), to_matrix(k));
        BaselineConfig cfg;
        cfg.tol = tol;
        cfg.max_iterations = max_iterations;
        return report_dict(solve_newton_care(p, Matrix::zeros(p.n(), p.n()), cfg));
      },
      py::arg("a"), py::arg("n"), py::arg("k"), py::arg("tol") = 1e-8, py::arg("max_iterations") = 50);

  m.def(
      "run_json",
      [](const std::string& equation, const std::string& method, const std::string& generator,
         std::size_t n, std::uint64_t seed, const std::map<std::string, std::string>& settings) {
        harness::RunRequest req;
        req.equation = parse_equation_kind(equation);
        req.method = method;
        req.source.generator = generator;
        req.source.order = n;
        req.source.params["seed"] = static_cast<double>(seed);
        req.settings = settings;
        const auto out = harness::run(req);
        return py::make_tuple(harness::report_json(req, out), harness::exit_code(out));
      },
      py::arg("equation"), py::arg("method"), py::arg("generator"), py::arg("n") = 0,
      py::arg("seed") = 0, py::arg("settings") = std::map<std::string, std::string>{});

  m.def("ammonia_reactor", [] {
    const auto p = ammonia_reactor();
    return py::make_tuple(to_array(p.a), to_array(p.n_mat), to_array(p.k_mat));
  });
}
