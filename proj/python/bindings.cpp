#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sparsebound/ccrb.hpp"
#include "sparsebound/error.hpp"
#include "sparsebound/estimators.hpp"
#include "sparsebound/experiments.hpp"
#include "sparsebound/fisher.hpp"
#include "sparsebound/hcrb.hpp"
#include "sparsebound/montecarlo.hpp"

namespace py = pybind11;
using namespace sparsebound;

namespace {

// A is None for the identity sensing matrix.
ProblemModel make_model(const std::optional<Matrix>& A, const Vector& x, double sigma_e,
                        double sigma_n, std::optional<Index> s) {
  SensingMatrix matrix = A ? SensingMatrix(*A) : SensingMatrix::identity(x.size());
  const SparseSignal signal(x);
  return ProblemModel(std::move(matrix), sigma_e, sigma_n,
                      s.value_or(std::max<Index>(1, signal.sparsity())));
}

py::dict summary_dict(const TrialSummary& t) {
  py::dict d;
  d["mse"] = t.mse;
  d["std_error_mse"] = t.std_error_mse;
  d["bias"] = t.bias;
  d["trials"] = t.trials;
  d["failed"] = t.failed;
  d["seed"] = t.seed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bounds and estimators for sparse recovery with a perturbed sensing matrix";

  static py::exception<Error> error_type(m, "SparseboundError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error_type)(std::string(to_string(e.code())) + ": " + e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def(
      "ccrb",
      [](const Vector& x, const std::optional<Matrix>& A, double sigma_e, double sigma_n,
         std::optional<Index> s) {
        const auto model = make_model(A, x, sigma_e, sigma_n, s);
        const CcrbReport r = ccrb(model, SparseSignal(x));
        py::dict d;
        d["bound"] = r.bound;
        d["first_term"] = r.first_term;
        d["d_ccrb"] = r.d_ccrb;
        d["gamma"] = r.gamma_ccrb;
        d["regime"] = std::string(to_string(r.regime));
        return d;
      },
      py::arg("x"), py::kw_only(), py::arg("A") = py::none(), py::arg("sigma_e") = 0.0,
      py::arg("sigma_n") = 0.0, py::arg("s") = py::none(),
      "Constrained CRB; A = None means the identity matrix.");

  m.def(
      "hcrb_unit",
      [](const Vector& x, double sigma_e, double sigma_n, std::optional<Index> s) {
        const auto model = make_model(std::nullopt, x, sigma_e, sigma_n, s);
        const HcrbReport r = hcrb_unit_closed_form(model, SparseSignal(x));
        py::dict d;
        d["bound"] = r.bound;
        d["support_part"] = r.support_part;
        d["nonsupport_part"] = r.nonsupport_part;
        d["beta"] = r.beta;
        d["g_beta"] = r.g_beta;
        return d;
      },
      py::arg("x"), py::kw_only(), py::arg("sigma_e") = 0.0, py::arg("sigma_n") = 0.0,
      py::arg("s") = py::none(), "Closed-form HCRB for the identity sensing matrix.");

  m.def(
      "hcrb_general",
      [](const Vector& x, const std::vector<Vector>& offsets, const std::optional<Matrix>& A,
         double sigma_e, double sigma_n, std::optional<Index> s) {
        const auto model = make_model(A, x, sigma_e, sigma_n, s);
        const HcrbGeneral r = hcrb_general(model, SparseSignal(x), offsets);
        return py::make_tuple(r.covariance_bound, r.trace, r.points.H);
      },
      py::arg("x"), py::arg("offsets"), py::kw_only(), py::arg("A") = py::none(),
      py::arg("sigma_e") = 0.0, py::arg("sigma_n") = 0.0, py::arg("s") = py::none(),
      "HCRB from explicit test-point offsets: (covariance bound, trace, H).");

  m.def(
      "fisher_information",
      [](const Vector& x, const std::optional<Matrix>& A, double sigma_e, double sigma_n,
         std::optional<Index> s) {
        return fim_closed_form(make_model(A, x, sigma_e, sigma_n, s), SparseSignal(x)).J;
      },
      py::arg("x"), py::kw_only(), py::arg("A") = py::none(), py::arg("sigma_e") = 0.0,
      py::arg("sigma_n") = 0.0, py::arg("s") = py::none());

  m.def("gamma_approx", &gamma_approx, py::arg("c_e"), py::arg("c_n"), py::arg("s"));
  m.def("transition_ce", &transition_ce, py::arg("c_n"));
  m.def(
      "gamma_bounds",
      [](double theta_lower, double theta_upper, double c_e, double c_n, Index s) {
        RipConstants rip;
        rip.theta_lower = theta_lower;
        rip.theta_upper = theta_upper;
        rip.s = s;
        const GammaBounds b = gamma_bounds(rip, NoiseLevels{c_e, c_n}, s);
        return py::make_tuple(b.lower, b.upper);
      },
      py::arg("theta_lower"), py::arg("theta_upper"), py::arg("c_e"), py::arg("c_n"),
      py::arg("s"));
  m.def("g_function", &g_function, py::arg("beta"), py::arg("n"), py::arg("sigma_e"));
  m.def("d_hcrb_factor", &d_hcrb_factor, py::arg("n"), py::arg("s"), py::arg("beta"),
        py::arg("sigma_e"));

  m.def(
      "run_trials",
      [](const std::string& estimator, const Vector& x, const std::optional<Matrix>& A,
         double sigma_e, double sigma_n, std::optional<Index> s, std::int64_t trials,
         std::uint64_t seed, unsigned threads) {
        const auto model = make_model(A, x, sigma_e, sigma_n, s);
        const SparseSignal signal(x);
        TrialOptions options;
        options.parallel.threads = threads;
        const EstimatorSpec spec = parse_estimator(estimator, model, signal);
        TrialSummary t;
        {
          py::gil_scoped_release release;
          t = run_trials(model, signal, spec, trials, seed, options);
        }
        return summary_dict(t);
      },
      py::arg("estimator"), py::arg("x"), py::kw_only(), py::arg("A") = py::none(),
      py::arg("sigma_e") = 0.0, py::arg("sigma_n") = 0.0, py::arg("s") = py::none(),
      py::arg("trials") = 10000, py::arg("seed") = kDefaultSeed, py::arg("threads") = 0,
      "Empirical MSE of oracle | ml | least_squares | locally_unbiased | noise_exploiting.");

  m.def(
      "figure",
      [](const std::string& id, std::int64_t trials, std::uint64_t seed, unsigned threads) {
        ExperimentConfig overrides;
        overrides.id = id;
        overrides.trials = trials;
        overrides.seed = seed;
        overrides.threads = threads;
        const ExperimentConfig config = resolve_config(overrides);
        std::vector<CurvePoint> points;
        {
          py::gil_scoped_release release;
          points = run_figure(config);
        }
        py::list rows;
        for (const auto& p : points) {
          rows.append(py::make_tuple(p.x_value, p.curve_id, p.value, p.std_error));
        }
        return rows;
      },
      py::arg("id"), py::kw_only(), py::arg("trials") = 0, py::arg("seed") = kDefaultSeed,
      py::arg("threads") = 0,
      "Figure data as (x_value, curve_id, value, std_error) rows; trials = 0 keeps the default.");
}
