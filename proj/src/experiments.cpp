#include "sparsebound/experiments.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cmath>
#include <limits>
#include <numeric>

#include "sparsebound/ccrb.hpp"
#include "sparsebound/error.hpp"
#include "sparsebound/hcrb.hpp"

namespace sparsebound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr std::array<std::string_view, 8> kIds = {
    "fig3", "fig4", "fig5", "fig6", "fig7", "fig-estimators", "table1", "custom"};

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

std::string number_label(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%g", v);
  return buffer;
}

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::invalid_input, what);
}

// Gaussian A_S (m x s) and a +-1 signal on all s coordinates: the CCRB with
// maximal support only sees the support columns.
struct SupportInstance {
  Matrix A_S;
  SparseSignal x;
};

SupportInstance draw_support_instance(Index m, Index s, RandomStream& rng) {
  Matrix A_S = generate_gaussian_matrix(m, s, rng);
  Vector values(s);
  for (Index i = 0; i < s; ++i) values(i) = rng.coin() ? 1.0 : -1.0;
  return {std::move(A_S), SparseSignal(std::move(values))};
}

// Noise standard deviations that put the instance at the requested levels.
ProblemModel model_at_levels(const SupportInstance& inst, double c_e, double c_n) {
  const auto m = static_cast<double>(inst.A_S.rows());
  const auto s = static_cast<double>(inst.A_S.cols());
  const double trace = inst.A_S.squaredNorm();
  const double sigma_e = std::sqrt(c_e * trace / (m * s));
  const double sigma_n = std::sqrt(c_n * inst.x.squared_norm() / m);
  return ProblemModel(inst.A_S, sigma_e, sigma_n, inst.A_S.cols());
}

SparseSignal leading_signal(Index n, Index s, double x_q) {
  Support support(static_cast<std::size_t>(s));
  std::iota(support.begin(), support.end(), Index{0});
  return SparseSignal::from_support(n, support, Vector::Constant(s, x_q));
}

std::vector<CurvePoint> figure3(const ExperimentConfig& c) {
  std::vector<CurvePoint> out;
  for (double cn_db : c.c_n_db) {
    const double c_n = from_db(cn_db);
    const std::string id = "gamma_cn=" + db_label(cn_db) + "dB";
    std::vector<double> xs = c.grid;
    const double t_db = 10.0 * std::log10(transition_ce(c_n));
    xs.insert(std::upper_bound(xs.begin(), xs.end(), t_db), t_db);
    for (double ce_db : xs) {
      out.push_back({ce_db, id, gamma_approx(from_db(ce_db), c_n, c.s), 0.0});
    }
  }
  for (double cn_db : c.c_n_db) {
    const double c_e = transition_ce(from_db(cn_db));
    out.push_back({10.0 * std::log10(c_e), "transition_cn=" + db_label(cn_db) + "dB",
                   gamma_approx(c_e, from_db(cn_db), c.s), 0.0});
  }
  return out;
}

std::vector<CurvePoint> figure4(const ExperimentConfig& c) {
  const auto points = static_cast<std::int64_t>(c.grid.size());
  const std::int64_t total = points * c.trials;
  const std::size_t curves = c.c_n_db.size();
  struct Sample {
    double gamma, lower, upper;
  };
  std::vector<Sample> samples(static_cast<std::size_t>(total) * curves);
  parallel_chunks(total, ParallelOptions{c.threads, 1},
                  [&](std::int64_t, std::int64_t begin, std::int64_t end) {
    for (std::int64_t t = begin; t < end; ++t) {
      const std::int64_t g = t / c.trials;
      const std::int64_t k = t % c.trials;
      auto rng = RandomStream::derive(sub_seed(c.seed, static_cast<std::uint64_t>(g)),
                                      static_cast<std::uint64_t>(k));
      const SupportInstance inst = draw_support_instance(c.m, c.s, rng);
      const RipConstants rip = rip_constants(inst.A_S, c.s);
      for (std::size_t j = 0; j < curves; ++j) {
        const ProblemModel model =
            model_at_levels(inst, from_db(c.grid[static_cast<std::size_t>(g)]), from_db(c.c_n_db[j]));
        const double gamma = ccrb_maximal(model, inst.x).gamma_ccrb;
        const GammaBounds b = gamma_bounds(rip, noise_levels(model, inst.x), c.s);
        samples[static_cast<std::size_t>(t) * curves + j] = {gamma, b.lower, b.upper};
      }
    }
  });

  std::vector<CurvePoint> out;
  for (std::size_t j = 0; j < curves; ++j) {
    const std::string tag = "_cn=" + db_label(c.c_n_db[j]) + "dB";
    for (std::int64_t g = 0; g < points; ++g) {
      const double x = c.grid[static_cast<std::size_t>(g)];
      out.push_back({x, "approx" + tag, gamma_approx(from_db(x), from_db(c.c_n_db[j]), c.s), 0.0});
      for (std::int64_t k = 0; k < c.trials; ++k) {
        const Sample& smp = samples[static_cast<std::size_t>(g * c.trials + k) * curves + j];
        out.push_back({x, "sim" + tag, smp.gamma, 0.0});
        out.push_back({x, "lower" + tag, smp.lower, 0.0});
        out.push_back({x, "upper" + tag, smp.upper, 0.0});
      }
    }
  }
  return out;
}

std::vector<CurvePoint> figure5(const ExperimentConfig& c) {
  struct Pair {
    double c_e_db, c_n_db;
  };
  std::vector<Pair> pairs;
  for (double cn : c.c_n_db) {
    for (double ce : c.c_e_db) pairs.push_back({ce, cn});
  }
  const auto sizes = static_cast<std::int64_t>(c.s_list.size());
  const std::int64_t total = sizes * c.trials;
  std::vector<double> gamma(static_cast<std::size_t>(total) * pairs.size());
  parallel_chunks(total, ParallelOptions{c.threads, 1},
                  [&](std::int64_t, std::int64_t begin, std::int64_t end) {
    for (std::int64_t t = begin; t < end; ++t) {
      const std::int64_t i = t / c.trials;
      const Index s = c.s_list[static_cast<std::size_t>(i)];
      auto rng = RandomStream::derive(sub_seed(c.seed, static_cast<std::uint64_t>(i)),
                                      static_cast<std::uint64_t>(t % c.trials));
      const SupportInstance inst = draw_support_instance(10 * s, s, rng);
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        const ProblemModel model =
            model_at_levels(inst, from_db(pairs[p].c_e_db), from_db(pairs[p].c_n_db));
        gamma[static_cast<std::size_t>(t) * pairs.size() + p] =
            ccrb_maximal(model, inst.x).gamma_ccrb;
      }
    }
  });

  std::vector<CurvePoint> out;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const std::string tag =
        "_ce=" + db_label(pairs[p].c_e_db) + "dB_cn=" + db_label(pairs[p].c_n_db) + "dB";
    for (std::int64_t i = 0; i < sizes; ++i) {
      const Index s = c.s_list[static_cast<std::size_t>(i)];
      const auto x = static_cast<double>(s);
      double sum = 0.0, sum_sq = 0.0;
      for (std::int64_t k = 0; k < c.trials; ++k) {
        const double v = gamma[static_cast<std::size_t>(i * c.trials + k) * pairs.size() + p];
        out.push_back({x, "sim" + tag, v, 0.0});
        sum += v;
        sum_sq += v * v;
      }
      const auto count = static_cast<double>(c.trials);
      const double mean = sum / count;
      const double var = c.trials > 1 ? std::max(0.0, (sum_sq - count * mean * mean) / (count - 1.0)) : 0.0;
      out.push_back({x, "mean" + tag, mean, std::sqrt(var / count)});
      out.push_back({x, "approx" + tag,
                     gamma_approx(from_db(pairs[p].c_e_db), from_db(pairs[p].c_n_db), s), 0.0});
    }
  }
  return out;
}

std::vector<CurvePoint> figure6(const ExperimentConfig& c) {
  std::vector<CurvePoint> out;
  for (Index s : c.s_list) {
    const Index n = 10 * s;
    const SparseSignal x = leading_signal(n, s, *c.x_q);
    for (double se2 : c.grid) {
      const ProblemModel model(SensingMatrix::identity(n), std::sqrt(se2), *c.sigma_n, s);
      out.push_back({se2, "s=" + std::to_string(s),
                     d_hcrb(model, x) / static_cast<double>(n - s), 0.0});
    }
  }
  return out;
}

std::vector<CurvePoint> figure7(const ExperimentConfig& c) {
  std::vector<CurvePoint> out;
  for (double se : c.sigma_e_list) {
    for (double xq : c.grid) {
      const ProblemModel model(SensingMatrix::identity(c.n), se, *c.sigma_n, c.s);
      out.push_back({xq, "sigma_e=" + number_label(se), d_hcrb(model, leading_signal(c.n, c.s, xq)), 0.0});
    }
  }
  return out;
}

SparseSignal config_signal(const ExperimentConfig& c, std::optional<double> x_q = {}) {
  if (!c.x.empty() && !x_q) {
    return SparseSignal(Eigen::Map<const Vector>(c.x.data(), static_cast<Index>(c.x.size())));
  }
  return leading_signal(c.n, c.s, x_q.value_or(*c.x_q));
}

TrialOptions trial_options(const ExperimentConfig& c) {
  TrialOptions options;
  options.parallel.threads = c.threads;
  return options;
}

std::vector<CurvePoint> figure_estimators(const ExperimentConfig& c) {
  const SparseSignal x = config_signal(c);
  const std::vector<EstimatorSpec> estimators = {MaximumLikelihoodEstimator{c.s},
                                                 LocallyUnbiasedEstimator{x}};
  std::vector<CurvePoint> out;
  for (std::size_t k = 0; k < c.sigma_e_list.size(); ++k) {
    const double se = c.sigma_e_list[k];
    const auto rows = sweep(
        [&](double sn) { return ProblemModel(SensingMatrix::identity(c.n), se, sn, c.s); },
        [&](double) { return x; }, estimators, c.grid, c.trials, sub_seed(c.seed, k),
        trial_options(c));
    const std::string tag = "_sigma_e=" + number_label(se);
    for (const SweepRow& row : rows) {
      if (row.estimator_index == 0u) {
        out.push_back({row.grid_value, "hcrb" + tag, row.hcrb, 0.0});
        out.push_back({row.grid_value, "ccrb" + tag, row.ccrb, 0.0});
      }
      out.push_back({row.grid_value, row.estimator + tag, row.summary->mse,
                     row.summary->std_error_mse});
    }
  }
  return out;
}

std::vector<CurvePoint> table1(const ExperimentConfig& c) {
  const ProblemModel model(SensingMatrix::identity(c.n), *c.sigma_e, *c.sigma_n, c.s);
  const SparseSignal x = config_signal(c);
  const auto options = trial_options(c);
  const auto ls = run_trials(model, x, MaximumLikelihoodEstimator{c.s}, c.trials, c.seed, options);
  const auto ne = run_trials(model, x, NoiseExploitingEstimator{}, c.trials, c.seed, options);
  const auto n = static_cast<double>(c.n);
  return {
      {n, "least_squares_theoretical", oracle_mse_theoretical(model, x.support(), x), 0.0},
      {n, "least_squares_empirical", ls.mse, ls.std_error_mse},
      {n, "noise_exploiting_empirical", ne.mse, ne.std_error_mse},
  };
}

template <typename T>
void take(T& into, const T& from) {
  if constexpr (requires { from.empty(); }) {
    if (!from.empty()) into = from;
  } else if constexpr (requires { from.has_value(); }) {
    if (from) into = from;
  } else {
    if (from != T{}) into = from;
  }
}

}  // namespace

std::span<const std::string_view> experiment_ids() { return kIds; }

std::string canonical_experiment_id(std::string_view id) {
  if (id == "hcrb-sweep") return "fig6";
  if (id == "xq-sweep") return "fig7";
  for (auto known : kIds) {
    if (known == id) return std::string(id);
  }
  invalid("unknown experiment '" + std::string(id) + "'");
}

ExperimentConfig default_config(std::string_view raw_id) {
  ExperimentConfig c;
  c.id = canonical_experiment_id(raw_id);
  c.trials = 1;
  if (c.id == "fig3") {
    c.s = 10;
    c.grid = linear_grid(-20.0, 20.0, 81);
    c.c_n_db = {-kInf, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0};
  } else if (c.id == "fig4") {
    c.s = 10;
    c.n = 20 * c.s;
    c.m = 10 * c.s;
    c.grid = linear_grid(-20.0, 20.0, 17);
    c.c_n_db = {-kInf, -5.0, 15.0};
    c.trials = 20;
  } else if (c.id == "fig5") {
    c.s_list = {3, 10, 30, 100, 300};
    c.c_e_db = {-15.0, -5.0, 5.0};
    c.c_n_db = {-kInf, -15.0, -5.0};
    c.trials = 10;
  } else if (c.id == "fig6") {
    c.s_list = {1, 3, 10, 30, 100};
    c.sigma_n = 0.1;
    c.x_q = 1000.0;
    c.grid = log_grid(1e-4, 1e2, 25);
  } else if (c.id == "fig7") {
    c.s = 1;
    c.n = c.m = 10;
    c.sigma_n = 0.1;
    c.sigma_e_list = {0.01, 0.1, 0.5, 1.0, 2.0};
    c.grid = log_grid(1e-3, 1e3, 61);
  } else if (c.id == "fig-estimators") {
    c.s = 1;
    c.n = c.m = 5;
    c.x_q = 1.0;
    c.sigma_e_list = {0.1, 1.0};
    c.grid = log_grid(1e-3, 10.0, 25);
    c.trials = 10000;
  } else if (c.id == "table1") {
    c.s = 1;
    c.n = c.m = 10000;
    c.x_q = 1.0;
    c.sigma_e = 0.01;
    c.sigma_n = 0.0;
    c.trials = 10000;
  } else {
    c.s = 1;
    c.n = c.m = 5;
    c.x_q = 1.0;
    c.sigma_e = 0.1;
    c.sigma_n = 0.1;
    c.grid_parameter = "sigma_n";
    c.matrix = "identity";
    c.grid = log_grid(1e-3, 10.0, 25);
    c.estimators = {"oracle", "ml"};
    c.trials = 10000;
  }
  return c;
}

ExperimentConfig resolve_config(const ExperimentConfig& o) {
  ExperimentConfig c = default_config(o.id);
  take(c.n, o.n);
  take(c.m, o.m);
  take(c.s, o.s);
  take(c.sigma_e, o.sigma_e);
  take(c.sigma_n, o.sigma_n);
  take(c.x_q, o.x_q);
  take(c.grid, o.grid);
  take(c.c_n_db, o.c_n_db);
  take(c.c_e_db, o.c_e_db);
  take(c.s_list, o.s_list);
  take(c.sigma_e_list, o.sigma_e_list);
  take(c.grid_parameter, o.grid_parameter);
  take(c.matrix, o.matrix);
  take(c.x, o.x);
  take(c.estimators, o.estimators);
  take(c.trials, o.trials);
  c.seed = o.seed;
  c.threads = o.threads;
  if (!c.x.empty() && o.n == 0) c.n = static_cast<Index>(c.x.size());
  const bool square = c.id == "fig7" || c.id == "fig-estimators" || c.id == "table1" ||
                      (c.id == "custom" && c.matrix == "identity");
  if (square && o.m == 0) c.m = c.n;
  validate(c);
  return c;
}

void validate(const ExperimentConfig& c) {
  canonical_experiment_id(c.id);
  if (c.trials < 1) invalid("trials must be >= 1");
  const bool gridded = c.id != "table1" && c.id != "fig5";
  if (gridded && c.grid.empty()) invalid("grid must be nonempty");
  for (double v : c.grid) {
    if (!std::isfinite(v)) invalid("grid values must be finite");
  }
  if ((c.id == "fig3" || c.id == "fig4" || c.id == "fig5") && c.c_n_db.empty()) {
    invalid("c_n grid must be nonempty");
  }
  if (c.id == "fig5" && (c.c_e_db.empty() || c.s_list.empty())) {
    invalid("fig5 needs c_e levels and sparsities");
  }
  if (c.id == "fig6" && c.s_list.empty()) invalid("fig6 needs sparsities");
  if ((c.id == "fig7" || c.id == "fig-estimators") && c.sigma_e_list.empty()) {
    invalid("sigma_e list must be nonempty");
  }
  for (Index s : c.s_list) {
    if (s < 1) invalid("sparsities must be positive");
  }
  const bool sized = c.id != "fig5" && c.id != "fig6";
  if (sized) {
    if (c.s < 1) invalid("s must be >= 1");
    if (c.id != "fig3" && (c.n < c.s || c.m < 1)) invalid("need 1 <= s <= n and m >= 1");
  }
  if (c.id == "fig4" && c.m <= c.s) invalid("fig4 needs m > s");
  if (!c.x.empty() && static_cast<Index>(c.x.size()) != c.n) invalid("x length != n");
  if (c.id == "custom") {
    if (c.grid_parameter != "sigma_n" && c.grid_parameter != "sigma_e" &&
        c.grid_parameter != "x_q") {
      invalid("grid parameter must be sigma_n, sigma_e or x_q");
    }
    if (c.matrix != "identity" && c.matrix != "gaussian") {
      invalid("matrix must be identity or gaussian");
    }
    if (c.matrix == "identity" && c.m != c.n) invalid("identity matrix needs m = n");
    if (c.grid_parameter == "x_q" && !c.x.empty()) invalid("x_q sweep builds x itself");
  }
}

std::vector<CurvePoint> run_figure(const ExperimentConfig& c) {
  validate(c);
  if (c.id == "fig3") return figure3(c);
  if (c.id == "fig4") return figure4(c);
  if (c.id == "fig5") return figure5(c);
  if (c.id == "fig6") return figure6(c);
  if (c.id == "fig7") return figure7(c);
  if (c.id == "fig-estimators") return figure_estimators(c);
  if (c.id == "table1") return table1(c);
  invalid("'custom' is run through the simulate command");
}

SimulationResult run_simulation(const ExperimentConfig& c) {
  validate(c);
  const std::string& p = c.grid_parameter;
  std::optional<SensingMatrix> gaussian;
  if (c.matrix == "gaussian") {
    RandomStream rng(splitmix64(c.seed ^ 0x6d61747269780000ULL));
    gaussian = SensingMatrix(generate_gaussian_matrix(c.m, c.n, rng));
  }
  const auto make_model = [&](double v) {
    const double se = p == "sigma_e" ? v : *c.sigma_e;
    const double sn = p == "sigma_n" ? v : *c.sigma_n;
    return gaussian ? ProblemModel(*gaussian, se, sn, c.s)
                    : ProblemModel(SensingMatrix::identity(c.n), se, sn, c.s);
  };
  const auto make_signal = [&](double v) {
    return p == "x_q" ? config_signal(c, v) : config_signal(c);
  };

  SimulationResult result;
  result.grid_parameter = p;
  result.estimator_labels = c.estimators;
  std::vector<EstimatorSpec> specs;
  const ProblemModel first = make_model(c.grid.front());
  for (const auto& name : c.estimators) {
    specs.push_back(parse_estimator(name, first, make_signal(c.grid.front())));
  }
  if (p == "x_q") {
    for (std::size_t i = 0; i < specs.size(); ++i) {
      if (std::holds_alternative<LocallyUnbiasedEstimator>(specs[i]) ||
          std::holds_alternative<OracleEstimator>(specs[i])) {
        invalid("estimator '" + c.estimators[i] + "' is tied to one signal; use another grid");
      }
    }
  }
  result.rows = sweep(make_model, make_signal, specs, c.grid, c.trials, c.seed, trial_options(c));
  for (auto& row : result.rows) {
    if (row.estimator_index) row.estimator = c.estimators[*row.estimator_index];
  }
  return result;
}

CsvTable curves_to_csv(std::span<const CurvePoint> points) {
  CsvTable t;
  t.header = {"x_value", "curve_id", "value", "std_error"};
  for (const auto& pt : points) {
    t.rows.push_back({format_double(pt.x_value), pt.curve_id, format_double(pt.value),
                      format_double(pt.std_error)});
  }
  return t;
}

CsvTable simulation_to_csv(const SimulationResult& r) {
  CsvTable t;
  t.header = {"grid_parameter", "grid_value", "estimator", "trials", "failed", "mse",
              "std_error_mse", "bias_norm", "ccrb", "hcrb", "oracle_mse", "relative_gap",
              "biased_regime"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const SweepRow& row : r.rows) {
    std::vector<std::string> fields = {r.grid_parameter, format_double(row.grid_value)};
    if (row.summary) {
      const TrialSummary& s = *row.summary;
      const double bound = std::isfinite(row.hcrb) ? row.hcrb : row.ccrb;
      const bool biased = std::isfinite(bound) && s.mse + 3.0 * s.std_error_mse < bound;
      fields.insert(fields.end(),
                    {row.estimator, std::to_string(s.trials), std::to_string(s.failed),
                     format_double(s.mse), format_double(s.std_error_mse),
                     format_double(s.bias.norm()), format_double(row.ccrb),
                     format_double(row.hcrb), format_double(row.oracle_mse),
                     format_double((s.mse - row.oracle_mse) / row.oracle_mse),
                     biased ? "true" : "false"});
    } else {
      fields.insert(fields.end(), {"none", "0", "0", format_double(nan), format_double(nan),
                                   format_double(nan), format_double(row.ccrb),
                                   format_double(row.hcrb), format_double(row.oracle_mse),
                                   format_double(nan), "false"});
    }
    t.rows.push_back(std::move(fields));
  }
  return t;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) invalid("slope fit needs >= 2 paired points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) invalid("log-log fit needs positive data");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) invalid("slope fit needs distinct x values");
  return sxy / sxx;
}

double from_db(double db) { return db == -kInf ? 0.0 : std::pow(10.0, db / 10.0); }

std::string db_label(double db) { return db == -kInf ? "-inf" : number_label(db); }

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi >= lo) || points == 0) invalid("bad log grid");
  if (points == 1) return {lo};
  std::vector<double> g(points);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (!(hi >= lo) || points == 0) invalid("bad linear grid");
  if (points == 1) return {lo};
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return g;
}

}  // namespace sparsebound
