#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sparsebound/csv.hpp"
#include "sparsebound/model.hpp"
#include "sparsebound/montecarlo.hpp"

namespace sparsebound {

/// One plotted point. Curves are told apart by `curve_id`.
struct CurvePoint {
  double x_value = 0.0;
  std::string curve_id;
  double value = 0.0;
  double std_error = 0.0;
};

inline constexpr std::uint64_t kDefaultSeed = 20240501;

/// Protocol parameters. Zero / empty fields are filled from the defaults of
/// the experiment id by `default_config`.
struct ExperimentConfig {
  std::string id;  // fig3 fig4 fig5 fig6 fig7 fig-estimators table1 custom

  Index n = 0;
  Index m = 0;
  Index s = 0;
  std::optional<double> sigma_e;
  std::optional<double> sigma_n;
  std::optional<double> x_q;

  std::vector<double> grid;          // x axis
  std::vector<double> c_n_db;        // fig3 fig4 fig5 (-inf allowed)
  std::vector<double> c_e_db;        // fig5
  std::vector<Index> s_list;         // fig5 fig6
  std::vector<double> sigma_e_list;  // fig7 fig-estimators

  // custom sweeps
  std::string grid_parameter;         // sigma_n | sigma_e | x_q
  std::string matrix;                 // identity | gaussian
  std::vector<double> x;              // true signal; empty: [x_q, .., x_q (s), 0, ..]
  std::vector<std::string> estimators;

  std::int64_t trials = 0;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
};

/// Names accepted by `default_config` / `run_figure`, in canonical form.
std::span<const std::string_view> experiment_ids();

/// Maps the aliases hcrb-sweep and xq-sweep to fig6 and fig7.
std::string canonical_experiment_id(std::string_view id);

/// Defaults for `id` with every field of `overrides` that is set taking
/// precedence. Throws invalid_input for an unknown id or an invalid result.
ExperimentConfig resolve_config(const ExperimentConfig& overrides);
ExperimentConfig default_config(std::string_view id);
void validate(const ExperimentConfig& config);

/// Figure data (fig3 .. fig-estimators, table1).
std::vector<CurvePoint> run_figure(const ExperimentConfig& config);

/// custom sweep of estimators against the bounds.
struct SimulationResult {
  std::string grid_parameter;
  std::vector<std::string> estimator_labels;
  std::vector<SweepRow> rows;
};
SimulationResult run_simulation(const ExperimentConfig& config);

CsvTable curves_to_csv(std::span<const CurvePoint> points);
CsvTable simulation_to_csv(const SimulationResult& result);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// 10^(db / 10); -inf maps to 0.
double from_db(double db);
/// Short label of a dB level, e.g. "-5" or "-inf".
std::string db_label(double db);

/// n points from lo to hi, equally spaced in log scale.
std::vector<double> log_grid(double lo, double hi, std::size_t points);
std::vector<double> linear_grid(double lo, double hi, std::size_t points);

}  // namespace sparsebound
