// Runs the twelve acceptance checks and prints one PASS/FAIL line each.
// Exit status is nonzero when any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../../tools/cli.hpp"
#include "oracles.hpp"
#include "sparsebound/ccrb.hpp"
#include "sparsebound/error.hpp"
#include "sparsebound/experiments.hpp"
#include "sparsebound/fisher.hpp"
#include "sparsebound/hcrb.hpp"
#include "sparsebound/montecarlo.hpp"

using namespace sparsebound;

namespace {

// Pinned tolerances.
constexpr double kFimRelFrobenius = 0.02;
constexpr double kFimSeconds = 30.0;
constexpr double kSigmas = 3.0;
constexpr double kSlopeLow = -1.25;
constexpr double kSlopeHigh = -0.75;
constexpr double kSlopeSeconds = 300.0;
constexpr double kTransitionTol = 1e-12;
constexpr double kGapClosure = 1e-3;
constexpr double kRecoveryIdentity = 1e-3;
constexpr double kRecoveryRandom = 1e-2;
constexpr double kLsLow = 0.9e-4, kLsHigh = 1.1e-4;
constexpr double kNeLow = 4.5e-5, kNeHigh = 5.5e-5;
constexpr double kTableSeconds = 120.0;
constexpr double kTransitionRatio = 10.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

Outcome fim_equivalence() {
  RandomStream rng(101);
  const Matrix A = generate_gaussian_matrix(4, 6, rng);
  const SparseSignal x = generate_bernoulli_signal(6, 2, rng);
  const ProblemModel model(A, 0.3, 0.5, 2);
  const auto start = std::chrono::steady_clock::now();
  const FisherMatrix mc = fim_monte_carlo(model, x, 1'000'000, 7, ParallelOptions{1, 4096});
  const double elapsed = seconds_since(start);
  const Matrix J = fim_closed_form(model, x).J;
  const double err = (mc.J - J).norm() / J.norm();
  return {err < kFimRelFrobenius && elapsed < kFimSeconds,
          fmt("relative Frobenius error %.4f, %.2f s single-threaded", err, elapsed)};
}

Outcome oracle_mse() {
  Outcome o;
  int instances = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RandomStream rng(200 + seed);
    const Matrix A = generate_gaussian_matrix(10, 20, rng);
    const SparseSignal x = generate_bernoulli_signal(20, 3, rng);
    const ProblemModel model(A, 0.1 * static_cast<double>(seed), 0.3, 3);
    const TrialSummary r = run_trials(model, x, OracleEstimator{x.support()}, 100'000, seed);
    const double expected = oracle_mse_theoretical(model, x.support(), x);
    const double z = std::abs(r.mse - expected) / r.std_error_mse;
    worst = std::max(worst, z);
    if (z > kSigmas || ccrb_maximal(model, x).bound > r.mse) o.pass = false;
    ++instances;
  }
  o.detail = fmt("%d instances, worst deviation %.2f standard errors, CCRB below every MSE: %s",
                 instances, worst, o.pass ? "yes" : "no");
  return o;
}

Outcome sandwich() {
  int inside_exact = 0, inside_sampled = 0;
  RandomStream rng(300);
  RipOptions exhaustive;
  exhaustive.mode = RipOptions::Mode::exhaustive;
  for (int t = 0; t < 20; ++t) {
    const Matrix A = generate_gaussian_matrix(8, 12, rng);
    const SparseSignal x = generate_bernoulli_signal(12, 2, rng);
    const ProblemModel model(A, 0.05 + rng.uniform(), rng.uniform(), 2);
    const GammaBounds b =
        gamma_bounds(rip_constants(A, 2, exhaustive), noise_levels(model, x), 2);
    const double g = ccrb_maximal(model, x).gamma_ccrb;
    if (b.lower <= g && g <= b.upper) ++inside_exact;
  }
  RipOptions sampled;
  sampled.mode = RipOptions::Mode::sampled;
  sampled.samples = 2000;
  for (int t = 0; t < 100; ++t) {
    const Matrix A = generate_gaussian_matrix(100, 200, rng);
    const SparseSignal x = generate_bernoulli_signal(200, 10, rng);
    const ProblemModel model(A, 0.02 + 0.2 * rng.uniform(), rng.uniform(), 10);
    sampled.seed = static_cast<std::uint64_t>(t);
    const GammaBounds b = gamma_bounds(rip_constants(A, 10, sampled), noise_levels(model, x), 10);
    const double g = ccrb_maximal(model, x).gamma_ccrb;
    if (b.lower <= g && g <= b.upper) ++inside_sampled;
  }
  return {inside_exact == 20,
          fmt("exhaustive RIP %d/20 inside; sampled RIP (indicative) %d/100 inside", inside_exact,
              inside_sampled)};
}

Outcome inverse_s_law() {
  ExperimentConfig o;
  o.id = "fig5";
  o.s_list = {3, 10, 30, 100};
  o.c_e_db = {-15.0, -5.0, 5.0};
  o.c_n_db = {-HUGE_VAL, -15.0, -5.0};
  o.trials = 10;
  const auto start = std::chrono::steady_clock::now();
  const auto points = run_figure(resolve_config(o));
  const double elapsed = seconds_since(start);
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> curves;
  for (const auto& p : points) {
    if (p.curve_id.rfind("mean", 0) != 0) continue;
    curves[p.curve_id].first.push_back(p.x_value);
    curves[p.curve_id].second.push_back(p.value);
  }
  double lo = HUGE_VAL, hi = -HUGE_VAL;
  for (const auto& [id, xy] : curves) {
    const double slope = loglog_slope(xy.first, xy.second);
    lo = std::min(lo, slope);
    hi = std::max(hi, slope);
  }
  return {curves.size() == 9 && lo >= kSlopeLow && hi <= kSlopeHigh && elapsed < kSlopeSeconds,
          fmt("%zu (c_e, c_n) pairs, slopes in [%.3f, %.3f], %.1f s", curves.size(), lo, hi,
              elapsed)};
}

Outcome transition_point() {
  double worst = 0.0;
  for (double c_n : {0.0, 0.1, 1.0, 10.0}) {
    for (Index s : {1, 10, 100}) {
      const double v = gamma_approx(transition_ce(c_n), c_n, s);
      worst = std::max(worst, std::abs(v - 0.5 / static_cast<double>(s)));
    }
  }
  const bool half = transition_ce(0.0) == 0.5;
  return {worst <= kTransitionTol && half,
          fmt("max deviation from 1/(2s) %.2e; c_n = 0 gives %.17g", worst, transition_ce(0.0))};
}

Outcome hcrb_ordering() {
  bool ordered = true, closed = true, g_range = true;
  double worst_gap = 0.0;
  const auto grid = log_grid(1e-6, 1.0, 30);
  for (double se : {0.0, 0.05}) {
    const ProblemModel model(SensingMatrix::identity(10), se, 0.1, 2);
    Vector base = Vector::Zero(10);
    base(0) = 1.0;
    for (double xq : grid) {
      Vector v = base;
      v(5) = xq;
      const SparseSignal x(v);
      const HcrbReport h = hcrb_unit_closed_form(model, x);
      if (h.bound < ccrb_maximal(model, x).bound) ordered = false;
      if (!(h.g_beta >= 0.0 && h.g_beta < 1.0)) g_range = false;
    }
    Vector v = base;
    v(5) = 1e-6;
    const double nonmax = ccrb_nonmaximal(model, SparseSignal(base)).bound;
    const double gap = std::abs(hcrb_unit_closed_form(model, SparseSignal(v)).bound - nonmax) / nonmax;
    worst_gap = std::max(worst_gap, gap);
    if (gap >= kGapClosure) closed = false;
  }
  return {ordered && closed && g_range,
          fmt("HCRB >= CCRB: %s; gap at x_q = 1e-6: %.2e; g in [0,1): %s", ordered ? "yes" : "no",
              worst_gap, g_range ? "yes" : "no")};
}

Outcome ccrb_recovery() {
  const double t = 1e-4;
  const Vector values = (Vector(2) << 0.8, -1.4).finished();
  const SparseSignal x = SparseSignal::from_support(8, {1, 6}, values);
  std::vector<Vector> offsets(2, Vector::Zero(8));
  offsets[0](1) = t;
  offsets[1](6) = t;
  const auto error_for = [&](const ProblemModel& model) {
    const double target = ccrb_maximal(model, x).bound;
    return std::abs(hcrb_general(model, x, offsets).trace - target) / target;
  };
  const double e_identity = error_for(ProblemModel(SensingMatrix::identity(8), 0.2, 0.3, 2));
  RandomStream rng(700);
  const double e_random = error_for(ProblemModel(generate_gaussian_matrix(8, 8, rng), 0.2, 0.3, 2));
  return {e_identity < kRecoveryIdentity && e_random < kRecoveryRandom,
          fmt("relative error %.2e (identity), %.2e (random A)", e_identity, e_random)};
}

Outcome h_oracle() {
  const Matrix A = Matrix::Identity(2, 2);
  const Vector x = (Vector(2) << 0.3, 0.0).finished();
  const std::vector<Vector> offsets{(Vector(2) << 0.2, 0.0).finished(),
                                    (Vector(2) << -0.1, 0.25).finished()};
  const ProblemModel model(SensingMatrix::identity(2), 0.3, 0.5, 2);
  const Matrix H = make_test_point_set(model, SparseSignal(x), offsets).H;
  const oracle::SampledH s = oracle::sample_h(A, x, 0.3, 0.5, offsets, 1'000'000, 800);
  double worst = 0.0;
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) {
      worst = std::max(worst, std::abs(H(i, j) - s.mean(i, j)) / s.std_error(i, j));
    }
  }
  return {worst <= kSigmas, fmt("worst entry deviation %.2f standard errors", worst)};
}

Outcome table_one() {
  ExperimentConfig o;
  o.id = "table1";
  const auto start = std::chrono::steady_clock::now();
  const auto points = run_figure(resolve_config(o));
  const double elapsed = seconds_since(start);
  std::map<std::string, double> row;
  for (const auto& p : points) row[p.curve_id] = p.value;
  const double theory = row.at("least_squares_theoretical");
  const double ls = row.at("least_squares_empirical");
  const double ne = row.at("noise_exploiting_empirical");
  return {std::abs(theory - 1e-4) < 1e-16 && ls >= kLsLow && ls <= kLsHigh && ne >= kNeLow &&
              ne <= kNeHigh && elapsed < kTableSeconds,
          fmt("theoretical %.4e, least squares %.4e, noise-exploiting %.4e, %.1f s", theory, ls,
              ne, elapsed)};
}

Outcome transition_regime() {
  ExperimentConfig o;
  o.id = "fig6";
  const auto points = run_figure(resolve_config(o));
  std::map<std::string, std::vector<double>> curves;
  for (const auto& p : points) curves[p.curve_id].push_back(p.value);
  bool pass = curves.size() == 5;
  double weakest = HUGE_VAL;
  for (const auto& [id, v] : curves) {
    const double ratio = v.back() / v.front();
    weakest = std::min(weakest, ratio);
    if (!(ratio >= kTransitionRatio)) pass = false;
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] < v[i - 1]) pass = false;
    }
  }
  return {pass, fmt("%zu curves, smallest ratio between sigma_e^2 = 1e2 and 1e-4: %.3g",
                    curves.size(), weakest)};
}

Outcome estimators_vs_bound() {
  const Index n = 5;
  Vector v = Vector::Zero(n);
  v(0) = 1.0;
  const SparseSignal x(v);
  const auto grid = log_grid(1e-3, 10.0, 25);
  const std::vector<EstimatorSpec> specs{LocallyUnbiasedEstimator{x}, MaximumLikelihoodEstimator{1}};
  const auto rows = sweep(
      [&](double sn) { return ProblemModel(SensingMatrix::identity(n), 0.1, sn, 1); },
      [&](double) { return x; }, specs, grid, 100'000, kDefaultSeed);
  bool bounded = true;
  int ml_below = 0;
  double worst = HUGE_VAL;
  for (const auto& row : rows) {
    const TrialSummary& s = *row.summary;
    if (*row.estimator_index == 0) {
      const double margin = (s.mse - row.hcrb) / s.std_error_mse;
      worst = std::min(worst, margin);
      if (s.mse < row.hcrb - kSigmas * s.std_error_mse) bounded = false;
    } else if (row.grid_value >= 1.0 && s.mse < row.hcrb) {
      ++ml_below;
    }
  }
  return {bounded && ml_below > 0,
          fmt("locally unbiased: min (MSE - HCRB)/se = %.2f; ML below HCRB at %d large-noise points",
              worst, ml_below)};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sparsebound_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::vector<std::vector<std::string>> commands{
      {"figure", "fig3"},
      {"figure", "fig4"},
      {"figure", "fig5", "--s-list", "3,10,30"},
      {"figure", "fig6"},
      {"figure", "fig7"},
      {"figure", "fig-estimators", "--trials", "2000"},
      {"figure", "table1", "--trials", "1000"}};
  int identical = 0;
  for (const auto& base : commands) {
    std::string text[2];
    for (int run = 0; run < 2; ++run) {
      auto args = base;
      args.insert(args.end(), {"--out-dir", dir.string(), "--out", "run" + std::to_string(run) + ".csv",
                               "--threads", run == 0 ? "1" : "4"});
      std::ostringstream out, err;
      if (cli::run(args, out, err) != 0) break;
      std::ifstream in(dir / ("run" + std::to_string(run) + ".csv"), std::ios::binary);
      std::ostringstream buffer;
      buffer << in.rdbuf();
      text[run] = buffer.str();
    }
    if (!text[0].empty() && text[0] == text[1]) ++identical;
  }
  fs::remove_all(dir);
  return {identical == static_cast<int>(commands.size()),
          fmt("%d/%zu figure commands byte-identical across two runs (1 and 4 threads)", identical,
              commands.size())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"FIM closed form vs Monte Carlo", fim_equivalence},
      {"oracle estimator MSE", oracle_mse},
      {"gamma sandwich", sandwich},
      {"inverse-s law", inverse_s_law},
      {"transition point", transition_point},
      {"HCRB ordering and gap closure", hcrb_ordering},
      {"CCRB recovery from support offsets", ccrb_recovery},
      {"H matrix vs sampling", h_oracle},
      {"table1 reproduction", table_one},
      {"HCRB transition regime", transition_regime},
      {"estimators vs HCRB", estimators_vs_bound},
      {"determinism", determinism}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << (i + 1) << ' ' << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
