#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "sparsebound/ccrb.hpp"
#include "sparsebound/csv.hpp"
#include "sparsebound/error.hpp"
#include "sparsebound/experiments.hpp"
#include "sparsebound/hcrb.hpp"

namespace sparsebound::cli {

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string out_dir = ".";
  std::string out;
  std::string format = "csv";
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
  std::int64_t trials = 0;
  Index n = 0, m = 0, s = 0;
  std::optional<double> sigma_e, sigma_n, x_q;
  std::vector<std::string> x;  // comma-split pieces of --x
  std::string matrix;
  std::vector<double> grid, cn_db, ce_db, sigma_e_list;
  std::vector<Index> s_list;
  std::string grid_parameter;
  std::vector<std::string> estimators;
};

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> values;
  std::string token;
  for (char ch : text + ",") {
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      if (!token.empty()) values.push_back(parse_double(token));
      token.clear();
    } else {
      token.push_back(ch);
    }
  }
  return values;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::filesystem::path resolve(const Options& o, const std::string& path) {
  const std::filesystem::path p(path);
  return p.is_absolute() ? p : std::filesystem::path(o.out_dir) / p;
}

// Inline comma-separated numbers, or the name of a file holding them.
std::vector<double> read_vector(const Options& o, const std::vector<std::string>& pieces) {
  std::string text;
  for (const auto& piece : pieces) text += piece + ",";
  const bool inline_list = text.find_first_not_of("0123456789+-.eE, ") == std::string::npos;
  if (inline_list) return parse_numbers(text);
  if (pieces.size() != 1) throw Error(ErrorCode::invalid_input, "--x: not a list of numbers");
  return parse_numbers(slurp(resolve(o, pieces.front())));
}

Matrix read_matrix_file(const std::filesystem::path& path) {
  std::istringstream in(slurp(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    auto row = parse_numbers(line);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::invalid_input, "matrix file is empty");
  Matrix A(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) {
      throw Error(ErrorCode::invalid_input, "matrix file rows differ in length");
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      A(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return A;
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  const auto path = resolve(o, o.out);
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream file(path, std::ios::binary);
  if (!file || !(file << text) || !file.flush()) {
    throw IoError("cannot write '" + path.string() + "'");
  }
}

std::string to_text(const CsvTable& table) {
  std::ostringstream s;
  write_csv(s, table);
  return s.str();
}

void cmd_bounds(const Options& o, const std::string& kind, std::ostream& out) {
  if (o.x.empty()) throw Error(ErrorCode::invalid_input, "--x is required");
  const std::vector<double> values = read_vector(o, o.x);
  const Index n = o.n ? o.n : static_cast<Index>(values.size());
  if (static_cast<Index>(values.size()) != n) {
    throw Error(ErrorCode::invalid_input, "--x has " + std::to_string(values.size()) +
                                              " entries, --n is " + std::to_string(n));
  }
  const SparseSignal signal(Eigen::Map<const Vector>(values.data(), n));
  const Index s = o.s ? o.s : std::max<Index>(1, signal.sparsity());
  const std::string matrix = o.matrix.empty() ? "identity" : o.matrix;

  SensingMatrix A = SensingMatrix::identity(n);
  if (matrix == "identity") {
    if (o.m && o.m != n) throw Error(ErrorCode::invalid_input, "identity matrix needs m = n");
  } else if (matrix == "gaussian") {
    RandomStream rng(o.seed);
    A = SensingMatrix(generate_gaussian_matrix(o.m ? o.m : n, n, rng));
  } else {
    Matrix dense = read_matrix_file(resolve(o, matrix));
    if (dense.cols() != n || (o.m && dense.rows() != o.m)) {
      throw Error(ErrorCode::invalid_input, "matrix file dimensions do not match --m x --n");
    }
    A = SensingMatrix(std::move(dense));
  }
  const ProblemModel model(std::move(A), o.sigma_e.value_or(0.0), o.sigma_n.value_or(0.0), s);

  nlohmann::ordered_json report;
  if (kind == "ccrb") {
    const CcrbReport r = ccrb(model, signal);
    report = {{"bound", r.bound}, {"first_term", r.first_term}, {"correction", r.d_ccrb},
              {"gamma", r.gamma_ccrb}, {"regime", std::string(to_string(r.regime))}};
  } else {
    const HcrbReport r = hcrb_unit_closed_form(model, signal);
    report = {{"bound", r.bound},
              {"first_term", r.support_part},
              {"correction", r.nonsupport_part},
              {"gamma", r.nonsupport_part / r.support_part},
              {"regime", std::string(to_string(SupportRegime::maximal))},
              {"beta", r.beta},
              {"g_beta", r.g_beta}};
  }

  if (o.format == "json") {
    emit(o, out, report.dump(2) + "\n");
    return;
  }
  CsvTable table;
  table.header = {"bound", "first_term", "correction", "gamma", "regime"};
  std::vector<std::string> row;
  for (const char* key : {"bound", "first_term", "correction", "gamma"}) {
    row.push_back(format_double(report[key].get<double>()));
  }
  row.push_back(report["regime"].get<std::string>());
  table.rows.push_back(std::move(row));
  emit(o, out, to_text(table));
}

ExperimentConfig experiment(const Options& o, const std::string& id) {
  ExperimentConfig c;
  c.id = canonical_experiment_id(id);
  c.n = o.n;
  c.m = o.m;
  c.s = o.s;
  c.sigma_e = o.sigma_e;
  c.sigma_n = o.sigma_n;
  c.x_q = o.x_q;
  c.grid = o.grid;
  c.c_n_db = o.cn_db;
  c.c_e_db = o.ce_db;
  c.s_list = o.s_list;
  c.sigma_e_list = o.sigma_e_list;
  c.grid_parameter = o.grid_parameter;
  c.matrix = o.matrix;
  if (!o.x.empty()) c.x = read_vector(o, o.x);
  c.estimators = o.estimators;
  c.trials = o.trials;
  c.seed = o.seed;
  c.threads = o.threads;
  return resolve_config(c);
}

void cmd_figure(Options o, const std::string& id, std::ostream& out) {
  const ExperimentConfig config = experiment(o, id);
  const auto points = run_figure(config);
  if (o.out.empty()) o.out = config.id + ".csv";
  emit(o, out, to_text(curves_to_csv(points)));
  out << resolve(o, o.out).string() << '\n';
}

void cmd_simulate(const Options& o, std::ostream& out) {
  emit(o, out, to_text(simulation_to_csv(run_simulation(experiment(o, "custom")))));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lower bounds and estimators for sparse recovery under sensing-matrix perturbation",
               "sparsebound"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key = value file; command-line flags take precedence");
  app.allow_config_extras(false);

  Options o;
  app.add_option("--out-dir", o.out_dir, "Base directory for all relative paths")
      ->capture_default_str();
  app.add_option("--out", o.out, "Output file (bounds and simulate default to stdout)");
  app.add_option("--format", o.format, "bounds output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--seed", o.seed, "Master seed")->envname("SPARSEBOUND_SEED")->capture_default_str();
  app.add_option("--threads", o.threads, "Worker threads (0: hardware concurrency)");
  app.add_option("--trials", o.trials, "Monte Carlo trials or random instances per point")
      ->check(CLI::PositiveNumber);
  app.add_option("--n", o.n, "Signal length")->check(CLI::PositiveNumber);
  app.add_option("--m", o.m, "Number of measurements")->check(CLI::PositiveNumber);
  app.add_option("--s", o.s, "Sparsity level")->check(CLI::PositiveNumber);
  app.add_option("--sigma-e", o.sigma_e, "Sensing-matrix perturbation std")->check(CLI::NonNegativeNumber);
  app.add_option("--sigma-n", o.sigma_n, "Measurement noise std")->check(CLI::NonNegativeNumber);
  app.add_option("--x-q", o.x_q, "Amplitude of the nonzero entries of the default signal");
  app.add_option("--x", o.x, "True signal: comma-separated values or a file")->delimiter(',');
  app.add_option("--matrix", o.matrix, "identity | gaussian | path to a CSV matrix file");
  app.add_option("--grid", o.grid, "x-axis values")->delimiter(',');
  app.add_option("--grid-parameter", o.grid_parameter, "simulate: sigma_n | sigma_e | x_q");
  app.add_option("--estimators", o.estimators,
                 "simulate: oracle, ml, least_squares, locally_unbiased, noise_exploiting")
      ->delimiter(',');
  app.add_option("--cn-db", o.cn_db, "c_n levels in dB (-inf allowed)")->delimiter(',');
  app.add_option("--ce-db", o.ce_db, "c_e levels in dB")->delimiter(',');
  app.add_option("--s-list", o.s_list, "Sparsity levels")->delimiter(',');
  app.add_option("--sigma-e-list", o.sigma_e_list, "sigma_e values, one curve each")->delimiter(',');

  std::string bound_kind;
  auto* bounds = app.add_subcommand("bounds", "Evaluate the CCRB or the unit-matrix HCRB");
  bounds->add_option("kind", bound_kind, "ccrb | hcrb")
      ->required()
      ->check(CLI::IsMember({"ccrb", "hcrb"}));
  bounds->fallthrough();

  std::string figure_id;
  auto* figure = app.add_subcommand("figure", "Write the data of one figure or table as CSV");
  figure->add_option("id", figure_id, "fig3 fig4 fig5 fig6|hcrb-sweep fig7|xq-sweep fig-estimators table1")
      ->required();
  figure->fallthrough();

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo sweep of estimators against the bounds");
  simulate->fallthrough();

  std::vector<std::string> argv_storage{"sparsebound"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*bounds) cmd_bounds(o, bound_kind, out);
    if (*figure) cmd_figure(o, figure_id, out);
    if (*simulate) cmd_simulate(o, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return e.code() == ErrorCode::invalid_input ? kExitUsage : kExitMath;
  } catch (const IoError& e) {
    err << "error (io): " << e.what() << '\n';
    return kExitIo;
  } catch (const std::ios_base::failure& e) {
    err << "error (io): " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace sparsebound::cli
