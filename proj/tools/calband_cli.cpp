// calband: calibration bands for binary-outcome predictions.
//
//   calband band predictions.csv --format json --plot band.svg
//   calband simulate --family monomial --s 0.5 --n 512 --reps 200
//   calband simulate --paper-table iso --cells s=1.0:n=2048,s=0.5:n=2048

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "calband/analysis.hpp"
#include "calband/io.hpp"
#include "calband/simulation.hpp"

namespace {

using namespace calband;

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BandArgs {
  std::string input;
  double alpha = 0.05;
  std::string method = "nc";
  std::string family = "rounded";
  std::int64_t grid = 1000;
  bool no_extrapolate = false;
  bool general_covariates = false;
  std::string format = "csv";
  std::string output;
  std::string plot;
  std::string zoom;
  std::string title;
  std::size_t hl_bins = 10;
};

struct SimulateArgs {
  std::string config_path;
  std::string family;
  double shape = 0.5;
  std::size_t n = 512;
  double alpha = 0.05;
  std::string method = "raw";
  std::string grid = "1000";
  std::size_t reps = 200;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string output;
  std::string summary;
  std::string paper_table;
  std::string cells;
};

// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::pair<double, double> parse_zoom(const std::string& text) {
  const auto comma = text.find(',');
  double a = 0.0;
  double b = 0.0;
  try {
    if (comma == std::string::npos) throw std::invalid_argument(text);
    a = std::stod(text.substr(0, comma));
    b = std::stod(text.substr(comma + 1));
  } catch (const std::exception&) {
    throw UsageError("--zoom expects a,b with a < b, got '" + text + "'");
  }
  if (!(a < b)) throw UsageError("--zoom expects a,b with a < b, got '" + text + "'");
  return {a, b};
}

int run_band(const BandArgs& args) {
  AnalysisOptions options;
  options.alpha = args.alpha;
  try {
    options.method = parse_band_method(args.method);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (args.family == "full") {
    options.grid = 0;
  } else if (args.family == "rounded") {
    if (args.grid < 1) throw UsageError("--K must be at least 1");
    options.grid = args.grid;
  } else {
    throw UsageError("--index-family must be 'full' or 'rounded'");
  }
  options.extrapolate = !args.no_extrapolate;
  options.unit_domain = !args.general_covariates;
  options.hl_bins = args.hl_bins;
  std::optional<std::pair<double, double>> zoom;
  if (!args.zoom.empty()) zoom = parse_zoom(args.zoom);

  const PredictionTable table = read_predictions_file(args.input, options.unit_domain);
  for (const auto& w : table.warnings) std::cerr << "warning: " << w << '\n';

  const AnalysisResult result = analyze(build_sorted_data(table.rows), options);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';

  Metadata meta = {{"tool", "calband"},
                   {"version", CALBAND_VERSION},
                   {"command", "band"},
                   {"input", input_label(args.input)},
                   {"alpha", format_number(options.alpha)},
                   {"method", std::string(to_string(options.method))},
                   {"index_family", options.grid > 0 ? "rounded" : "full"},
                   {"K", options.grid > 0 ? std::to_string(options.grid) : "none"},
                   {"extrapolate", options.extrapolate ? "true" : "false"},
                   {"hl_bins", std::to_string(options.hl_bins)}};

  std::ostringstream body;
  if (args.format == "json") {
    body << report_json(result, meta).dump(2) << '\n';
  } else {
    Metadata header = meta;
    header.emplace_back("n", std::to_string(result.data.size()));
    if (result.verdict) {
      header.emplace_back("classical_reject", result.verdict->classical_reject ? "true" : "false");
      header.emplace_back("epsilon_certificate", format_number(result.verdict->epsilon_certificate));
      header.emplace_back("calibration_radius", format_number(result.verdict->calibration_radius));
    }
    header.emplace_back("isotonicity_p_value", format_number(result.isotonicity.p_value));
    header.emplace_back("gamma_hat", format_number(result.isotonicity.gamma_hat));
    if (result.hosmer_lemeshow) {
      header.emplace_back("hl_statistic", format_number(result.hosmer_lemeshow->statistic));
      header.emplace_back("hl_p_value", format_number(result.hosmer_lemeshow->p_value));
    }
    write_band_csv(body, result.band, result.fit, header);
  }
  emit(args.output, body.str());

  if (!args.plot.empty()) {
    SvgOptions svg;
    svg.extrapolate = options.extrapolate;
    svg.title = args.title;
    if (zoom) {
      svg.zoom_lo = zoom->first;
      svg.zoom_hi = zoom->second;
    } else if (!options.unit_domain) {
      svg.zoom_lo = std::min(0.0, result.band.knots.front());
      svg.zoom_hi = std::max(1.0, result.band.knots.back());
    }
    emit(args.plot, render_svg(result, svg));
  }
  return 0;
}

struct Cell {
  double shape;
  std::size_t n;
};

std::vector<Cell> parse_cells(const std::string& text) {
  std::vector<Cell> cells;
  std::stringstream list(text);
  std::string item;
  while (std::getline(list, item, ',')) {
    if (item.empty()) continue;
    std::optional<double> s;
    std::optional<std::size_t> n;
    std::stringstream parts(item);
    std::string part;
    while (std::getline(parts, part, ':')) {
      const auto eq = part.find('=');
      if (eq == std::string::npos) throw UsageError("cell '" + item + "' must look like s=1.0:n=2048");
      const std::string key = part.substr(0, eq);
      const std::string value = part.substr(eq + 1);
      try {
        std::size_t used = 0;
        if (key == "s") {
          s = std::stod(value, &used);
        } else if (key == "n") {
          n = std::stoul(value, &used);
        } else {
          throw UsageError("cell '" + item + "': unknown key '" + key + "'");
        }
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const UsageError&) {
        throw;
      } catch (const std::exception&) {
        throw UsageError("cell '" + item + "': invalid value '" + value + "'");
      }
    }
    if (!s || !n || *n == 0) throw UsageError("cell '" + item + "' needs s and a positive n");
    cells.push_back({*s, *n});
  }
  if (cells.empty()) throw UsageError("--cells is empty; give e.g. s=1.0:n=2048");
  return cells;
}

ExperimentConfig simulate_config(const SimulateArgs& args, const CLI::App& sub) {
  ExperimentConfig config;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw IoError("cannot open '" + args.config_path + "'");
    config = experiment_config_from(read_key_values(in), config);
  }
  std::map<std::string, std::string> overrides;
  const auto take = [&](const char* flag, const char* key, const std::string& value) {
    if (sub.count(flag) > 0) overrides[key] = value;
  };
  take("--family", "family", args.family);
  take("--s", "s", format_number(args.shape));
  take("--n", "n", std::to_string(args.n));
  take("--alpha", "alpha", format_number(args.alpha));
  take("--method", "method", args.method);
  take("--K", "k", args.grid);
  take("--reps", "reps", std::to_string(args.reps));
  take("--seed", "seed", std::to_string(args.seed));
  take("--threads", "threads", std::to_string(args.threads));
  try {
    return experiment_config_from(overrides, config);
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
}

int run_simulate(const SimulateArgs& args, const CLI::App& sub) {
  ExperimentConfig config = simulate_config(args, sub);

  if (!args.paper_table.empty()) {
    if (args.paper_table != "iso") throw UsageError("--paper-table supports only 'iso'");
    if (sub.count("--cells") == 0) throw UsageError("--paper-table iso requires --cells");
    const std::vector<Cell> cells = parse_cells(args.cells);
    config.family = FamilyKind::wave;

    std::set<double> shapes;
    std::set<std::size_t> sizes;
    std::map<std::pair<double, std::size_t>, double> rates;
    for (const auto& cell : cells) {
      ExperimentConfig c = config;
      c.shape = cell.shape;
      c.n = cell.n;
      const ExperimentResult r = run_experiment(c);
      shapes.insert(cell.shape);
      sizes.insert(cell.n);
      rates[{cell.shape, cell.n}] = r.rejection_rate;
    }
    std::ostringstream out;
    Metadata meta = experiment_metadata(config);
    meta.erase(std::remove_if(meta.begin(), meta.end(),
                              [](const auto& kv) { return kv.first == "s" || kv.first == "n"; }),
               meta.end());
    meta.emplace_back("table", "isotonicity rejection rate (wave)");
    for (const auto& [key, value] : meta) out << "# " << key << '=' << value << '\n';
    out << "s";
    for (const auto n : sizes) out << ',' << n;
    out << '\n';
    for (const double s : shapes) {
      char label[32];
      std::snprintf(label, sizeof label, "%.2f", s);
      out << label;
      for (const auto n : sizes) {
        out << ',';
        if (const auto it = rates.find({s, n}); it != rates.end()) {
          char rate[32];
          std::snprintf(rate, sizeof rate, "%.3f", it->second);
          out << rate;
        }
      }
      out << '\n';
    }
    emit(args.output, out.str());
    return 0;
  }

  const RegressionFamily family = RegressionFamily::make(config.family, config.shape);
  if (!family.warning().empty()) std::cerr << "warning: " << family.warning() << '\n';
  const ExperimentResult result = run_experiment(config);

  std::ostringstream csv;
  write_replications_csv(csv, result);
  emit(args.output, csv.str());
  const std::string summary = experiment_summary_json(result).dump(2) + "\n";
  if (!args.summary.empty()) {
    emit(args.summary, summary);
  } else if (!args.output.empty() && args.output != "-") {
    std::cerr << summary;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simultaneous confidence bands for the calibration curve of binary-outcome predictions"};
  app.set_version_flag("--version", std::string("calband ") + CALBAND_VERSION);
  app.require_subcommand(1);

  BandArgs band;
  auto* band_cmd = app.add_subcommand("band", "Compute a calibration band and diagnostics for a prediction CSV");
  band_cmd->add_option("input", band.input, "CSV with header prediction,outcome")->required();
  band_cmd->add_option("--alpha", band.alpha, "Significance level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  band_cmd->add_option("--method", band.method, "raw, nc or yb")->capture_default_str();
  band_cmd->add_option("--index-family", band.family, "rounded or full")->capture_default_str();
  band_cmd->add_option("--K", band.grid, "Rounding grid for the rounded family")->capture_default_str();
  band_cmd->add_flag("--no-extrapolate", band.no_extrapolate, "Do not extend the band beyond the data range");
  band_cmd->add_flag("--general-covariates", band.general_covariates,
                     "Accept covariates outside [0,1]; disables the diagonal verdict and Hosmer-Lemeshow");
  band_cmd->add_option("--format", band.format, "csv or json")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
  band_cmd->add_option("-o,--output", band.output, "Output file (default stdout)");
  band_cmd->add_option("--plot", band.plot, "Write an SVG reliability diagram");
  band_cmd->add_option("--zoom", band.zoom, "Plot window a,b on both axes");
  band_cmd->add_option("--title", band.title, "Plot title");
  band_cmd->add_option("--hl-bins", band.hl_bins, "Hosmer-Lemeshow bins")->capture_default_str()->check(CLI::Range(2, 1000000));

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo coverage, width and isotonicity-test experiments");
  sim_cmd->add_option("--config", sim.config_path, "key=value experiment file; flags override it");
  sim_cmd->add_option("--family", sim.family, "monomial, s-shaped, kink, step or wave");
  sim_cmd->add_option("--s", sim.shape, "Shape parameter")->capture_default_str();
  sim_cmd->add_option("--n", sim.n, "Sample size")->capture_default_str();
  sim_cmd->add_option("--alpha", sim.alpha, "Significance level")->capture_default_str();
  sim_cmd->add_option("--method", sim.method, "raw, nc or yb")->capture_default_str();
  sim_cmd->add_option("--K", sim.grid, "Rounding grid, or 'full'")->capture_default_str();
  sim_cmd->add_option("--reps", sim.reps, "Replications")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "Base seed")->capture_default_str();
  sim_cmd->add_option("--threads", sim.threads, "Worker threads (default: CALBAND_THREADS or all cores)");
  sim_cmd->add_option("-o,--output", sim.output, "Per-replication CSV, or the table for --paper-table");
  sim_cmd->add_option("--summary", sim.summary, "JSON summary file");
  sim_cmd->add_option("--paper-table", sim.paper_table, "Emit a table of rejection rates ('iso')");
  sim_cmd->add_option("--cells", sim.cells, "Comma-separated cells s=<shape>:n=<size>");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (band_cmd->parsed()) return run_band(band);
    return run_simulate(sim, *sim_cmd);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}
