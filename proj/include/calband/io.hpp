#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "calband/analysis.hpp"
#include "calband/simulation.hpp"

namespace calband {

/// Malformed input. line() is 1-based, 0 if not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// File could not be opened or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PredictionTable {
  std::vector<Observation> rows;
  std::vector<std::string> warnings;
};

/// Reads `prediction,outcome` CSV (header required, columns in any order,
/// extra columns ignored with a warning, '#' lines skipped). With
/// `unit_domain` predictions outside [0, 1] are rejected.
PredictionTable read_predictions(std::istream& in, bool unit_domain = true);
PredictionTable read_predictions_file(const std::string& path, bool unit_domain = true);

/// File name without directories, for metadata that must not depend on
/// where the input lives.
std::string input_label(const std::string& path);

/// "%.17g".
std::string format_number(double value);

/// Metadata lines written as '# key=value' above CSV tables.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Columns x,lower,upper,isotonic_fit, one row per knot.
void write_band_csv(std::ostream& out, const StepBand& band, const IsotonicFit& fit, const Metadata& meta);

struct BandTable {
  StepBand band;
  std::vector<double> isotonic_fit;
};
BandTable read_band_csv(std::istream& in);

nlohmann::ordered_json interval_json(const Interval& iv);
nlohmann::ordered_json report_json(const AnalysisResult& result, const Metadata& meta);

/// key=value lines; '#' starts a comment, blank lines are skipped.
std::map<std::string, std::string> read_key_values(std::istream& in);

/// Overlays the keys family, s, n, alpha, method, K, reps, seed, threads on
/// `base`. K may be "full". Unknown keys are a ParseError.
ExperimentConfig experiment_config_from(const std::map<std::string, std::string>& values, ExperimentConfig base = {});

Metadata experiment_metadata(const ExperimentConfig& config);
void write_replications_csv(std::ostream& out, const ExperimentResult& result);
nlohmann::ordered_json experiment_summary_json(const ExperimentResult& result);

struct SvgOptions {
  double zoom_lo = 0.0;
  double zoom_hi = 1.0;
  bool extrapolate = true;
  std::string title;
};

/// Self-contained 800x600 reliability diagram: band ribbon, isotonic step
/// fit, diagonal (red where it leaves the band).
std::string render_svg(const AnalysisResult& result, const SvgOptions& options);

}  // namespace calband
