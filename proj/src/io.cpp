#include "calband/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace calband {

namespace {

using nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_double(std::string_view text, double& value) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

template <typename Int>
Int parse_integer(std::string_view text, std::string_view key, std::size_t line) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("invalid integer '" + std::string(text) + "' for " + std::string(key), line);
  }
  return value;
}

bool skip_line(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

std::string basename_of(const std::string& path) {
  const auto slash = path.find_last_of("/\\");
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

}  // namespace

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

PredictionTable read_predictions(std::istream& in, bool unit_domain) {
  PredictionTable table;
  std::string line;
  std::size_t line_no = 0;
  std::size_t pred_col = 0;
  std::size_t outcome_col = 0;
  std::size_t width = 0;
  bool have_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (skip_line(line)) continue;
    const auto fields = split_fields(line);

    if (!have_header) {
      bool found_pred = false;
      bool found_outcome = false;
      std::vector<std::string> extra;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const std::string name = lowercase(fields[i]);
        if (name == "prediction" && !found_pred) {
          pred_col = i;
          found_pred = true;
        } else if (name == "outcome" && !found_outcome) {
          outcome_col = i;
          found_outcome = true;
        } else {
          extra.emplace_back(fields[i]);
        }
      }
      if (!found_pred || !found_outcome) {
        throw ParseError("header must name the columns 'prediction' and 'outcome'", line_no);
      }
      for (const auto& name : extra) table.warnings.push_back("ignoring extra column '" + name + "'");
      width = fields.size();
      have_header = true;
      continue;
    }

    if (fields.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()), line_no);
    }
    Observation obs;
    if (!parse_double(fields[pred_col], obs.x) || !std::isfinite(obs.x)) {
      throw ParseError("invalid prediction '" + std::string(fields[pred_col]) + "'", line_no);
    }
    if (unit_domain && (obs.x < 0.0 || obs.x > 1.0)) {
      throw ParseError("prediction " + std::string(fields[pred_col]) +
                           " outside [0,1] (use --general-covariates for arbitrary covariates)",
                       line_no);
    }
    const auto outcome = fields[outcome_col];
    if (outcome == "0") {
      obs.y = 0;
    } else if (outcome == "1") {
      obs.y = 1;
    } else {
      throw ParseError("outcome must be 0 or 1, got '" + std::string(outcome) + "'", line_no);
    }
    table.rows.push_back(obs);
  }
  if (!have_header) throw ParseError("empty input: missing 'prediction,outcome' header", line_no == 0 ? 1 : line_no);
  if (table.rows.empty()) throw ParseError("no data rows", line_no);
  return table;
}

PredictionTable read_predictions_file(const std::string& path, bool unit_domain) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_predictions(in, unit_domain);
}

void write_band_csv(std::ostream& out, const StepBand& band, const IsotonicFit& fit, const Metadata& meta) {
  for (const auto& [key, value] : meta) out << "# " << key << '=' << value << '\n';
  out << "x,lower,upper,isotonic_fit\n";
  for (std::size_t i = 0; i < band.size(); ++i) {
    out << format_number(band.knots[i]) << ',' << format_number(band.lower[i]) << ',' << format_number(band.upper[i])
        << ',' << format_number(fit.level_at_group(i)) << '\n';
  }
}

BandTable read_band_csv(std::istream& in) {
  BandTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto fields = split_fields(line);
    if (!have_header) {
      if (fields.size() != 4 || fields[0] != "x" || fields[1] != "lower" || fields[2] != "upper" ||
          fields[3] != "isotonic_fit") {
        throw ParseError("expected header x,lower,upper,isotonic_fit", line_no);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 4) throw ParseError("expected 4 fields", line_no);
    double v[4];
    for (int i = 0; i < 4; ++i) {
      if (!parse_double(fields[i], v[i])) throw ParseError("invalid number '" + std::string(fields[i]) + "'", line_no);
    }
    table.band.knots.push_back(v[0]);
    table.band.lower.push_back(v[1]);
    table.band.upper.push_back(v[2]);
    table.isotonic_fit.push_back(v[3]);
  }
  if (!have_header) throw ParseError("missing band header", 0);
  return table;
}

ordered_json interval_json(const Interval& iv) {
  return {{"lo", iv.lo}, {"hi", iv.hi}, {"lo_closed", iv.lo_closed}, {"hi_closed", iv.hi_closed}};
}

ordered_json report_json(const AnalysisResult& result, const Metadata& meta) {
  const auto& opt = result.options;
  ordered_json band;
  band["method"] = std::string(to_string(opt.method));
  band["alpha"] = opt.alpha;
  band["index_family"] = opt.grid > 0 ? "rounded" : "full";
  if (opt.grid > 0) band["K"] = opt.grid;
  band["pairs"] = result.family_pairs;
  band["correction"] = result.correction;
  band["extrapolate"] = opt.extrapolate;
  band["x"] = result.band.knots;
  band["lower"] = result.band.lower;
  band["upper"] = result.band.upper;
  const auto levels = result.fit.group_levels();
  band["isotonic_fit"] = std::vector<double>(levels.begin(), levels.end());

  ordered_json verdict = nullptr;
  if (result.verdict) {
    verdict = ordered_json::object();
    verdict["classical_reject"] = result.verdict->classical_reject;
    verdict["miscalibrated_regions"] = ordered_json::array();
    for (const auto& iv : result.verdict->miscalibrated_regions) verdict["miscalibrated_regions"].push_back(interval_json(iv));
    verdict["epsilon_certificate"] = result.verdict->epsilon_certificate;
    verdict["calibration_radius"] = result.verdict->calibration_radius;
  }

  ordered_json iso;
  iso["alpha"] = result.isotonicity.alpha;
  iso["p_value"] = result.isotonicity.p_value;
  iso["gamma_hat"] = result.isotonicity.gamma_hat;
  iso["crossing_regions"] = ordered_json::array();
  for (const auto& iv : result.isotonicity.crossing_regions) iso["crossing_regions"].push_back(interval_json(iv));

  ordered_json hl = nullptr;
  if (result.hosmer_lemeshow) {
    const auto& h = *result.hosmer_lemeshow;
    hl = {{"bins_requested", opt.hl_bins},
          {"bins", h.bins},
          {"statistic", h.statistic},
          {"degrees_of_freedom", h.degrees_of_freedom},
          {"p_value", h.p_value}};
  } else if (!result.hosmer_lemeshow_error.empty()) {
    hl = {{"bins_requested", opt.hl_bins}, {"error", result.hosmer_lemeshow_error}};
  }

  ordered_json m = ordered_json::object();
  for (const auto& [key, value] : meta) m[key] = value;
  m["n"] = result.data.size();
  m["distinct_predictions"] = result.data.group_count();
  m["warnings"] = result.warnings;

  ordered_json doc;
  doc["band"] = std::move(band);
  doc["verdict"] = std::move(verdict);
  doc["isotonicity"] = std::move(iso);
  doc["hosmer_lemeshow"] = std::move(hl);
  doc["meta"] = std::move(m);
  return doc;
}

std::map<std::string, std::string> read_key_values(std::istream& in) {
  std::map<std::string, std::string> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value", line_no);
    const std::string key = lowercase(trim(view.substr(0, eq)));
    if (key.empty()) throw ParseError("empty key", line_no);
    if (values.count(key)) throw ParseError("duplicate key '" + key + "'", line_no);
    values[key] = std::string(trim(view.substr(eq + 1)));
  }
  return values;
}

ExperimentConfig experiment_config_from(const std::map<std::string, std::string>& values, ExperimentConfig base) {
  for (const auto& [key, value] : values) {
    try {
      if (key == "family") {
        base.family = parse_family_kind(value);
      } else if (key == "s" || key == "shape") {
        if (!parse_double(value, base.shape)) throw ParseError("invalid number '" + value + "' for " + key, 0);
      } else if (key == "n") {
        base.n = parse_integer<std::size_t>(value, key, 0);
      } else if (key == "alpha") {
        if (!parse_double(value, base.alpha)) throw ParseError("invalid number '" + value + "' for alpha", 0);
      } else if (key == "method") {
        base.method = parse_band_method(value);
      } else if (key == "k") {
        base.grid = lowercase(value) == "full" ? 0 : parse_integer<std::int64_t>(value, key, 0);
        if (base.grid < 0) throw ParseError("K must be positive or 'full'", 0);
      } else if (key == "reps") {
        base.reps = parse_integer<std::size_t>(value, key, 0);
      } else if (key == "seed") {
        base.seed = parse_integer<std::uint64_t>(value, key, 0);
      } else if (key == "threads") {
        base.threads = parse_integer<unsigned>(value, key, 0);
      } else {
        throw ParseError("unknown key '" + key + "'", 0);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(e.what(), 0);
    }
  }
  return base;
}

Metadata experiment_metadata(const ExperimentConfig& config) {
  return {{"tool", "calband"},
          {"version", CALBAND_VERSION},
          {"command", "simulate"},
          {"family", std::string(to_string(config.family))},
          {"s", format_number(config.shape)},
          {"n", std::to_string(config.n)},
          {"alpha", format_number(config.alpha)},
          {"method", std::string(to_string(config.method))},
          {"K", config.grid > 0 ? std::to_string(config.grid) : "full"},
          {"reps", std::to_string(config.reps)},
          {"seed", std::to_string(config.seed)},
          {"rng", std::string(Rng::name)}};
}

void write_replications_csv(std::ostream& out, const ExperimentResult& result) {
  for (const auto& [key, value] : experiment_metadata(result.config)) out << "# " << key << '=' << value << '\n';
  out << "rep,seed,groups,covered,knot_coverage,iso_rejected";
  for (const double x : result.width_grid) {
    char buf[32];
    std::snprintf(buf, sizeof buf, ",width_%.2f", x);
    out << buf;
  }
  out << '\n';
  for (const auto& r : result.records) {
    out << r.rep << ',' << r.seed << ',' << r.groups << ',' << (r.covered ? 1 : 0) << ','
        << format_number(r.knot_coverage) << ',' << (r.iso_rejected ? 1 : 0);
    for (const double w : r.width) out << ',' << format_number(w);
    out << '\n';
  }
}

ordered_json experiment_summary_json(const ExperimentResult& result) {
  ordered_json meta = ordered_json::object();
  for (const auto& [key, value] : experiment_metadata(result.config)) meta[key] = value;
  ordered_json doc;
  doc["coverage_rate"] = result.coverage_rate;
  doc["mean_knot_coverage"] = result.mean_knot_coverage;
  doc["rejection_rate"] = result.rejection_rate;
  doc["width_grid"] = result.width_grid;
  doc["mean_width"] = result.mean_width;
  doc["meta"] = std::move(meta);
  return doc;
}

std::string input_label(const std::string& path) { return basename_of(path); }

}  // namespace calband
