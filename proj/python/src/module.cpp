#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "calband/analysis.hpp"
#include "calband/core_stats.hpp"
#include "calband/io.hpp"
#include "calband/simulation.hpp"

namespace py = pybind11;
using namespace calband;

namespace {

SortedBinaryData to_data(const std::vector<double>& predictions, const std::vector<int>& outcomes) {
  if (predictions.size() != outcomes.size()) {
    throw std::invalid_argument("predictions and outcomes differ in length");
  }
  return build_sorted_data(predictions, outcomes);
}

// K <= 0 or None selects the full index family.
std::int64_t grid_from(const py::object& K) { return K.is_none() ? 0 : std::max<std::int64_t>(0, K.cast<std::int64_t>()); }

IndexPairFamily family_for(const SortedBinaryData& data, std::int64_t grid) {
  return grid > 0 ? IndexPairFamily::rounded(data, grid) : IndexPairFamily::full(data);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Simultaneous confidence bands for calibration curves";
  m.attr("__version__") = CALBAND_VERSION;

  m.def("reg_inc_beta", &reg_inc_beta, py::arg("a"), py::arg("b"), py::arg("x"));
  m.def("beta_quantile", &beta_quantile, py::arg("p"), py::arg("a"), py::arg("b"));
  m.def("binom_cdf", &binom_cdf, py::arg("z"), py::arg("m"), py::arg("xi"));
  m.def(
      "cp_upper", [](std::int64_t z, std::int64_t m, double delta) { return cp_upper(z, m, delta); }, py::arg("z"), py::arg("m"), py::arg("delta"));
  m.def(
      "cp_lower", [](std::int64_t z, std::int64_t m, double delta) { return cp_lower(z, m, delta); }, py::arg("z"), py::arg("m"), py::arg("delta"));

  m.def(
      "isotonic_regression",
      [](const std::vector<double>& values, std::optional<std::vector<double>> weights) {
        const std::vector<double> w = weights ? *weights : std::vector<double>(values.size(), 1.0);
        return isotonic_regression(values, w);
      },
      py::arg("values"), py::arg("weights") = py::none());

  py::class_<StepBand>(m, "StepBand")
      .def_readonly("knots", &StepBand::knots)
      .def_readonly("lower", &StepBand::lower)
      .def_readonly("upper", &StepBand::upper)
      .def("__len__", &StepBand::size)
      .def(
          "__call__",
          [](const StepBand& band, double x, bool extrapolate) {
            const auto v = evaluate_band(band, x, extrapolate);
            return py::make_tuple(v.lower, v.upper);
          },
          py::arg("x"), py::arg("extrapolate") = true, "(lower, upper) at x");

  m.def(
      "calibration_band",
      [](const std::vector<double>& predictions, const std::vector<int>& outcomes, double alpha,
         const std::string& method, const py::object& K) {
        const auto data = to_data(predictions, outcomes);
        const auto fit = pava(data);
        return build_band(data, fit, family_for(data, grid_from(K)), parse_band_method(method), alpha);
      },
      py::arg("predictions"), py::arg("outcomes"), py::arg("alpha") = 0.05, py::arg("method") = "nc",
      py::arg("K") = 1000);

  m.def(
      "isotonicity_pvalue",
      [](const std::vector<double>& predictions, const std::vector<int>& outcomes, const py::object& K) {
        const auto data = to_data(predictions, outcomes);
        return isotonicity_pvalue(data, family_for(data, grid_from(K)));
      },
      py::arg("predictions"), py::arg("outcomes"), py::arg("K") = 1000);

  m.def(
      "hosmer_lemeshow",
      [](const std::vector<double>& predictions, const std::vector<int>& outcomes, std::size_t bins) {
        const auto r = hosmer_lemeshow(to_data(predictions, outcomes), bins);
        py::dict out;
        out["statistic"] = r.statistic;
        out["p_value"] = r.p_value;
        out["bins"] = r.bins;
        out["degrees_of_freedom"] = r.degrees_of_freedom;
        return out;
      },
      py::arg("predictions"), py::arg("outcomes"), py::arg("bins") = 10);

  m.def(
      "_analyze_json",
      [](const std::vector<double>& predictions, const std::vector<int>& outcomes, double alpha,
         const std::string& method, const py::object& K, bool extrapolate, bool unit_domain, std::size_t hl_bins) {
        AnalysisOptions options;
        options.alpha = alpha;
        options.method = parse_band_method(method);
        options.grid = grid_from(K);
        options.extrapolate = extrapolate;
        options.unit_domain = unit_domain;
        options.hl_bins = hl_bins;
        return report_json(analyze(to_data(predictions, outcomes), options), {}).dump();
      },
      py::arg("predictions"), py::arg("outcomes"), py::arg("alpha"), py::arg("method"), py::arg("K"),
      py::arg("extrapolate"), py::arg("unit_domain"), py::arg("hl_bins"));

  m.def(
      "family_value",
      [](const std::string& family, double s, double x) { return RegressionFamily::make(parse_family_kind(family), s)(x); },
      py::arg("family"), py::arg("s"), py::arg("x"));

  m.def(
      "_simulate_json",
      [](const std::string& family, double s, std::size_t n, double alpha, const std::string& method,
         const py::object& K, std::size_t reps, std::uint64_t seed, unsigned threads) {
        ExperimentConfig config;
        config.family = parse_family_kind(family);
        config.shape = s;
        config.n = n;
        config.alpha = alpha;
        config.method = parse_band_method(method);
        config.grid = grid_from(K);
        config.reps = reps;
        config.seed = seed;
        config.threads = threads;
        ExperimentResult result;
        {
          py::gil_scoped_release release;
          result = run_experiment(config);
        }
        return experiment_summary_json(result).dump();
      },
      py::arg("family"), py::arg("s"), py::arg("n"), py::arg("alpha"), py::arg("method"), py::arg("K"),
      py::arg("reps"), py::arg("seed"), py::arg("threads"));
}
