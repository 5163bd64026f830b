#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "calband/bands.hpp"
#include "calband/diagnostics.hpp"
#include "calband/isotonic.hpp"
#include "calband/sorted_data.hpp"

namespace calband {

struct AnalysisOptions {
  double alpha = 0.05;
  BandMethod method = BandMethod::noncrossing;
  std::int64_t grid = 1000;  // rounded family K; 0 for the full family
  bool extrapolate = true;
  /// Predictions are probabilities in [0, 1]; enables the diagonal verdict
  /// and Hosmer-Lemeshow.
  bool unit_domain = true;
  std::size_t hl_bins = 10;
};

/// Everything the `band` command reports for one dataset.
struct AnalysisResult {
  AnalysisOptions options;
  SortedBinaryData data;
  IsotonicFit fit;
  std::uint64_t family_pairs = 0;
  std::uint64_t correction = 0;
  StepBand band;
  std::optional<CalibrationVerdict> verdict;
  IsotonicityReport isotonicity;
  std::optional<HosmerLemeshowResult> hosmer_lemeshow;
  std::string hosmer_lemeshow_error;
  std::vector<std::string> warnings;
};

AnalysisResult analyze(SortedBinaryData data, const AnalysisOptions& options);

}  // namespace calband
