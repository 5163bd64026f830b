#include "calband/analysis.hpp"

#include <stdexcept>
#include <string>

namespace calband {

AnalysisResult analyze(SortedBinaryData data, const AnalysisOptions& options) {
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (options.grid < 0) throw std::invalid_argument("K must be at least 1");

  AnalysisResult result;
  result.options = options;
  result.data = std::move(data);
  const SortedBinaryData& d = result.data;
  result.fit = pava(d);

  const IndexPairFamily family = options.grid > 0 ? IndexPairFamily::rounded(d, options.grid) : IndexPairFamily::full(d);
  result.family_pairs = family.size();
  result.correction = family.correction();
  result.band = build_band(d, result.fit, family, options.method, options.alpha);

  if (options.unit_domain) result.verdict = calibration_verdict(result.band, options.extrapolate);
  result.isotonicity = isotonicity_report(d, family, options.alpha);

  if (!result.isotonicity.crossing_regions.empty()) {
    std::string msg = "raw band crosses on " + std::to_string(result.isotonicity.crossing_regions.size()) +
                      " region(s) at alpha; evidence against isotonicity (p = " +
                      std::to_string(result.isotonicity.p_value) + ")";
    if (options.method == BandMethod::raw) msg += "; the reported raw band is empty there";
    result.warnings.push_back(std::move(msg));
  }

  if (options.unit_domain) {
    try {
      result.hosmer_lemeshow = hosmer_lemeshow(d, options.hl_bins);
    } catch (const std::exception& e) {
      result.hosmer_lemeshow_error = e.what();
      result.warnings.push_back(std::string("Hosmer-Lemeshow skipped: ") + e.what());
    }
  }
  return result;
}

}  // namespace calband
