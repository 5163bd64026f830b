#include "calband/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "calband/diagnostics.hpp"
#include "calband/isotonic.hpp"

namespace calband {

namespace {

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Extremes of the truth over the closed interval [a, b].
std::pair<double, double> range_on(const RegressionFamily& family, double a, double b) {
  double lo = std::min(family(a), family(b));
  double hi = std::max(family(a), family(b));
  for (const double c : family.critical_points()) {
    if (c > a && c < b) {
      lo = std::min(lo, family(c));
      hi = std::max(hi, family(c));
    }
  }
  return {lo, hi};
}

}  // namespace

std::string_view to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::monomial:
      return "monomial";
    case FamilyKind::s_shaped:
      return "s-shaped";
    case FamilyKind::kink:
      return "kink";
    case FamilyKind::step:
      return "step";
    case FamilyKind::wave:
      return "wave";
  }
  return "unknown";
}

FamilyKind parse_family_kind(std::string_view text) {
  const std::string key = lowercase(text);
  if (key == "monomial") return FamilyKind::monomial;
  if (key == "s-shaped" || key == "sshaped" || key == "s_shaped") return FamilyKind::s_shaped;
  if (key == "kink") return FamilyKind::kink;
  if (key == "step") return FamilyKind::step;
  if (key == "wave") return FamilyKind::wave;
  throw std::invalid_argument("unknown family '" + std::string(text) + "' (expected monomial, s-shaped, kink, step or wave)");
}

RegressionFamily RegressionFamily::make(FamilyKind kind, double s) {
  const std::string name(to_string(kind));
  const auto reject = [&](const char* range) {
    throw std::invalid_argument("shape s=" + std::to_string(s) + " not admissible for " + name + " (need s in " +
                                range + ")");
  };
  if (!std::isfinite(s)) reject("a finite range");
  switch (kind) {
    case FamilyKind::monomial:
      if (s < 0.0 || s >= 1.0) reject("[0,1)");
      break;
    case FamilyKind::step:
      if (s <= 0.0 || s > 1.0) reject("(0,1]");
      break;
    default:
      if (s < 0.0 || s > 1.0) reject("[0,1]");
  }
  RegressionFamily family(kind, s);
  if (kind == FamilyKind::step) {
    const double exact = 15.0 - 10.0 * s;
    family.steps_ = std::clamp(static_cast<int>(std::lround(exact)), 5, 14);
    if (std::abs(exact - family.steps_) > 1e-9) {
      family.warning_ = "step: s=" + std::to_string(s) + " is off the 0.1 grid; using " +
                        std::to_string(family.steps_) + " steps";
    }
  }
  return family;
}

double RegressionFamily::operator()(double x) const {
  switch (kind_) {
    case FamilyKind::monomial:
      return x <= 0.0 ? 0.0 : std::pow(x, 1.0 - s_);
    case FamilyKind::s_shaped:
      if (x <= 0.0) return 0.0;
      if (x >= 1.0) return 1.0;
      return 1.0 / (1.0 + std::pow((1.0 - x) / x, 1.0 + s_));
    case FamilyKind::kink: {
      const double corner = 0.2 + 0.8 * s_;
      if (x >= 1.0) return 1.0;
      if (x <= corner) return 0.2 * x / corner;
      return 0.2 + 0.8 * (x - corner) / (1.0 - corner);
    }
    case FamilyKind::step: {
      const double steps = steps_;
      return (std::floor(steps * x) + (x != 1.0 ? 1.0 : 0.0)) / steps;
    }
    case FamilyKind::wave: {
      const double d = x - 0.5;
      return std::clamp(0.5 - (2.0 * s_ - 1.0) * d + 8.0 * s_ * d * d * d, 0.0, 1.0);
    }
  }
  return 0.0;
}

std::vector<double> RegressionFamily::critical_points() const {
  if (kind_ != FamilyKind::wave || s_ <= 0.5) return {};
  // p'(x) = -(2s-1) + 24 s (x - 1/2)^2
  const double offset = std::sqrt((2.0 * s_ - 1.0) / (24.0 * s_));
  return {0.5 - offset, 0.5 + offset};
}

std::uint64_t Rng::stream_seed(std::uint64_t base_seed, std::uint64_t stream) {
  return splitmix64(splitmix64(base_seed) ^ (stream * 0xD1B54A32D192ED03ULL));
}

SortedBinaryData simulate_dataset(const RegressionFamily& family, std::size_t n, Rng& rng) {
  std::vector<Observation> obs(n);
  for (auto& o : obs) {
    o.x = rng.uniform();
    o.y = rng.bernoulli(family(o.x)) ? 1 : 0;
  }
  return build_sorted_data(obs);
}

std::vector<double> width_grid() {
  std::vector<double> grid(101);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<double>(i) / 100.0;
  return grid;
}

bool band_covers(const StepBand& band, const RegressionFamily& family) {
  const std::size_t count = band.size();
  for (std::size_t i = 0; i < count; ++i) {
    const double p = family(band.knots[i]);
    if (p < band.lower[i] || p > band.upper[i]) return false;
  }
  // Pieces: [0, x_1) at (0, U_1); (x_i, x_{i+1}) at (L_i, U_{i+1}); (x_N, 1] at (L_N, 1).
  if (band.knots.front() > 0.0 && range_on(family, 0.0, band.knots.front()).second > band.upper.front()) return false;
  for (std::size_t i = 0; i + 1 < count; ++i) {
    const auto [lo, hi] = range_on(family, band.knots[i], band.knots[i + 1]);
    if (lo < band.lower[i] || hi > band.upper[i + 1]) return false;
  }
  if (band.knots.back() < 1.0 && range_on(family, band.knots.back(), 1.0).first < band.lower.back()) return false;
  return true;
}

ReplicationRecord run_replication(const ExperimentConfig& config, const RegressionFamily& family, std::size_t rep) {
  ReplicationRecord record;
  record.rep = rep;
  record.seed = Rng::stream_seed(config.seed, rep);
  Rng rng(record.seed);
  const SortedBinaryData data = simulate_dataset(family, config.n, rng);
  record.groups = data.group_count();

  const IsotonicFit fit = pava(data);
  const IndexPairFamily pairs =
      config.grid > 0 ? IndexPairFamily::rounded(data, config.grid) : IndexPairFamily::full(data);
  const StepBand raw = raw_band(data, pairs, config.alpha);
  record.iso_rejected = band_crosses(raw);

  StepBand band;
  switch (config.method) {
    case BandMethod::raw:
      band = raw;
      break;
    case BandMethod::noncrossing:
      band = noncrossing_band(raw, fit);
      break;
    case BandMethod::yang_barber:
      band = yb_band(data, fit, config.alpha);
      break;
  }

  record.covered = band_covers(band, family);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < band.size(); ++i) {
    const double p = family(band.knots[i]);
    if (p >= band.lower[i] && p <= band.upper[i]) ++hits;
  }
  record.knot_coverage = static_cast<double>(hits) / static_cast<double>(band.size());

  for (const double x : width_grid()) {
    const BandValue v = evaluate_band(band, x);
    record.width.push_back(v.upper - v.lower);
  }
  return record;
}

void aggregate(ExperimentResult& result) {
  const auto& records = result.records;
  const double reps = static_cast<double>(records.size());
  result.coverage_rate = 0.0;
  result.mean_knot_coverage = 0.0;
  result.rejection_rate = 0.0;
  result.mean_width.assign(result.width_grid.size(), 0.0);
  if (records.empty()) return;
  for (const auto& r : records) {
    result.coverage_rate += r.covered ? 1.0 : 0.0;
    result.mean_knot_coverage += r.knot_coverage;
    result.rejection_rate += r.iso_rejected ? 1.0 : 0.0;
    for (std::size_t i = 0; i < result.mean_width.size(); ++i) result.mean_width[i] += r.width[i];
  }
  result.coverage_rate /= reps;
  result.mean_knot_coverage /= reps;
  result.rejection_rate /= reps;
  for (auto& w : result.mean_width) w /= reps;
}

unsigned resolve_thread_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CALBAND_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return static_cast<unsigned>(value);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.reps == 0) throw std::invalid_argument("run_experiment: reps must be at least 1");
  if (config.n == 0) throw std::invalid_argument("run_experiment: n must be at least 1");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw std::invalid_argument("run_experiment: alpha must lie in (0,1)");
  if (config.grid < 0) throw std::invalid_argument("run_experiment: K must be positive (or 0 for the full family)");
  const RegressionFamily family = RegressionFamily::make(config.family, config.shape);

  ExperimentResult result;
  result.config = config;
  result.rng = std::string(Rng::name);
  result.width_grid = width_grid();
  result.records.resize(config.reps);

  const unsigned workers = std::min<std::size_t>(resolve_thread_count(config.threads), config.reps);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto work = [&] {
    for (std::size_t rep = next++; rep < config.reps; rep = next++) {
      try {
        result.records[rep] = run_replication(config, family, rep);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = config.reps;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  aggregate(result);
  return result;
}

}  // namespace calband
