#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "calband/bands.hpp"
#include "calband/sorted_data.hpp"

namespace calband {

enum class FamilyKind { monomial, s_shaped, kink, step, wave };

std::string_view to_string(FamilyKind kind);
/// Case-insensitive; accepts "monomial", "s-shaped"/"sshaped", "kink", "step", "wave".
FamilyKind parse_family_kind(std::string_view text);

/// One of the five simulation truths p_s on [0, 1].
class RegressionFamily {
 public:
  /// Throws std::invalid_argument if s is outside the family's range:
  /// Monomial [0,1), S-shaped [0,1], Kink [0,1], Step (0,1], Wave [0,1].
  static RegressionFamily make(FamilyKind kind, double s);

  FamilyKind kind() const { return kind_; }
  double shape() const { return s_; }
  /// Number of steps 15 - 10 s (Step only, rounded into {5..14}).
  int step_count() const { return steps_; }
  /// Non-empty if the parameters had to be adjusted (off-grid Step shape).
  const std::string& warning() const { return warning_; }

  bool isotonic() const { return !(kind_ == FamilyKind::wave && s_ > 0.5); }

  double operator()(double x) const;

  /// Interior local extrema in (0, 1); only the non-monotone Wave has any.
  std::vector<double> critical_points() const;

 private:
  RegressionFamily(FamilyKind kind, double s) : kind_(kind), s_(s) {}

  FamilyKind kind_ = FamilyKind::monomial;
  double s_ = 0.0;
  int steps_ = 0;
  std::string warning_;
};

inline double eval_p(const RegressionFamily& family, double x) { return family(x); }

/// Per-replication random stream: mt19937_64 seeded with a splitmix64 hash of
/// (base seed, replication). Uniforms are built from the top 53 bits so the
/// stream is identical on every platform.
class Rng {
 public:
  static constexpr std::string_view name = "mt19937_64+splitmix64";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  static std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t stream);

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

/// n iid U[0,1] covariates with Bernoulli(p_s(x)) outcomes.
SortedBinaryData simulate_dataset(const RegressionFamily& family, std::size_t n, Rng& rng);

struct ExperimentConfig {
  FamilyKind family = FamilyKind::monomial;
  double shape = 0.5;
  std::size_t n = 512;
  double alpha = 0.05;
  BandMethod method = BandMethod::raw;
  std::int64_t grid = 1000;  // rounded family K; 0 selects the full family
  std::size_t reps = 200;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: CALBAND_THREADS or hardware concurrency
};

struct ReplicationRecord {
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  std::size_t groups = 0;
  /// Truth inside the band at every knot and on every step piece of [0, 1].
  bool covered = false;
  /// Fraction of knots with L(x_i) <= p(x_i) <= U(x_i).
  double knot_coverage = 0.0;
  /// Raw band of the configured family crosses at alpha.
  bool iso_rejected = false;
  /// upper - lower at the width grid.
  std::vector<double> width;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::string rng;
  std::vector<double> width_grid;
  std::vector<ReplicationRecord> records;

  double coverage_rate = 0.0;
  double mean_knot_coverage = 0.0;
  double rejection_rate = 0.0;
  std::vector<double> mean_width;
};

/// {0, 0.01, ..., 1}.
std::vector<double> width_grid();

/// Simultaneous coverage of `band` for the truth on [0, 1]: knots, the open
/// pieces between them and the extrapolated end pieces.
bool band_covers(const StepBand& band, const RegressionFamily& family);

/// Runs one replication; deterministic in (config, rep).
ReplicationRecord run_replication(const ExperimentConfig& config, const RegressionFamily& family, std::size_t rep);

/// Fills the aggregate fields of `result` from its records.
void aggregate(ExperimentResult& result);

/// Replications run on a thread pool; records are stored by index so the
/// result does not depend on scheduling.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Thread count from `requested`, else the CALBAND_THREADS environment
/// variable, else the hardware concurrency.
unsigned resolve_thread_count(unsigned requested);

}  // namespace calband
