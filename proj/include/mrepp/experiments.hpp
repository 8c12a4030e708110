#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrepp/dynamics.hpp"
#include "mrepp/observables.hpp"
#include "mrepp/point_process.hpp"
#include "mrepp/stats.hpp"
#include "mrepp/theory.hpp"

namespace mrepp {

struct ThresholdModeCfg {
  bool analytic = false;
  double density = 1.0;  // used in analytic mode only
};

struct InducedCfg {
  Interval base;  // B
};

struct ExperimentConfig {
  MapSpec map;
  ObservableSpec observable;
  int p = 0;
  MarkKind kind = MarkKind::Repp;
  double tau = 1.0;
  std::vector<std::size_t> n_levels;
  std::size_t replicas = 1;
  std::uint64_t master_seed = 0;
  ThresholdModeCfg threshold_mode;
  bool exclude_truncated = false;
  std::optional<InducedCfg> induced;
};

struct ReportRow {
  std::size_t n = 0;
  double u_n = 0.0;
  double a_n = 0.0;
  double v_n = 0.0;
  double theta_hat = 0.0;
  double cluster_count = 0.0;  // mean clusters per replica
  double mark_ks_vs_limit = 0.0;
  double interarrival_ks = 0.0;
  double dprime_value = 0.0;
  double evl_prob = 0.0;  // empirical P(M_n <= u_n)
  std::optional<double> transfer_ks;

  bool operator==(const ReportRow&) const = default;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;

  bool operator==(const ExperimentReport&) const = default;
};

/// Per-replica outcome of one level run; marks and times live in the
/// embedded point process.
struct ReplicaSummary {
  MarkedPointProcess process;
  std::int64_t obrien_num = 0;
  std::int64_t obrien_den = 0;
  double dprime = 0.0;
  bool no_exceedance = true;
};

struct LevelRun {
  std::size_t n = 0;
  ThresholdLevel level;
  double theta_limit = 1.0;  // 1 for p = 0, EI formula value otherwise
  MultiplicityDist limit_dist;
  std::vector<ReplicaSummary> replicas;
};

/// Runs the replica ensemble at a single level n. Exposed for the CLI and
/// for tests; run_convergence composes these.
LevelRun run_level(const ExperimentConfig& config, std::size_t n);

/// Exceedance series of one replica at level n: the streaming sampler
/// behind run_level, exposed for diagnostics on the raw events.
ExceedanceSeries replica_exceedances(const ExperimentConfig& config, std::size_t replica,
                                     std::size_t n, const ThresholdLevel& level);

ExperimentReport run_convergence(const ExperimentConfig& config);

struct TransferRow {
  std::size_t n = 0;
  double u_n = 0.0;
  double v_n = 0.0;
  double v_n_induced = 0.0;
  KSResult mark_ks;
  KSResult count_ks;
};

/// Compares the rescaled marked processes of the original series and of the
/// first-return induced series on config.induced->base.
std::vector<TransferRow> transfer_check(const ExperimentConfig& config);

enum class ReportFormat { Csv, Json };

std::string report_to_csv(const ExperimentReport& report);
std::string report_to_json(const ExperimentReport& report);
ExperimentReport parse_report_json(const std::string& text);

void emit_report(const ExperimentReport& report, ReportFormat format, const std::string& path);

/// Pooled per-level statistics derived from a LevelRun, used to assemble
/// report rows (exposed for the acceptance suite).
struct PooledLevel {
  double theta_hat = 0.0;
  double cluster_count = 0.0;
  double mark_ks = 0.0;
  double interarrival_ks = 0.0;
  double dprime = 0.0;
  double evl_prob = 0.0;
  std::vector<double> mark_samples;  // a_u-scaled for AOT/POT, raw for REPP
  std::vector<double> gaps;
  std::size_t pooled_clusters = 0;
};

PooledLevel pool_level(const ExperimentConfig& config, const LevelRun& run);

}  // namespace mrepp
