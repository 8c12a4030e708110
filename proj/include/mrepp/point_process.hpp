#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mrepp/common.hpp"
#include "mrepp/observables.hpp"

namespace mrepp {

enum class MarkKind { Repp, Aot, Pot };

struct ExceedanceEvent {
  std::int64_t time = 0;
  double excess = 0.0;  // strictly positive
};

struct ExceedanceSeries {
  double u = 0.0;
  std::int64_t series_length = 0;
  std::vector<ExceedanceEvent> events;  // times strictly increasing
};

struct Cluster {
  std::vector<std::int64_t> times;
  std::vector<double> excesses;
  bool truncated = false;  // ran into the end of the series
};

struct MarkedPoint {
  double rescaled_time = 0.0;
  double mark = 0.0;  // raw mark; scale by a_u for the normalised process
  int cluster_size = 0;
  bool truncated = false;
};

/// Cluster anchor times on the v_u-rescaled axis, each carrying a raw mark.
struct MarkedPointProcess {
  std::vector<MarkedPoint> points;
  double u = 0.0;
  double v_u = 0.0;
  double a_u = 0.0;
  int p = 0;
  MarkKind kind = MarkKind::Repp;

  double scaled_mark(std::size_t i) const { return a_u * points[i].mark; }
};

ExceedanceSeries extract_exceedances(std::span<const double> values, double u);

/// Gap rule: consecutive exceedances at most p apart share a cluster; the
/// final cluster is flagged truncated when fewer than p+1 observations
/// remain after its last exceedance.
std::vector<Cluster> identify_clusters(const ExceedanceSeries& ex, int p);

double compute_mark(const Cluster& c, MarkKind kind);

MarkedPointProcess build_mrepp(std::span<const double> values, const ThresholdLevel& level, int p,
                               MarkKind kind);
MarkedPointProcess build_mrepp(const ExceedanceSeries& ex, const ThresholdLevel& level, int p,
                               MarkKind kind);

/// Sum of marks (a_u-scaled when `scaled`) of points whose rescaled time
/// lies in the union J of half-open intervals.
double count_on_interval(const MarkedPointProcess& mp, std::span<const Interval> J, bool scaled);

struct MaxStatistic {
  double m_n = 0.0;
  bool no_exceedance = false;
};

MaxStatistic max_statistic(std::span<const double> values, double u);

/// CSV rows: replica_id,rescaled_time,raw_mark,scaled_mark,cluster_size,truncated
void write_mrepp_csv(std::ostream& os, const MarkedPointProcess& mp, int replica_id);
void write_mrepp_csv_header(std::ostream& os);

}  // namespace mrepp
