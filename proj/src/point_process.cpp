#include "mrepp/point_process.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace mrepp {

ExceedanceSeries extract_exceedances(std::span<const double> values, double u) {
  ExceedanceSeries out;
  out.u = u;
  out.series_length = static_cast<std::int64_t>(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] > u) out.events.push_back({static_cast<std::int64_t>(j), values[j] - u});
  }
  return out;
}

std::vector<Cluster> identify_clusters(const ExceedanceSeries& ex, int p) {
  std::vector<Cluster> clusters;
  if (ex.events.empty()) return clusters;
  Cluster current;
  current.times.push_back(ex.events[0].time);
  current.excesses.push_back(ex.events[0].excess);
  for (std::size_t i = 1; i < ex.events.size(); ++i) {
    const auto& ev = ex.events[i];
    if (ev.time - current.times.back() <= p) {
      current.times.push_back(ev.time);
      current.excesses.push_back(ev.excess);
    } else {
      clusters.push_back(std::move(current));
      current = Cluster{};
      current.times.push_back(ev.time);
      current.excesses.push_back(ev.excess);
    }
  }
  // fewer than p+1 observations left after the last exceedance
  current.truncated = ex.series_length - current.times.back() <= p;
  clusters.push_back(std::move(current));
  return clusters;
}

double compute_mark(const Cluster& c, MarkKind kind) {
  if (c.excesses.empty()) throw DomainError("cluster must be nonempty");
  switch (kind) {
    case MarkKind::Aot: {
      double s = 0.0;
      for (double e : c.excesses) s += e;
      return s;
    }
    case MarkKind::Pot: {
      double m = 0.0;
      for (double e : c.excesses) m = std::max(m, e);
      return m;
    }
    case MarkKind::Repp:
      return static_cast<double>(c.excesses.size());
  }
  throw DomainError("unknown mark kind");
}

MarkedPointProcess build_mrepp(const ExceedanceSeries& ex, const ThresholdLevel& level, int p,
                               MarkKind kind) {
  MarkedPointProcess mp;
  mp.u = level.u;
  mp.v_u = level.v_u;
  mp.a_u = level.a_u;
  mp.p = p;
  mp.kind = kind;
  for (const auto& c : identify_clusters(ex, p)) {
    MarkedPoint pt;
    pt.rescaled_time = static_cast<double>(c.times.front()) / level.v_u;
    pt.mark = compute_mark(c, kind);
    pt.cluster_size = static_cast<int>(c.times.size());
    pt.truncated = c.truncated;
    mp.points.push_back(pt);
  }
  return mp;
}

MarkedPointProcess build_mrepp(std::span<const double> values, const ThresholdLevel& level, int p,
                               MarkKind kind) {
  return build_mrepp(extract_exceedances(values, level.u), level, p, kind);
}

double count_on_interval(const MarkedPointProcess& mp, std::span<const Interval> J, bool scaled) {
  double total = 0.0;
  for (const auto& pt : mp.points) {
    for (const auto& iv : J) {
      if (iv.contains(pt.rescaled_time)) {
        total += scaled ? mp.a_u * pt.mark : pt.mark;
        break;
      }
    }
  }
  return total;
}

MaxStatistic max_statistic(std::span<const double> values, double u) {
  if (values.empty()) throw EmptySample("max of empty series");
  double m = values[0];
  for (double v : values) m = std::max(m, v);
  return {m, m <= u};
}

void write_mrepp_csv_header(std::ostream& os) {
  os << "replica_id,rescaled_time,raw_mark,scaled_mark,cluster_size,truncated\n";
}

void write_mrepp_csv(std::ostream& os, const MarkedPointProcess& mp, int replica_id) {
  char buf[128];
  for (std::size_t i = 0; i < mp.points.size(); ++i) {
    const auto& pt = mp.points[i];
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%d,%d\n", replica_id, pt.rescaled_time,
                  pt.mark, mp.a_u * pt.mark, pt.cluster_size, pt.truncated ? 1 : 0);
    os << buf;
  }
}

}  // namespace mrepp
