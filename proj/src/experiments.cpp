#include "mrepp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace mrepp {

namespace {

constexpr std::size_t kNonPeriodicHorizon = 1000;
constexpr double kNonPeriodicTol = 1e-9;
constexpr std::uint64_t kCalibrationStream = 0x8000000000000000ull;

/// Orbit state generator backed by double iteration.
template <class F>
class DoubleGen {
 public:
  DoubleGen(F f, double x0, std::size_t burn_in) : f_(f), x_(x0) {
    for (std::size_t i = 0; i < burn_in; ++i) x_ = f_(x_);
  }
  double next() {
    double cur = x_;
    x_ = f_(x_);
    return cur;
  }

 private:
  F f_;
  double x_;
};

/// Stationary sampler for x -> 2^k x mod 1. Multiplication by a power of
/// two is exact in binary floating point, so plain double orbits collapse
/// onto the fixed point; a sliding window over a random bitstream realises
/// the same process exactly in law.
class Mod1Pow2Gen {
 public:
  Mod1Pow2Gen(int m, std::uint64_t seed, std::size_t burn_in)
      : rng_(seed), shift_(std::countr_zero(static_cast<unsigned>(m))) {
    w0_ = rng_();
    w1_ = rng_();
    skip_bits(static_cast<std::size_t>(shift_) * burn_in);
  }
  double next() {
    std::uint64_t window = off_ == 0 ? w0_ : ((w0_ << off_) | (w1_ >> (64 - off_)));
    skip_bits(static_cast<std::size_t>(shift_));
    return static_cast<double>(window >> 11) * 0x1.0p-53;
  }

 private:
  void skip_bits(std::size_t k) {
    off_ += k;
    while (off_ >= 64) {
      w0_ = w1_;
      w1_ = rng_();
      off_ -= 64;
    }
  }

  std::mt19937_64 rng_;
  std::uint64_t w0_ = 0, w1_ = 0;
  std::size_t off_ = 0;
  int shift_;
};

template <class Sink>
void with_state_gen(const MapSpec& map, std::uint64_t seed, std::size_t burn_in, Sink&& sink) {
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearMod1>) {
          if ((m.m & (m.m - 1)) == 0) {
            Mod1Pow2Gen gen(m.m, seed, burn_in);
            sink(gen);
          } else {
            std::mt19937_64 rng(seed);
            auto f = [mm = static_cast<double>(m.m)](double x) {
              double y = mm * x;
              y -= std::floor(y);
              if (y >= 1.0 || y < 0.0) y = 0.0;
              return y;
            };
            DoubleGen gen(f, uniform01(rng), burn_in);
            sink(gen);
          }
        } else if constexpr (std::is_same_v<T, Lsv>) {
          std::mt19937_64 rng(seed);
          auto f = [a = m.alpha](double x) {
            if (x < 0.5) return x * (1.0 + std::pow(2.0 * x, a));
            double y = 2.0 * x - 1.0;
            return y >= 1.0 ? 0.0 : y;
          };
          DoubleGen gen(f, uniform01(rng), burn_in);
          sink(gen);
        } else {
          std::mt19937_64 rng(seed);
          auto f = [spec = MapSpec{m}](double x) { return map_apply(spec, x); };
          DoubleGen gen(f, uniform01(rng), burn_in);
          sink(gen);
        }
      },
      map.variant);
}

struct Limits {
  double theta = 1.0;
  double expansion = 0.0;  // |Df^p(zeta)| when p >= 1
  MultiplicityDist dist;
};

MultiplicityDist gpd_for(const ObservableSpec& obs) {
  return std::visit(
      [](const auto& g) -> MultiplicityDist {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Type1Log>) {
          return MultiplicityDist::gpd_exp();
        } else if constexpr (std::is_same_v<T, Type2Pareto>) {
          return MultiplicityDist::gpd_pareto(g.alpha);
        } else {
          return MultiplicityDist::gpd_bounded(g.alpha);
        }
      },
      obs.g_type);
}

MultiplicityDist aot_for(const ObservableSpec& obs, double expansion) {
  return std::visit(
      [expansion](const auto& g) -> MultiplicityDist {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Type1Log>) {
          return MultiplicityDist::aot_log(expansion);
        } else if constexpr (std::is_same_v<T, Type2Pareto>) {
          return MultiplicityDist::aot_pareto(g.alpha, expansion);
        } else {
          return MultiplicityDist::aot_bounded(g.alpha, expansion);
        }
      },
      obs.g_type);
}

Limits resolve_limits(const ExperimentConfig& config) {
  if (config.replicas < 1) throw ConfigError("at least one replica required");
  if (!(config.tau > 0.0)) throw ConfigError("tau must be positive");
  if (config.n_levels.empty()) throw ConfigError("n_levels must be nonempty");
  for (std::size_t i = 1; i < config.n_levels.size(); ++i)
    if (config.n_levels[i] <= config.n_levels[i - 1])
      throw ConfigError("n_levels must be strictly ascending");
  if (config.p < 0) throw ConfigError("p must be nonnegative");

  Limits lim;
  double zeta = config.observable.zeta;
  if (config.p >= 1) {
    PeriodicCheck pc = verify_periodic(config.map, zeta, config.p);
    if (!pc.is_periodic)
      throw ConfigError("p >= 1 requires zeta to be periodic with prime period p");
    double d = std::fabs(pc.deriv_product);
    if (!(d > 1.0)) throw ConfigError("periodic centre must be repelling");
    lim.theta = 1.0 - 1.0 / d;
    lim.expansion = d;
  } else {
    double x = zeta;
    for (std::size_t j = 1; j <= kNonPeriodicHorizon; ++j) {
      x = map_apply(config.map, x);
      if (circle_dist(x, zeta) <= kNonPeriodicTol)
        throw ConfigError("zeta returns within tolerance; p must equal its prime period");
    }
    lim.theta = 1.0;
  }

  switch (config.kind) {
    case MarkKind::Repp:
      lim.dist = MultiplicityDist::geometric(lim.theta);
      break;
    case MarkKind::Pot:
      lim.dist = gpd_for(config.observable);
      break;
    case MarkKind::Aot:
      lim.dist = config.p >= 1 ? aot_for(config.observable, lim.expansion)
                               : gpd_for(config.observable);
      break;
  }
  return lim;
}

struct Calibration {
  ThresholdLevel level;
  double occupancy = 1.0;  // invariant-measure estimate of the induced base
};

Calibration calibrate(const ExperimentConfig& config, std::size_t n) {
  Calibration cal;
  const std::optional<Interval>& base =
      config.induced ? std::optional<Interval>(config.induced->base) : std::nullopt;
  if (config.threshold_mode.analytic) {
    cal.level =
        threshold_from_tau(config.observable, n, config.tau, AnalyticMode{config.threshold_mode.density});
    if (base) cal.occupancy = base->length();  // Lebesgue-invariant families
    return cal;
  }
  std::vector<double> values(n);
  std::size_t in_base = 0;
  std::uint64_t seed = mix_seed(config.master_seed, kCalibrationStream | n);
  with_state_gen(config.map, seed, kDefaultBurnIn, [&](auto& gen) {
    for (std::size_t t = 0; t < n; ++t) {
      double x = gen.next();
      values[t] = evaluate(config.observable, x);
      if (base && base->contains(x)) ++in_base;
    }
  });
  cal.level = threshold_from_tau(config.observable, n, config.tau, values);
  if (base) {
    cal.occupancy = static_cast<double>(in_base) / static_cast<double>(n);
    if (!(cal.occupancy > 0.0)) throw ConfigError("induced base set never visited");
  }
  return cal;
}

ExceedanceSeries scan_replica(const ExperimentConfig& config, std::uint64_t seed, std::size_t n,
                              const ThresholdLevel& level) {
  ExceedanceSeries out;
  out.u = level.u;
  out.series_length = static_cast<std::int64_t>(n);
  const double zeta = config.observable.zeta;
  const double radius = g_inverse(config.observable, level.u);
  with_state_gen(config.map, seed, kDefaultBurnIn, [&](auto& gen) {
    for (std::int64_t t = 0; t < out.series_length; ++t) {
      double x = gen.next();
      double d = circle_dist(x, zeta);
      if (d < radius) {
        double excess = g_of_dist(config.observable, d) - level.u;
        if (excess > 0.0) out.events.push_back({t, excess});
      }
    }
  });
  return out;
}

/// Numerator/denominator of the O'Brien ratio at window size p.
std::pair<std::int64_t, std::int64_t> obrien_counts(const ExceedanceSeries& ex, int p) {
  std::int64_t num = 0;
  for (std::size_t i = 0; i < ex.events.size(); ++i) {
    std::int64_t t = ex.events[i].time;
    if (t + p > ex.series_length - 1) continue;
    bool followed = i + 1 < ex.events.size() && ex.events[i + 1].time - t <= p;
    if (!followed) ++num;
  }
  return {num, static_cast<std::int64_t>(ex.events.size())};
}

void parallel_replicas(std::size_t replicas, const std::function<void(std::size_t)>& work) {
  std::size_t hw = std::thread::hardware_concurrency();
  std::size_t nthreads = std::min<std::size_t>(hw == 0 ? 1 : hw, replicas);
  if (nthreads <= 1) {
    for (std::size_t r = 0; r < replicas; ++r) work(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t i = 0; i < nthreads; ++i) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t r = next.fetch_add(1);
        if (r >= replicas) return;
        try {
          work(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

void append_field(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

ExceedanceSeries replica_exceedances(const ExperimentConfig& config, std::size_t replica,
                                     std::size_t n, const ThresholdLevel& level) {
  return scan_replica(config, mix_seed(config.master_seed, replica), n, level);
}

LevelRun run_level(const ExperimentConfig& config, std::size_t n) {
  Limits lim = resolve_limits(config);
  Calibration cal = calibrate(config, n);

  LevelRun run;
  run.n = n;
  run.level = cal.level;
  run.theta_limit = lim.theta;
  run.limit_dist = lim.dist;
  run.replicas.resize(config.replicas);

  const int p_est = std::max(config.p, 1);
  const std::size_t kn = default_kn(n);
  parallel_replicas(config.replicas, [&](std::size_t r) {
    ExceedanceSeries series = scan_replica(config, mix_seed(config.master_seed, r), n, cal.level);
    ReplicaSummary& s = run.replicas[r];
    s.process = build_mrepp(series, cal.level, config.p, config.kind);
    auto [num, den] = obrien_counts(series, p_est);
    s.obrien_num = num;
    s.obrien_den = den;
    s.dprime = dprime_diagnostic(series, config.p, kn);
    s.no_exceedance = series.events.empty();
  });
  return run;
}

PooledLevel pool_level(const ExperimentConfig& config, const LevelRun& run) {
  PooledLevel pooled;
  std::int64_t num = 0, den = 0;
  std::size_t clusters = 0, empty = 0;
  double dprime_sum = 0.0;
  // replicas are laid end to end on the rescaled axis before taking gaps:
  // within-window gaps alone are biased short when the window is only a few
  // mean waits long, while concatenated gaps stay exponential by
  // memorylessness
  const double window = static_cast<double>(run.n) * run.level.tail_prob;
  double offset = 0.0;
  double prev_point = -1.0;
  for (const auto& s : run.replicas) {
    num += s.obrien_num;
    den += s.obrien_den;
    clusters += s.process.points.size();
    dprime_sum += s.dprime;
    if (s.no_exceedance) ++empty;
    for (std::size_t i = 0; i < s.process.points.size(); ++i) {
      const auto& pt = s.process.points[i];
      if (!(config.exclude_truncated && pt.truncated))
        pooled.mark_samples.push_back(config.kind == MarkKind::Repp ? pt.mark
                                                                    : s.process.scaled_mark(i));
      double concatenated = offset + pt.rescaled_time;
      if (prev_point >= 0.0) pooled.gaps.push_back(concatenated - prev_point);
      prev_point = concatenated;
    }
    offset += window;
  }
  const double R = static_cast<double>(run.replicas.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  pooled.pooled_clusters = clusters;
  pooled.theta_hat = den > 0 ? static_cast<double>(num) / static_cast<double>(den) : nan;
  pooled.cluster_count = static_cast<double>(clusters) / R;
  pooled.dprime = dprime_sum / R;
  pooled.evl_prob = static_cast<double>(empty) / R;

  if (pooled.mark_samples.empty()) {
    pooled.mark_ks = nan;
  } else {
    auto ecdf = empirical_cdf(pooled.mark_samples);
    const MultiplicityDist& dist = run.limit_dist;
    auto cdf = [&dist](double x) { return multiplicity_cdf(dist, x); };
    if (config.kind == MarkKind::Repp) {
      // integer-supported limit: evaluate on the lattice covering the data
      const auto* geo = std::get_if<Geometric>(&dist.variant);
      double kmax = ecdf.sorted_samples.back();
      if (geo && geo->theta < 1.0)
        kmax = std::max(kmax, std::ceil(std::log(1e-12) / std::log1p(-geo->theta)));
      std::vector<double> grid;
      for (double k = 1.0; k <= kmax; k += 1.0) grid.push_back(k);
      pooled.mark_ks = ks_distance_grid(ecdf, cdf, grid).statistic;
    } else {
      pooled.mark_ks = ks_distance(ecdf, cdf).statistic;
    }
  }
  pooled.interarrival_ks =
      pooled.gaps.empty()
          ? nan
          : interarrival_exponential_check(pooled.gaps, run.theta_limit).statistic;
  return pooled;
}

namespace {

struct TransferPools {
  std::vector<double> orig_marks, ind_marks;
  std::vector<double> orig_counts, ind_counts;
};

TransferRow transfer_level(const ExperimentConfig& config, std::size_t n) {
  const Interval base = config.induced->base;
  const double zeta = config.observable.zeta;
  const bool whole_space = base.lo <= 0.0 && base.hi >= 1.0;
  if (!whole_space && !base.contains(zeta)) throw ContainmentError("zeta must lie in the base set");

  Calibration cal = calibrate(config, n);
  const ThresholdLevel& level = cal.level;
  const double radius = g_inverse(config.observable, level.u);
  if (!whole_space && !(zeta - radius >= base.lo && zeta + radius <= base.hi))
    throw ContainmentError("exceedance ball is not contained in the base set");

  const double v_ind = level.v_u * cal.occupancy;
  const auto n_ind = static_cast<std::int64_t>(
      std::llround(static_cast<double>(n) * level.tail_prob * v_ind));
  if (n_ind < 1) throw ConfigError("induced window is empty at this level");

  int p_ind = 0;
  if (config.p >= 1) {
    double x = zeta;
    for (int j = 1; j <= config.p; ++j) {
      x = map_apply(config.map, x);
      if (base.contains(x)) ++p_ind;
    }
    p_ind = std::max(p_ind, 1);
  }

  ThresholdLevel level_ind = level;
  level_ind.tail_prob = 1.0 / v_ind;
  level_ind.v_u = v_ind;

  const std::int64_t nn = static_cast<std::int64_t>(n);
  const std::int64_t hard_cap = nn * 16 + 4'000'000;
  std::vector<TransferPools> per_replica(config.replicas);
  parallel_replicas(config.replicas, [&](std::size_t r) {
    ExceedanceSeries orig, induced;
    orig.u = level.u;
    orig.series_length = nn;
    induced.u = level.u;
    induced.series_length = n_ind;
    with_state_gen(config.map, mix_seed(config.master_seed, r), kDefaultBurnIn, [&](auto& gen) {
      std::int64_t t = 0, i = 0;
      while (t < nn || i < n_ind) {
        if (t >= hard_cap)
          throw NonReturningError("induced window not filled within the iteration cap");
        double x = gen.next();
        bool in_base = base.contains(x);
        std::int64_t ind_idx = in_base ? i : -1;
        if (in_base) ++i;
        double d = circle_dist(x, zeta);
        if (d < radius) {
          double excess = g_of_dist(config.observable, d) - level.u;
          if (excess > 0.0) {
            if (t < nn) orig.events.push_back({t, excess});
            if (in_base && ind_idx < n_ind) induced.events.push_back({ind_idx, excess});
          }
        }
        ++t;
      }
    });
    MarkedPointProcess mp_orig = build_mrepp(orig, level, config.p, config.kind);
    MarkedPointProcess mp_ind = build_mrepp(induced, level_ind, p_ind, config.kind);
    TransferPools& pools = per_replica[r];
    const bool scaled = config.kind != MarkKind::Repp;
    for (std::size_t k = 0; k < mp_orig.points.size(); ++k) {
      if (config.exclude_truncated && mp_orig.points[k].truncated) continue;
      pools.orig_marks.push_back(scaled ? mp_orig.scaled_mark(k) : mp_orig.points[k].mark);
    }
    for (std::size_t k = 0; k < mp_ind.points.size(); ++k) {
      if (config.exclude_truncated && mp_ind.points[k].truncated) continue;
      pools.ind_marks.push_back(scaled ? mp_ind.scaled_mark(k) : mp_ind.points[k].mark);
    }
    Interval window{0.0, config.tau};
    pools.orig_counts.push_back(count_on_interval(mp_orig, {&window, 1}, scaled));
    pools.ind_counts.push_back(count_on_interval(mp_ind, {&window, 1}, scaled));
  });

  TransferPools all;
  for (const auto& pools : per_replica) {
    all.orig_marks.insert(all.orig_marks.end(), pools.orig_marks.begin(), pools.orig_marks.end());
    all.ind_marks.insert(all.ind_marks.end(), pools.ind_marks.begin(), pools.ind_marks.end());
    all.orig_counts.push_back(pools.orig_counts.front());
    all.ind_counts.push_back(pools.ind_counts.front());
  }

  TransferRow row;
  row.n = n;
  row.u_n = level.u;
  row.v_n = level.v_u;
  row.v_n_induced = v_ind;
  row.mark_ks = two_sample_ks(all.orig_marks, all.ind_marks);
  row.count_ks = two_sample_ks(all.orig_counts, all.ind_counts);
  return row;
}

}  // namespace

std::vector<TransferRow> transfer_check(const ExperimentConfig& config) {
  if (!config.induced) throw ConfigError("transfer check needs an induced base set");
  resolve_limits(config);
  std::vector<TransferRow> rows;
  rows.reserve(config.n_levels.size());
  for (std::size_t n : config.n_levels) rows.push_back(transfer_level(config, n));
  return rows;
}

ExperimentReport run_convergence(const ExperimentConfig& config) {
  resolve_limits(config);
  ExperimentReport report;
  report.rows.reserve(config.n_levels.size());
  for (std::size_t n : config.n_levels) {
    LevelRun run = run_level(config, n);
    PooledLevel pooled = pool_level(config, run);
    ReportRow row;
    row.n = n;
    row.u_n = run.level.u;
    row.a_n = run.level.a_u;
    row.v_n = run.level.v_u;
    row.theta_hat = pooled.theta_hat;
    row.cluster_count = pooled.cluster_count;
    row.mark_ks_vs_limit = pooled.mark_ks;
    row.interarrival_ks = pooled.interarrival_ks;
    row.dprime_value = pooled.dprime;
    row.evl_prob = pooled.evl_prob;
    if (config.induced) row.transfer_ks = transfer_level(config, n).mark_ks.statistic;
    report.rows.push_back(row);
  }
  return report;
}

std::string report_to_csv(const ExperimentReport& report) {
  std::string out =
      "n,u_n,a_n,v_n,theta_hat,cluster_count,mark_ks_vs_limit,interarrival_ks,dprime_value,"
      "evl_prob,transfer_ks\n";
  for (const auto& row : report.rows) {
    out += std::to_string(row.n);
    for (double v : {row.u_n, row.a_n, row.v_n, row.theta_hat, row.cluster_count,
                     row.mark_ks_vs_limit, row.interarrival_ks, row.dprime_value, row.evl_prob}) {
      out += ',';
      append_field(out, v);
    }
    out += ',';
    if (row.transfer_ks) append_field(out, *row.transfer_ks);
    out += '\n';
  }
  return out;
}

std::string report_to_json(const ExperimentReport& report) {
  std::string out = "{\"rows\":[";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& row = report.rows[i];
    if (i) out += ',';
    out += "{\"n\":" + std::to_string(row.n);
    const std::pair<const char*, double> fields[] = {
        {"u_n", row.u_n},
        {"a_n", row.a_n},
        {"v_n", row.v_n},
        {"theta_hat", row.theta_hat},
        {"cluster_count", row.cluster_count},
        {"mark_ks_vs_limit", row.mark_ks_vs_limit},
        {"interarrival_ks", row.interarrival_ks},
        {"dprime_value", row.dprime_value},
        {"evl_prob", row.evl_prob}};
    for (const auto& [name, value] : fields) {
      out += ",\"";
      out += name;
      out += "\":";
      append_field(out, value);
    }
    if (row.transfer_ks) {
      out += ",\"transfer_ks\":";
      append_field(out, *row.transfer_ks);
    }
    out += '}';
  }
  out += "]}";
  return out;
}

ExperimentReport parse_report_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ExperimentReport report;
  for (const auto& jr : j.at("rows")) {
    ReportRow row;
    row.n = jr.at("n").get<std::size_t>();
    row.u_n = jr.at("u_n").get<double>();
    row.a_n = jr.at("a_n").get<double>();
    row.v_n = jr.at("v_n").get<double>();
    row.theta_hat = jr.at("theta_hat").get<double>();
    row.cluster_count = jr.at("cluster_count").get<double>();
    row.mark_ks_vs_limit = jr.at("mark_ks_vs_limit").get<double>();
    row.interarrival_ks = jr.at("interarrival_ks").get<double>();
    row.dprime_value = jr.at("dprime_value").get<double>();
    row.evl_prob = jr.at("evl_prob").get<double>();
    if (jr.contains("transfer_ks")) row.transfer_ks = jr.at("transfer_ks").get<double>();
    report.rows.push_back(row);
  }
  return report;
}

void emit_report(const ExperimentReport& report, ReportFormat format, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open output file: " + path);
  os << (format == ReportFormat::Csv ? report_to_csv(report) : report_to_json(report));
  if (!os) throw IoError("failed writing output file: " + path);
}

}  // namespace mrepp
