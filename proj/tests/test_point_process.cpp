#include <algorithm>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "mrepp/point_process.hpp"

using namespace mrepp;

namespace {

ExceedanceSeries series_from_times(const std::vector<std::int64_t>& times, std::int64_t length,
                                   double excess = 1.0) {
  ExceedanceSeries ex;
  ex.u = 0.0;
  ex.series_length = length;
  for (auto t : times) ex.events.push_back({t, excess});
  return ex;
}

// exhaustive reference on the raw 0/1 pattern: a cluster ends at an
// exceedance with no further exceedance in the next p slots
std::vector<std::vector<std::int64_t>> brute_force_clusters(const std::vector<char>& pattern,
                                                            int p) {
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> current;
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(pattern.size()); ++t) {
    if (!pattern[static_cast<std::size_t>(t)]) continue;
    current.push_back(t);
    bool ends = true;
    for (int j = 1; j <= p; ++j) {
      std::int64_t s = t + j;
      if (s < static_cast<std::int64_t>(pattern.size()) && pattern[static_cast<std::size_t>(s)])
        ends = false;
    }
    if (ends) {
      out.push_back(current);
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

}  // namespace

TEST_CASE("extract_exceedances is strict") {
  std::vector<double> values{1, 5, 2, 7};
  auto ex = extract_exceedances(values, 4.0);
  REQUIRE(ex.events.size() == 2);
  CHECK(ex.events[0].time == 1);
  CHECK(ex.events[0].excess == doctest::Approx(1.0));
  CHECK(ex.events[1].time == 3);
  CHECK(ex.events[1].excess == doctest::Approx(3.0));

  CHECK(extract_exceedances(std::vector<double>{1, 2, 3}, 10.0).events.empty());
  CHECK(extract_exceedances(std::vector<double>{4, 4, 4}, 4.0).events.empty());
}

TEST_CASE("identify_clusters gap rule") {
  auto ex = series_from_times({3, 4, 6, 20}, 25);
  auto c2 = identify_clusters(ex, 2);
  REQUIRE(c2.size() == 2);
  CHECK(c2[0].times == std::vector<std::int64_t>{3, 4, 6});
  CHECK(c2[1].times == std::vector<std::int64_t>{20});
  CHECK_FALSE(c2[1].truncated);

  auto c0 = identify_clusters(ex, 0);
  CHECK(c0.size() == 4);

  std::vector<std::int64_t> run;
  for (std::int64_t t = 0; t <= 9; ++t) run.push_back(t);
  auto c1 = identify_clusters(series_from_times(run, 100), 1);
  CHECK(c1.size() == 1);
}

TEST_CASE("final cluster truncation flag") {
  // fewer than p+1 observations after the last exceedance
  auto tight = identify_clusters(series_from_times({8}, 10), 2);
  REQUIRE(tight.size() == 1);
  CHECK(tight[0].truncated);  // 10 - 8 = 2 <= p

  auto roomy = identify_clusters(series_from_times({7}, 10), 2);
  CHECK_FALSE(roomy[0].truncated);  // 10 - 7 = 3 > p
}

TEST_CASE("compute_mark for the three kinds") {
  Cluster c{{1, 2, 3}, {0.5, 1.2, 0.3}, false};
  CHECK(compute_mark(c, MarkKind::Aot) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(compute_mark(c, MarkKind::Pot) == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(compute_mark(c, MarkKind::Repp) == 3.0);

  Cluster single{{5}, {0.7}, false};
  CHECK(compute_mark(single, MarkKind::Aot) == compute_mark(single, MarkKind::Pot));
  CHECK(compute_mark(single, MarkKind::Repp) == 1.0);

  Cluster flat{{1, 2, 3, 4}, {1.0, 1.0, 1.0, 1.0}, false};
  CHECK(compute_mark(flat, MarkKind::Aot) == 4.0);
  CHECK(compute_mark(flat, MarkKind::Pot) == 1.0);
  CHECK(compute_mark(flat, MarkKind::Repp) == 4.0);
}

TEST_CASE("build_mrepp composition") {
  ThresholdLevel level{4.0, 0.25, 4.0, 1.0};

  auto empty = build_mrepp(std::vector<double>{1.0, 2.0}, level, 1, MarkKind::Aot);
  CHECK(empty.points.empty());

  std::vector<double> values{0, 0, 5, 0, 0, 0};
  auto one = build_mrepp(values, level, 1, MarkKind::Pot);
  REQUIRE(one.points.size() == 1);
  CHECK(one.points[0].rescaled_time == doctest::Approx(2.0 / 4.0));
  CHECK(one.points[0].mark == doctest::Approx(1.0));
  CHECK(one.scaled_mark(0) == doctest::Approx(1.0));
}

TEST_CASE("count_on_interval") {
  MarkedPointProcess mp;
  mp.u = 1.0;
  mp.v_u = 10.0;
  mp.a_u = 2.0;
  std::vector<Interval> whole{{0.0, 1.0}};
  CHECK(count_on_interval(mp, whole, false) == 0.0);

  mp.points.push_back({0.4, 2.0, 1, false});
  CHECK(count_on_interval(mp, whole, false) == doctest::Approx(2.0));
  CHECK(count_on_interval(mp, whole, true) == doctest::Approx(4.0));
  std::vector<Interval> late{{0.5, 1.0}};
  CHECK(count_on_interval(mp, late, false) == 0.0);

  mp.points.push_back({0.7, 3.0, 2, false});
  std::vector<Interval> early{{0.0, 0.5}};
  double total = count_on_interval(mp, whole, false);
  CHECK(total == doctest::Approx(count_on_interval(mp, early, false) +
                                 count_on_interval(mp, late, false)));
}

TEST_CASE("max_statistic and the empty-process identity") {
  auto below = max_statistic(std::vector<double>{1, 5, 2}, 6.0);
  CHECK(below.m_n == 5.0);
  CHECK(below.no_exceedance);

  auto above = max_statistic(std::vector<double>{1, 7, 2}, 6.0);
  CHECK(above.m_n == 7.0);
  CHECK_FALSE(above.no_exceedance);

  std::mt19937_64 rng(41);
  ThresholdLevel level{0.8, 0.2, 5.0, 1.0};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> values(30);
    for (auto& v : values) v = uniform01(rng);
    auto stat = max_statistic(values, level.u);
    auto mp = build_mrepp(values, level, 2, MarkKind::Repp);
    CHECK(stat.no_exceedance == mp.points.empty());
  }
}

TEST_CASE("clusters partition the exceedances and match brute force") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 500; ++trial) {
    int length = 4 + static_cast<int>(rng() % 17);  // <= 20
    int p = static_cast<int>(rng() % 4);            // <= 3
    std::vector<char> pattern(static_cast<std::size_t>(length), 0);
    std::vector<std::int64_t> times;
    for (int t = 0; t < length; ++t) {
      if (rng() % 3 == 0) {
        pattern[static_cast<std::size_t>(t)] = 1;
        times.push_back(t);
      }
    }
    if (times.empty()) continue;

    auto ex = series_from_times(times, length);
    auto clusters = identify_clusters(ex, p);
    auto reference = brute_force_clusters(pattern, p);

    REQUIRE(clusters.size() == reference.size());
    std::vector<std::int64_t> flattened;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      CHECK(clusters[i].times == reference[i]);
      flattened.insert(flattened.end(), clusters[i].times.begin(), clusters[i].times.end());
    }
    CHECK(flattened == times);  // partition, order preserved
  }
}

TEST_CASE("mark axioms and dominance") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t size = 1 + rng() % 6;
    Cluster c;
    for (std::size_t i = 0; i < size; ++i) {
      c.times.push_back(static_cast<std::int64_t>(i));
      c.excesses.push_back(0.01 + uniform01(rng));
    }
    double aot = compute_mark(c, MarkKind::Aot);
    double pot = compute_mark(c, MarkKind::Pot);
    double repp = compute_mark(c, MarkKind::Repp);

    CHECK(aot >= 0.0);
    CHECK(pot >= 0.0);
    CHECK(repp >= 1.0);
    CHECK(aot >= pot);
    CHECK(aot <= repp * pot + 1e-12);
    if (repp == 1.0) CHECK(aot == pot);

    // monotone under adding one exceedance
    Cluster bigger = c;
    bigger.times.push_back(static_cast<std::int64_t>(size));
    bigger.excesses.push_back(0.01 + uniform01(rng));
    CHECK(compute_mark(bigger, MarkKind::Aot) >= aot);
    CHECK(compute_mark(bigger, MarkKind::Pot) >= pot);
    CHECK(compute_mark(bigger, MarkKind::Repp) >= repp);
  }
}

TEST_CASE("sum rule and p-monotonicity") {
  std::mt19937_64 rng(7331);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::int64_t> times;
    std::int64_t t = 0;
    while (times.size() < 12) {
      t += 1 + static_cast<std::int64_t>(rng() % 6);
      times.push_back(t);
    }
    auto ex = series_from_times(times, t + 10);

    std::size_t prev_count = times.size() + 1;
    for (int p = 0; p <= 4; ++p) {
      auto clusters = identify_clusters(ex, p);
      std::size_t repp_total = 0;
      for (const auto& c : clusters) repp_total += c.times.size();
      CHECK(repp_total == times.size());
      CHECK(clusters.size() <= prev_count);
      prev_count = clusters.size();
    }
  }
}

TEST_CASE("marks unchanged by adjoining sub-threshold observations") {
  std::vector<double> core{0, 5, 6, 0, 0};
  std::vector<double> padded{0, 5, 6, 0, 0, 1, 2, 3};
  ThresholdLevel level{4.0, 0.5, 2.0, 1.0};
  auto a = build_mrepp(core, level, 1, MarkKind::Aot);
  auto b = build_mrepp(padded, level, 1, MarkKind::Aot);
  REQUIRE(a.points.size() == b.points.size());
  CHECK(a.points[0].mark == b.points[0].mark);
}

TEST_CASE("csv serialization of a marked process") {
  MarkedPointProcess mp;
  mp.a_u = 0.5;
  mp.points.push_back({0.25, 2.0, 2, false});
  mp.points.push_back({0.75, 1.0, 1, true});
  std::ostringstream os;
  write_mrepp_csv_header(os);
  write_mrepp_csv(os, mp, 7);
  CHECK(os.str() ==
        "replica_id,rescaled_time,raw_mark,scaled_mark,cluster_size,truncated\n"
        "7,0.25,2,1,2,0\n"
        "7,0.75,1,0.5,1,1\n");
}
