#include <cmath>
#include <random>

#include "doctest.h"
#include "mrepp/dynamics.hpp"

using namespace mrepp;

TEST_CASE("map_apply on the three families") {
  auto doubling = MapSpec::mod1(2);
  CHECK(map_apply(doubling, 0.6) == doctest::Approx(0.2).epsilon(1e-14));

  auto lsv = MapSpec::lsv(0.5);
  // reference value from 40-digit evaluation of 0.25 (1 + 2^0.5 0.25^0.5)
  CHECK(map_apply(lsv, 0.25) == doctest::Approx(0.4267766952966369).epsilon(1e-14));
  CHECK(map_apply(lsv, 0.75) == doctest::Approx(0.5).epsilon(1e-14));
  // x = 1/2 belongs to the right branch
  CHECK(map_apply(lsv, 0.5) == doctest::Approx(0.0));

  auto pw = MapSpec::piecewise({0.5}, {2.0, 2.0});
  CHECK(map_apply(pw, 0.3) == doctest::Approx(0.6));
  CHECK(map_apply(pw, 0.8) == doctest::Approx(0.6));
}

TEST_CASE("map_derivative values and the finite-difference oracle") {
  CHECK(map_derivative(MapSpec::mod1(3), 0.1) == 3.0);

  auto lsv = MapSpec::lsv(0.5);
  CHECK(map_derivative(lsv, 0.75) == 2.0);

  double d = map_derivative(lsv, 0.25);
  CHECK(d == doctest::Approx(1.0 + 1.5 * std::sqrt(2.0) * 0.5).epsilon(1e-12));
  double h = 1e-6;
  double fd = (map_apply(lsv, 0.25 + h) - map_apply(lsv, 0.25 - h)) / (2.0 * h);
  CHECK(d == doctest::Approx(fd).epsilon(1e-6));

  CHECK_THROWS_AS(map_derivative(lsv, 0.5), BreakpointError);
  CHECK_THROWS_AS(map_derivative(MapSpec::piecewise({0.5}, {2.0, 2.0}), 0.5), BreakpointError);
}

TEST_CASE("map spec validation") {
  CHECK_THROWS_AS(MapSpec::mod1(1), DomainError);
  CHECK_THROWS_AS(MapSpec::lsv(1.0), DomainError);
  CHECK_THROWS_AS(MapSpec::lsv(0.0), DomainError);
  CHECK_THROWS_AS(MapSpec::piecewise({0.5}, {2.0, 0.5}), DomainError);
  CHECK_THROWS_AS(MapSpec::piecewise({0.5, 0.4}, {2.0, 2.0, 2.0}), DomainError);
}

TEST_CASE("iterate records the expected orbits") {
  auto doubling = MapSpec::mod1(2);

  Orbit third = iterate(doubling, 1.0 / 3.0, 4, 0);
  CHECK(third.states[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(third.states[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(third.states[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(third.states[3] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  Orbit fixed = iterate(doubling, 0.0, 3, 0);
  CHECK(fixed.states == std::vector<double>{0.0, 0.0, 0.0});

  Orbit burned = iterate(doubling, 0.6, 3, 1);
  CHECK(burned.states[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(burned.states[1] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(burned.states[2] == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("iterate is deterministic bitwise") {
  auto lsv = MapSpec::lsv(0.4);
  Orbit a = iterate(lsv, 0.123456, 500, 100);
  Orbit b = iterate(lsv, 0.123456, 500, 100);
  CHECK(a.states == b.states);
}

TEST_CASE("orbit states satisfy the step identity and stay in [0,1)") {
  std::mt19937_64 rng(7);
  for (const auto& map : {MapSpec::mod1(3), MapSpec::lsv(0.4), MapSpec::piecewise({0.3, 0.7}, {3.0, -2.5, 4.0})}) {
    double x0 = uniform01(rng);
    Orbit orbit = iterate(map, x0, 200, 0);
    for (std::size_t i = 0; i + 1 < orbit.states.size(); ++i) {
      CHECK(orbit.states[i] >= 0.0);
      CHECK(orbit.states[i] < 1.0);
      CHECK(orbit.states[i + 1] == map_apply(map, orbit.states[i]));
    }
  }
}

TEST_CASE("verify_periodic") {
  auto doubling = MapSpec::mod1(2);

  auto fixed = verify_periodic(doubling, 0.0, 1);
  CHECK(fixed.is_periodic);
  CHECK(fixed.deriv_product == 2.0);

  // 1/3 -> 2/3 -> 1/3, derivative product 2 * 2
  auto period2 = verify_periodic(doubling, 1.0 / 3.0, 2);
  CHECK(period2.is_periodic);
  CHECK(period2.deriv_product == doctest::Approx(4.0));

  CHECK_FALSE(verify_periodic(doubling, 0.1, 1).is_periodic);

  // deriv_product = m at the fixed point, for every m
  for (int m = 2; m <= 7; ++m)
    CHECK(verify_periodic(MapSpec::mod1(m), 0.0, 1).deriv_product == static_cast<double>(m));

  // period-1 point reported as not having prime period 2
  CHECK_FALSE(verify_periodic(doubling, 0.0, 2).is_periodic);
}

TEST_CASE("hitting_time") {
  auto doubling = MapSpec::mod1(2);
  Orbit orbit = iterate(doubling, 0.6, 10, 0);  // 0.6, 0.2, 0.4, 0.8, ...
  auto hit = hitting_time(orbit, Interval{0.75, 1.0}, 0);
  REQUIRE(hit.has_value());
  CHECK(*hit == 3);

  Orbit fixed = iterate(doubling, 0.0, 50, 0);
  CHECK_FALSE(hitting_time(fixed, Interval{0.5, 1.0}, 0).has_value());

  Orbit near = iterate(doubling, 0.6, 4, 0);
  // states 0.6, 0.2, ... : nothing in [0.65, 0.75) until the end
  CHECK_FALSE(hitting_time(near, Interval{0.65, 0.75}, 0).has_value());

  std::vector<double> handmade{0.6, 0.7, 0.1};
  Orbit fake;
  fake.states = handmade;
  fake.map = doubling;
  auto quick = hitting_time(fake, Interval{0.65, 0.75}, 0);
  REQUIRE(quick.has_value());
  CHECK(*quick == 1);
}

TEST_CASE("induce on the doubling map") {
  auto doubling = MapSpec::mod1(2);
  Interval B{0.5, 1.0};

  InducedSeries s = induce(doubling, B, 0.6, 3);
  REQUIRE(s.return_times.size() == 3);
  CHECK(s.return_times[0] == 3);  // 0.6 -> 0.2 -> 0.4 -> 0.8
  CHECK(s.induced_states[1] == doctest::Approx(0.8).epsilon(1e-12));

  InducedSeries quick = induce(doubling, B, 0.75, 1);
  CHECK(quick.return_times[0] == 1);
  CHECK(quick.induced_states[1] == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(induce(doubling, B, 0.3, 1), DomainError);
  // 0.75 -> 0.5 -> 0 -> 0 -> ... never comes back to [0.75, 1)
  CHECK_THROWS_AS(induce(doubling, Interval{0.75, 1.0}, 0.75, 1, 1000), NonReturningError);
}

TEST_CASE("induction identity: cumulative times index the original orbit") {
  std::mt19937_64 rng(11);
  for (const auto& map : {MapSpec::mod1(3), MapSpec::lsv(0.4)}) {
    Interval B{0.5, 1.0};
    double x0 = 0.5 + 0.5 * uniform01(rng);
    InducedSeries s = induce(map, B, x0, 20);

    REQUIRE(s.cumulative_times.size() == s.induced_states.size());
    CHECK(s.cumulative_times[0] == 0);
    std::int64_t acc = 0;
    for (std::size_t j = 0; j < s.return_times.size(); ++j) {
      CHECK(s.return_times[j] >= 1);
      acc += s.return_times[j];
      CHECK(s.cumulative_times[j + 1] == acc);
    }

    Orbit orbit = iterate(map, x0, static_cast<std::size_t>(s.cumulative_times.back()) + 1, 0);
    for (std::size_t j = 0; j < s.induced_states.size(); ++j) {
      CHECK(orbit.states[static_cast<std::size_t>(s.cumulative_times[j])] == s.induced_states[j]);
      CHECK(B.contains(s.induced_states[j]));
    }
  }
}

TEST_CASE("hitting-time shift along an orbit") {
  // with r_B(x) > j, the hitting time of U c B from time j is the hitting
  // time from time 0 minus j
  auto map = MapSpec::mod1(3);
  Interval B{0.5, 1.0};
  Interval U{0.7, 0.8};
  std::mt19937_64 rng(23);
  int checked = 0;
  while (checked < 25) {
    double x0 = uniform01(rng);
    Orbit orbit = iterate(map, x0, 400, 0);
    auto from0 = hitting_time(orbit, U, 0);
    if (!from0) continue;
    // pick j below the first entry into B (so r_B(x) > j)
    auto intoB = hitting_time(orbit, B, 0);
    REQUIRE(intoB.has_value());
    for (std::int64_t j = 1; j < *intoB && j < 4; ++j) {
      auto fromj = hitting_time(orbit, U, static_cast<std::size_t>(j));
      REQUIRE(fromj.has_value());
      CHECK(*fromj == *from0 - j);
      ++checked;
    }
  }
}

TEST_CASE("LSV induced map on [1/2,1] returns through the expected gates") {
  // first return to [1/2,1] happens through the left-branch staircase:
  // return time k corresponds to an entry interval shrinking with k
  auto lsv = MapSpec::lsv(0.6);
  Interval B{0.5, 1.0};
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    double x0 = 0.5 + 0.5 * uniform01(rng);
    InducedSeries s = induce(lsv, B, x0, 5);
    for (std::size_t j = 0; j + 1 < s.induced_states.size(); ++j) {
      // the image of an induced state must either stay in B (return time 1)
      // or fall into the left branch and climb back monotonically
      double y = map_apply(lsv, s.induced_states[j]);
      if (s.return_times[j] == 1) {
        CHECK(B.contains(y));
      } else {
        CHECK(y < 0.5);
        for (std::int64_t k = 1; k < s.return_times[j]; ++k) {
          double next = map_apply(lsv, y);
          CHECK(next > y);  // monotone climb within the left branch
          y = next;
        }
        CHECK(B.contains(y));
      }
    }
  }
}
