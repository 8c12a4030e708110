#include "mrepp/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace mrepp {

namespace {

double frac_unit(double y) {
  double f = y - std::floor(y);
  if (f >= 1.0) f = 0.0;  // guard against rounding at the top
  if (f < 0.0) f = 0.0;
  return f;
}

void validate(const LinearMod1& m) {
  if (m.m < 2) throw DomainError("LinearMod1 requires m >= 2");
}

void validate(const PiecewiseLinear& pw) {
  if (pw.slopes.size() != pw.breakpoints.size() + 1)
    throw DomainError("PiecewiseLinear needs slopes.size() == breakpoints.size() + 1");
  double prev = 0.0;
  for (double b : pw.breakpoints) {
    if (!(b > prev && b < 1.0)) throw DomainError("breakpoints must be strictly increasing in (0,1)");
    prev = b;
  }
  for (double s : pw.slopes)
    if (!(std::fabs(s) > 1.0)) throw DomainError("every |slope| must exceed 1");
}

void validate(const Lsv& l) {
  if (!(l.alpha > 0.0 && l.alpha < 1.0)) throw DomainError("LSV requires alpha in (0,1)");
}

std::size_t pw_branch(const PiecewiseLinear& pw, double x) {
  // half-open branches [b_i, b_{i+1})
  return std::upper_bound(pw.breakpoints.begin(), pw.breakpoints.end(), x) - pw.breakpoints.begin();
}

}  // namespace

MapSpec MapSpec::mod1(int m) {
  MapSpec spec{LinearMod1{m}};
  validate(std::get<LinearMod1>(spec.variant));
  return spec;
}

MapSpec MapSpec::piecewise(std::vector<double> breakpoints, std::vector<double> slopes) {
  MapSpec spec{PiecewiseLinear{std::move(breakpoints), std::move(slopes)}};
  validate(std::get<PiecewiseLinear>(spec.variant));
  return spec;
}

MapSpec MapSpec::lsv(double alpha) {
  MapSpec spec{Lsv{alpha}};
  validate(std::get<Lsv>(spec.variant));
  return spec;
}

double map_apply(const MapSpec& map, double x) {
  return std::visit(
      [x](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearMod1>) {
          return frac_unit(static_cast<double>(m.m) * x);
        } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
          std::size_t i = pw_branch(m, x);
          double left = i == 0 ? 0.0 : m.breakpoints[i - 1];
          return frac_unit(m.slopes[i] * (x - left));
        } else {
          if (x < 0.5) return x * (1.0 + std::pow(2.0 * x, m.alpha));
          return frac_unit(2.0 * x - 1.0);
        }
      },
      map.variant);
}

double map_derivative(const MapSpec& map, double x) {
  return std::visit(
      [x](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearMod1>) {
          return static_cast<double>(m.m);
        } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
          for (double b : m.breakpoints)
            if (x == b) throw BreakpointError("derivative undefined at branch boundary");
          return m.slopes[pw_branch(m, x)];
        } else {
          if (x == 0.5) throw BreakpointError("derivative undefined at x = 1/2");
          if (x < 0.5) return 1.0 + (1.0 + m.alpha) * std::pow(2.0 * x, m.alpha);
          return 2.0;
        }
      },
      map.variant);
}

Orbit iterate(const MapSpec& map, double x0, std::size_t n, std::size_t burn_in) {
  if (!(x0 >= 0.0 && x0 < 1.0)) throw DomainError("x0 must lie in [0,1)");
  if (n == 0) throw DomainError("orbit length must be positive");
  Orbit orbit;
  orbit.map = map;
  orbit.burn_in = burn_in;
  double x = x0;
  for (std::size_t i = 0; i < burn_in; ++i) x = map_apply(map, x);
  orbit.states.resize(n);
  orbit.states[0] = x;
  for (std::size_t i = 1; i < n; ++i) orbit.states[i] = map_apply(map, orbit.states[i - 1]);
  return orbit;
}

PeriodicCheck verify_periodic(const MapSpec& map, double zeta, int p, double tol) {
  if (p < 1) throw DomainError("period must be >= 1");
  PeriodicCheck out;
  double x = zeta;
  double prod = 1.0;
  bool prime = true;
  for (int j = 0; j < p; ++j) {
    prod *= map_derivative(map, x);
    x = map_apply(map, x);
    if (j + 1 < p && circle_dist(x, zeta) <= tol) prime = false;
  }
  out.deriv_product = prod;
  out.is_periodic = prime && circle_dist(x, zeta) <= tol;
  return out;
}

std::optional<std::int64_t> hitting_time(const Orbit& orbit, Interval target, std::size_t start) {
  if (start >= orbit.states.size()) throw DomainError("start index outside orbit");
  for (std::size_t j = start + 1; j < orbit.states.size(); ++j) {
    if (target.contains(orbit.states[j])) return static_cast<std::int64_t>(j - start);
  }
  return std::nullopt;
}

InducedSeries induce(const MapSpec& map, Interval B, double x0, std::size_t n_returns,
                     std::int64_t iteration_cap) {
  if (!(B.length() > 0.0)) throw DomainError("base set must have positive length");
  if (!B.contains(x0)) throw DomainError("x0 must lie in the base set");
  InducedSeries out;
  out.base_set = B;
  out.induced_states.reserve(n_returns + 1);
  out.return_times.reserve(n_returns);
  out.cumulative_times.reserve(n_returns + 1);
  out.induced_states.push_back(x0);
  out.cumulative_times.push_back(0);

  double x = x0;
  std::int64_t absolute = 0;
  for (std::size_t j = 0; j < n_returns; ++j) {
    std::int64_t steps = 0;
    double y = x;
    do {
      y = map_apply(map, y);
      ++steps;
      if (steps > iteration_cap)
        throw NonReturningError("no return to base set within iteration cap");
    } while (!B.contains(y));
    absolute += steps;
    x = y;
    out.return_times.push_back(steps);
    out.cumulative_times.push_back(absolute);
    out.induced_states.push_back(x);
  }
  return out;
}

}  // namespace mrepp
