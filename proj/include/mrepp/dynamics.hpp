#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "mrepp/common.hpp"

namespace mrepp {

inline constexpr double kPeriodicTol = 1e-12;
inline constexpr std::int64_t kReturnCap = 100'000'000;
inline constexpr std::size_t kDefaultBurnIn = 1000;

/// x -> m*x mod 1 with integer m >= 2.
struct LinearMod1 {
  int m = 2;
};

/// Piecewise affine expanding map. `breakpoints` are the interior branch
/// boundaries; branch i covers [b_i, b_{i+1}) with b_0 = 0 and b_last = 1,
/// and maps x -> frac(slopes[i] * (x - b_i)).
struct PiecewiseLinear {
  std::vector<double> breakpoints;
  std::vector<double> slopes;
};

/// Intermittent map with a neutral fixed point at 0:
///   x (1 + 2^alpha x^alpha)  on [0, 1/2),
///   2x - 1                   on [1/2, 1].
struct Lsv {
  double alpha = 0.5;
};

struct MapSpec {
  std::variant<LinearMod1, PiecewiseLinear, Lsv> variant;

  static MapSpec mod1(int m);
  static MapSpec piecewise(std::vector<double> breakpoints, std::vector<double> slopes);
  static MapSpec lsv(double alpha);
};

struct Orbit {
  std::vector<double> states;
  std::uint64_t seed = 0;
  std::size_t burn_in = 0;
  MapSpec map;
};

/// First-return series on a base interval B. `induced_states[j]` is the
/// state after j returns, i.e. the original orbit state at absolute time
/// `cumulative_times[j]`; `return_times[j]` is the j-th return time and
/// `cumulative_times[j]` the sum of the first j return times.
struct InducedSeries {
  Interval base_set;
  std::vector<double> induced_states;         // n_returns + 1 entries
  std::vector<std::int64_t> return_times;     // n_returns entries, each >= 1
  std::vector<std::int64_t> cumulative_times; // n_returns + 1 entries, starts at 0
};

double map_apply(const MapSpec& map, double x);

/// Derivative f'(x). Throws BreakpointError at a branch boundary where the
/// one-sided derivatives disagree (LinearMod1 has constant slope m, so it
/// never throws).
double map_derivative(const MapSpec& map, double x);

Orbit iterate(const MapSpec& map, double x0, std::size_t n, std::size_t burn_in);

struct PeriodicCheck {
  bool is_periodic = false;
  double deriv_product = 0.0;
};

/// Checks that zeta has prime period p (circle distance within tol) and
/// returns the derivative product along the periodic orbit.
PeriodicCheck verify_periodic(const MapSpec& map, double zeta, int p, double tol = kPeriodicTol);

/// Least j >= 1 with states[start + j] in target; nullopt when the orbit
/// ends before a hit.
std::optional<std::int64_t> hitting_time(const Orbit& orbit, Interval target, std::size_t start = 0);

/// Records n_returns successive first returns of x0 to B.
InducedSeries induce(const MapSpec& map, Interval B, double x0, std::size_t n_returns,
                     std::int64_t iteration_cap = kReturnCap);

}  // namespace mrepp
