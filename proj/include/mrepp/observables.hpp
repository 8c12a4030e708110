#pragma once

#include <span>
#include <variant>

#include "mrepp/common.hpp"

namespace mrepp {

/// g(d) = -log d, unbounded observable with q == 1.
struct Type1Log {};

/// g(d) = d^(-1/alpha), heavy-tailed observable.
struct Type2Pareto {
  double alpha = 1.0;
};

/// g(d) = D - d^(1/alpha), bounded observable with finite top D.
struct Type3Bounded {
  double D = 1.0;
  double alpha = 1.0;
};

/// Distance observable phi(x) = g(circle_dist(x, zeta)).
struct ObservableSpec {
  std::variant<Type1Log, Type2Pareto, Type3Bounded> g_type;
  double zeta = 0.0;

  static ObservableSpec log_type(double zeta);
  static ObservableSpec pareto(double alpha, double zeta);
  static ObservableSpec bounded(double D, double alpha, double zeta);
};

/// A calibrated threshold: u with its exceedance probability, the time
/// scale v_u = 1/tail_prob and the mark scale a_u.
struct ThresholdLevel {
  double u = 0.0;
  double tail_prob = 0.0;
  double v_u = 0.0;
  double a_u = 0.0;
};

struct AnalyticMode {
  double density = 1.0;  // invariant density at zeta
};

double evaluate(const ObservableSpec& obs, double x);

/// g applied to a raw distance (no recentering).
double g_of_dist(const ObservableSpec& obs, double d);

/// Radius r with g(r) = u.
double g_inverse(const ObservableSpec& obs, double u);

/// u_F = g(0): +infinity for types 1-2, D for type 3.
double upper_endpoint(const ObservableSpec& obs);

/// Mark scale: 1 for Type1Log, 1/u for Type2Pareto, 1/(D-u) for Type3Bounded.
double scaling_a(const ObservableSpec& obs, double u);

/// Solves n * P(X_0 > u) = tau with P(X_0 > u) = 2 g^{-1}(u) * density.
ThresholdLevel threshold_from_tau(const ObservableSpec& obs, std::size_t n, double tau,
                                  AnalyticMode mode);

/// Empirical-quantile threshold: u is the order statistic leaving exactly
/// floor(tau * N / n) strict exceedances among the N samples.
ThresholdLevel threshold_from_tau(const ObservableSpec& obs, std::size_t n, double tau,
                                  std::span<const double> samples);

}  // namespace mrepp
