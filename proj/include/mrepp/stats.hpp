#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "mrepp/common.hpp"
#include "mrepp/point_process.hpp"

namespace mrepp {

inline constexpr double kKs99 = 1.628;  // asymptotic 99% Kolmogorov quantile

struct EmpiricalCDF {
  std::vector<double> sorted_samples;

  std::size_t n() const { return sorted_samples.size(); }
  double operator()(double x) const;  // fraction of samples <= x
};

struct KSResult {
  double statistic = 0.0;
  double n_effective = 0.0;  // sample count (one-sample) or na*nb/(na+nb)

  double threshold_99() const { return kKs99 / std::sqrt(n_effective); }
};

EmpiricalCDF empirical_cdf(std::span<const double> samples);

/// sup |Fhat - F| evaluated on both sides of every sample point.
KSResult ks_distance(const EmpiricalCDF& ecdf, const std::function<double(double)>& cdf);

/// sup |Fhat - F| over an explicit evaluation grid, for comparisons against
/// discrete distributions whose jump points are known.
KSResult ks_distance_grid(const EmpiricalCDF& ecdf, const std::function<double(double)>& cdf,
                          std::span<const double> points);

/// Mean of e^{-y s} over the samples.
double empirical_laplace(std::span<const double> samples, double y);

/// KS of successive rescaled inter-point gaps against Exp(rate theta).
KSResult interarrival_exponential_check(const MarkedPointProcess& mp, double theta);
KSResult interarrival_exponential_check(std::span<const double> gaps, double theta);

KSResult two_sample_ks(std::span<const double> a, std::span<const double> b);

inline double two_sample_threshold_99(std::size_t na, std::size_t nb) {
  return kKs99 * std::sqrt(static_cast<double>(na + nb) /
                           (static_cast<double>(na) * static_cast<double>(nb)));
}

}  // namespace mrepp
