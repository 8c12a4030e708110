#pragma once

#include <random>
#include <span>
#include <variant>
#include <vector>

#include "mrepp/common.hpp"
#include "mrepp/dynamics.hpp"
#include "mrepp/point_process.hpp"

namespace mrepp {

/// Cluster-size law 1 - (1-theta)^floor(x), supported on positive integers.
struct Geometric {
  double theta = 0.5;
};

/// 1 - e^{-x}.
struct GpdExp {};

/// 1 - (1+x)^{-beta}.
struct GpdPareto {
  double beta = 1.0;
};

/// 1 - (1-x)^{gamma} on [0, 1].
struct GpdBounded {
  double gamma = 1.0;
};

/// Aggregate-mark laws with expansion factor M at the periodic centre.
/// Piecewise in the branch index kappa (extra in-cluster returns).
struct AotLog {
  double expansion = 3.0;  // M > 1
};
struct AotPareto {
  double alpha = 1.0;
  double expansion = 2.0;
};
struct AotBounded {
  double alpha = 1.0;
  double expansion = 2.0;
};

struct MultiplicityDist {
  std::variant<Geometric, GpdExp, GpdPareto, GpdBounded, AotLog, AotPareto, AotBounded> variant;

  static MultiplicityDist geometric(double theta);
  static MultiplicityDist gpd_exp();
  static MultiplicityDist gpd_pareto(double beta);
  static MultiplicityDist gpd_bounded(double gamma);
  static MultiplicityDist aot_log(double expansion);
  static MultiplicityDist aot_pareto(double alpha, double expansion);
  static MultiplicityDist aot_bounded(double alpha, double expansion);

  bool is_aot() const;
};

struct CompoundPoissonSpec {
  double theta = 1.0;  // in (0, 1]
  MultiplicityDist mult;
};

/// theta = 1 - 1/|f^p derivative product at zeta|; requires zeta to be a
/// verified repelling periodic point of prime period p.
double ei_periodic(const MapSpec& map, double zeta, int p);

/// Ratio estimate of the extremal index: exceedances followed by p
/// sub-threshold steps over all exceedances. Identically 1 at p = 0.
double obrien_estimate(std::span<const double> values, double u, int p);
double obrien_estimate(const ExceedanceSeries& ex, int p);

double multiplicity_cdf(const MultiplicityDist& dist, double x);

/// Branch index of the piecewise aggregate-mark laws: the unique kappa with
/// boundary b_kappa <= x < b_{kappa+1}.
int kappa_of_x(const MultiplicityDist& dist, double x);

/// Scaled branch boundary b_kappa (b_0 = 0, increasing).
double aot_boundary(const MultiplicityDist& dist, int kappa);

struct CppRealization {
  std::vector<double> times;
  std::vector<double> marks;
};

/// Event times are partial sums of Exp(rate theta) waits truncated at the
/// horizon; marks are i.i.d. inverse-CDF draws from the multiplicity law.
CppRealization sample_compound_poisson(const CompoundPoissonSpec& spec, double horizon,
                                       std::mt19937_64& rng);

/// Inverse CDF at level unif in [0, 1).
double sample_multiplicity(const MultiplicityDist& dist, double unif);

/// E[e^{-yZ}]: closed form for Geometric and GpdExp, adaptive quadrature to
/// relative tolerance 1e-8 otherwise.
double laplace_multiplicity(const MultiplicityDist& dist, double y);

/// exp(-theta * sum_l (1 - E[e^{-y_l Z}]) |I_l|) over pairwise disjoint
/// intervals.
double laplace_process(const CompoundPoissonSpec& spec, std::span<const Interval> intervals,
                       std::span<const double> ys);

/// Empirical plug-in for the short-range dependence sum:
///   n * sum_{j=p+1}^{floor(n/k_n)-1} Phat(cluster-ending event at 0 and
///   exceedance at lag j).
double dprime_diagnostic(std::span<const double> values, double u, int p, std::size_t k_n);
double dprime_diagnostic(const ExceedanceSeries& ex, int p, std::size_t k_n);

inline std::size_t default_kn(std::size_t n) {
  std::size_t k = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  return k > 0 ? k : 1;
}

/// Direct frequency of cluster-terminating events whose forward-chain mark
/// exceeds x/a_u, relative to all exceedances, evaluated on a grid of
/// scaled levels. Computed by a literal event scan, independently of
/// identify_clusters.
std::vector<double> r_event_frequency(const ExceedanceSeries& ex, int p, MarkKind kind, double a_u,
                                      std::span<const double> xs);

}  // namespace mrepp
