#include "mrepp/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mrepp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const ObservableSpec& obs) {
  if (!(obs.zeta >= 0.0 && obs.zeta < 1.0)) throw DomainError("zeta must lie in [0,1)");
  std::visit(
      [](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Type2Pareto>) {
          if (!(g.alpha > 0.0)) throw DomainError("Type2Pareto requires alpha > 0");
        } else if constexpr (std::is_same_v<T, Type3Bounded>) {
          if (!(g.alpha > 0.0)) throw DomainError("Type3Bounded requires alpha > 0");
        }
      },
      obs.g_type);
}

}  // namespace

ObservableSpec ObservableSpec::log_type(double zeta) {
  ObservableSpec obs{Type1Log{}, zeta};
  validate(obs);
  return obs;
}

ObservableSpec ObservableSpec::pareto(double alpha, double zeta) {
  ObservableSpec obs{Type2Pareto{alpha}, zeta};
  validate(obs);
  return obs;
}

ObservableSpec ObservableSpec::bounded(double D, double alpha, double zeta) {
  ObservableSpec obs{Type3Bounded{D, alpha}, zeta};
  validate(obs);
  return obs;
}

double g_of_dist(const ObservableSpec& obs, double d) {
  return std::visit(
      [d](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Type1Log>) {
          return d == 0.0 ? kInf : -std::log(d);
        } else if constexpr (std::is_same_v<T, Type2Pareto>) {
          return d == 0.0 ? kInf : std::pow(d, -1.0 / g.alpha);
        } else {
          return g.D - std::pow(d, 1.0 / g.alpha);
        }
      },
      obs.g_type);
}

double evaluate(const ObservableSpec& obs, double x) {
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("x must lie in [0,1)");
  return g_of_dist(obs, circle_dist(x, obs.zeta));
}

double upper_endpoint(const ObservableSpec& obs) {
  if (const auto* b = std::get_if<Type3Bounded>(&obs.g_type)) return b->D;
  return kInf;
}

double g_inverse(const ObservableSpec& obs, double u) {
  return std::visit(
      [u](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Type1Log>) {
          return std::exp(-u);
        } else if constexpr (std::is_same_v<T, Type2Pareto>) {
          if (!(u > 0.0)) throw DomainError("Type2Pareto threshold must be positive");
          return std::pow(u, -g.alpha);
        } else {
          if (u >= g.D) throw DomainError("threshold at or above the upper endpoint");
          return std::pow(g.D - u, g.alpha);
        }
      },
      obs.g_type);
}

double scaling_a(const ObservableSpec& obs, double u) {
  return std::visit(
      [u](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Type1Log>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, Type2Pareto>) {
          if (!(u > 0.0)) throw DomainError("Type2Pareto threshold must be positive");
          return 1.0 / u;
        } else {
          if (u >= g.D) throw DomainError("threshold at or above the upper endpoint");
          return 1.0 / (g.D - u);
        }
      },
      obs.g_type);
}

ThresholdLevel threshold_from_tau(const ObservableSpec& obs, std::size_t n, double tau,
                                  AnalyticMode mode) {
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
  if (!(mode.density > 0.0)) throw DomainError("density must be positive");
  double tail = tau / static_cast<double>(n);
  if (tail >= 1.0) throw DomainError("tau/n must be below 1");
  double radius = tail / (2.0 * mode.density);
  if (radius > 0.5) throw DomainError("exceedance ball exceeds the circle");
  ThresholdLevel level;
  level.u = g_of_dist(obs, radius);
  level.tail_prob = tail;
  level.v_u = 1.0 / tail;
  level.a_u = scaling_a(obs, level.u);
  return level;
}

ThresholdLevel threshold_from_tau(const ObservableSpec& obs, std::size_t n, double tau,
                                  std::span<const double> samples) {
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
  if (tau / static_cast<double>(n) >= 1.0) throw DomainError("tau/n must be below 1");
  if (samples.size() < n) throw InsufficientSamples("need at least n samples of the observable");
  std::size_t N = samples.size();
  auto k = static_cast<std::size_t>(tau * static_cast<double>(N) / static_cast<double>(n));
  if (k < 1) throw InsufficientSamples("too few samples to resolve the target tail");
  if (k >= N) throw DomainError("target exceedance count covers the whole sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  double u = sorted[N - k - 1];  // k samples sit strictly above (barring ties)
  std::size_t exceed = N - (std::upper_bound(sorted.begin(), sorted.end(), u) - sorted.begin());
  ThresholdLevel level;
  level.u = u;
  level.tail_prob = static_cast<double>(exceed) / static_cast<double>(N);
  level.v_u = 1.0 / level.tail_prob;
  level.a_u = scaling_a(obs, u);
  return level;
}

}  // namespace mrepp
