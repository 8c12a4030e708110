#include "mrepp/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mrepp {

namespace {

constexpr int kKappaCap = 1'000'000;
constexpr double kBisectTol = 1e-12;

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = simpson(a, m, fa, flm, fm);
  double right = simpson(m, b, fm, frm, fb);
  double delta = left + right - whole;
  if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) throw QuadratureFailure("adaptive quadrature did not converge");
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  double fa = f(a);
  double fb = f(b);
  double m = 0.5 * (a + b);
  double fm = f(m);
  double whole = simpson(a, b, fa, fm, fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60);
}

struct AotParams {
  double alpha = 0.0;      // 0 marks the log variant
  double expansion = 0.0;  // M
  int type = 1;            // 1 log, 2 pareto, 3 bounded
};

AotParams aot_params(const MultiplicityDist& dist) {
  if (const auto* l = std::get_if<AotLog>(&dist.variant)) return {0.0, l->expansion, 1};
  if (const auto* p = std::get_if<AotPareto>(&dist.variant)) return {p->alpha, p->expansion, 2};
  if (const auto* b = std::get_if<AotBounded>(&dist.variant)) return {b->alpha, b->expansion, 3};
  throw DomainError("branch structure only exists for aggregate-mark laws");
}

double aot_boundary_impl(const AotParams& q, std::int64_t kappa) {
  double M = q.expansion;
  double k = static_cast<double>(kappa);
  switch (q.type) {
    case 1:
      return 0.5 * k * (k + 1.0) * std::log(M);
    case 2: {
      double mi = std::pow(M, -1.0 / q.alpha);
      return (std::pow(M, k / q.alpha) - mi) / (1.0 - mi) - (k + 1.0);
    }
    default: {
      double mp = std::pow(M, 1.0 / q.alpha);
      return k + 1.0 - (mp - std::pow(M, -k / q.alpha)) / (mp - 1.0);
    }
  }
}

/// Survival 1 - pi on branch kappa (valid for b_kappa <= x < b_{kappa+1}).
double aot_branch_survival(const AotParams& q, std::int64_t kappa, double x) {
  double M = q.expansion;
  double k = static_cast<double>(kappa);
  switch (q.type) {
    case 1:
      return std::pow(M, -0.5 * k) * std::exp(-x / (k + 1.0));
    case 2: {
      double coef = (1.0 - std::pow(M, -(k + 1.0) / q.alpha)) / (1.0 - std::pow(M, -1.0 / q.alpha));
      return std::pow(coef, q.alpha) * std::pow(k + 1.0 + x, -q.alpha);
    }
    default: {
      double coef = (std::pow(M, 1.0 / q.alpha) - 1.0) / (std::pow(M, (k + 1.0) / q.alpha) - 1.0);
      return std::pow(coef, q.alpha) * std::pow(k + 1.0 - x, q.alpha);
    }
  }
}

/// Closed-form initial guess for the branch index, then an exact bracket
/// fix against the boundary sequence.
std::int64_t kappa_impl(const AotParams& q, double x) {
  double M = q.expansion;
  double guess = 0.0;
  switch (q.type) {
    case 1:
      guess = 0.5 * (std::sqrt(1.0 + 8.0 * x / std::log(M)) - 1.0);
      break;
    case 2: {
      double mi = std::pow(M, -1.0 / q.alpha);
      double arg = x * (1.0 - mi);
      guess = arg > 1.0 ? q.alpha * std::log(arg) / std::log(M) : 0.0;
      break;
    }
    default: {
      double mp = std::pow(M, 1.0 / q.alpha);
      guess = x - 1.0 + mp / (mp - 1.0);
      break;
    }
  }
  auto k = guess > 0.0 ? static_cast<std::int64_t>(guess) : 0;
  std::int64_t steps = 0;
  while (k > 0 && x < aot_boundary_impl(q, k)) {
    --k;
    if (++steps > kKappaCap) throw DomainError("branch index search did not converge");
  }
  while (x >= aot_boundary_impl(q, k + 1)) {
    ++k;
    if (++steps > kKappaCap) throw DomainError("branch index search did not converge");
  }
  return k;
}

}  // namespace

MultiplicityDist MultiplicityDist::geometric(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("geometric theta must lie in (0,1]");
  return {Geometric{theta}};
}
MultiplicityDist MultiplicityDist::gpd_exp() { return {GpdExp{}}; }
MultiplicityDist MultiplicityDist::gpd_pareto(double beta) {
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  return {GpdPareto{beta}};
}
MultiplicityDist MultiplicityDist::gpd_bounded(double gamma) {
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  return {GpdBounded{gamma}};
}
MultiplicityDist MultiplicityDist::aot_log(double expansion) {
  if (!(expansion > 1.0)) throw DomainError("expansion factor must exceed 1");
  return {AotLog{expansion}};
}
MultiplicityDist MultiplicityDist::aot_pareto(double alpha, double expansion) {
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  if (!(expansion > 1.0)) throw DomainError("expansion factor must exceed 1");
  return {AotPareto{alpha, expansion}};
}
MultiplicityDist MultiplicityDist::aot_bounded(double alpha, double expansion) {
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  if (!(expansion > 1.0)) throw DomainError("expansion factor must exceed 1");
  return {AotBounded{alpha, expansion}};
}

bool MultiplicityDist::is_aot() const {
  return std::holds_alternative<AotLog>(variant) || std::holds_alternative<AotPareto>(variant) ||
         std::holds_alternative<AotBounded>(variant);
}

double ei_periodic(const MapSpec& map, double zeta, int p) {
  PeriodicCheck pc = verify_periodic(map, zeta, p);
  if (!pc.is_periodic) throw NotPeriodicError("zeta is not periodic with the given prime period");
  double d = std::fabs(pc.deriv_product);
  if (!(d > 1.0)) throw NotRepellingError("periodic point is not repelling");
  return 1.0 - 1.0 / d;
}

double obrien_estimate(const ExceedanceSeries& ex, int p) {
  if (ex.events.empty()) throw NoExceedances("no exceedances above the threshold");
  if (p == 0) return 1.0;
  std::int64_t num = 0;
  for (std::size_t i = 0; i < ex.events.size(); ++i) {
    std::int64_t t = ex.events[i].time;
    if (t + p > ex.series_length - 1) continue;  // window runs out of the series
    bool followed = i + 1 < ex.events.size() && ex.events[i + 1].time - t <= p;
    if (!followed) ++num;
  }
  return static_cast<double>(num) / static_cast<double>(ex.events.size());
}

double obrien_estimate(std::span<const double> values, double u, int p) {
  return obrien_estimate(extract_exceedances(values, u), p);
}

double multiplicity_cdf(const MultiplicityDist& dist, double x) {
  if (x < 0.0) return 0.0;
  return std::visit(
      [&dist, x](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Geometric>) {
          return 1.0 - std::pow(1.0 - d.theta, std::floor(x));
        } else if constexpr (std::is_same_v<T, GpdExp>) {
          return 1.0 - std::exp(-x);
        } else if constexpr (std::is_same_v<T, GpdPareto>) {
          return 1.0 - std::pow(1.0 + x, -d.beta);
        } else if constexpr (std::is_same_v<T, GpdBounded>) {
          if (x >= 1.0) return 1.0;
          return 1.0 - std::pow(1.0 - x, d.gamma);
        } else {
          AotParams q = aot_params(dist);
          return 1.0 - aot_branch_survival(q, kappa_impl(q, x), x);
        }
      },
      dist.variant);
}

int kappa_of_x(const MultiplicityDist& dist, double x) {
  if (x < 0.0) throw DomainError("branch index needs x >= 0");
  std::int64_t k = kappa_impl(aot_params(dist), x);
  if (k > std::numeric_limits<int>::max()) throw DomainError("branch index out of int range");
  return static_cast<int>(k);
}

double aot_boundary(const MultiplicityDist& dist, int kappa) {
  if (kappa < 0) throw DomainError("branch index must be nonnegative");
  return aot_boundary_impl(aot_params(dist), kappa);
}

double sample_multiplicity(const MultiplicityDist& dist, double unif) {
  if (!(unif >= 0.0 && unif < 1.0)) throw DomainError("uniform level must lie in [0,1)");
  return std::visit(
      [&dist, unif](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Geometric>) {
          if (d.theta == 1.0) return 1.0;
          double k = std::ceil(std::log1p(-unif) / std::log1p(-d.theta));
          return std::max(1.0, k);
        } else if constexpr (std::is_same_v<T, GpdExp>) {
          return -std::log1p(-unif);
        } else if constexpr (std::is_same_v<T, GpdPareto>) {
          return std::pow(1.0 - unif, -1.0 / d.beta) - 1.0;
        } else if constexpr (std::is_same_v<T, GpdBounded>) {
          return 1.0 - std::pow(1.0 - unif, 1.0 / d.gamma);
        } else {
          AotParams q = aot_params(dist);
          double M = q.expansion;
          // branch mass: pi(b_kappa) = 1 - M^{-kappa}
          auto kappa = static_cast<std::int64_t>(std::floor(-std::log1p(-unif) / std::log(M)));
          if (kappa < 0) kappa = 0;
          while (kappa > 0 && unif < 1.0 - std::pow(M, -static_cast<double>(kappa))) --kappa;
          while (unif >= 1.0 - std::pow(M, -static_cast<double>(kappa + 1))) ++kappa;
          double lo = aot_boundary_impl(q, kappa);
          double hi = aot_boundary_impl(q, kappa + 1);
          // bisection on the strictly increasing branch CDF
          for (int it = 0; it < 200 && hi - lo > kBisectTol; ++it) {
            double mid = 0.5 * (lo + hi);
            double cdf = 1.0 - aot_branch_survival(q, kappa, mid);
            (cdf < unif ? lo : hi) = mid;
          }
          return 0.5 * (lo + hi);
        }
      },
      dist.variant);
}

CppRealization sample_compound_poisson(const CompoundPoissonSpec& spec, double horizon,
                                       std::mt19937_64& rng) {
  if (!(spec.theta > 0.0 && spec.theta <= 1.0)) throw DomainError("theta must lie in (0,1]");
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  CppRealization out;
  double t = 0.0;
  for (;;) {
    t += -std::log1p(-uniform01(rng)) / spec.theta;
    if (t >= horizon) break;
    out.times.push_back(t);
    out.marks.push_back(sample_multiplicity(spec.mult, uniform01(rng)));
  }
  return out;
}

double laplace_multiplicity(const MultiplicityDist& dist, double y) {
  if (y < 0.0) throw DomainError("laplace argument must be nonnegative");
  if (y == 0.0) return 1.0;
  return std::visit(
      [&dist, y](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Geometric>) {
          double e = std::exp(-y);
          return d.theta * e / (1.0 - (1.0 - d.theta) * e);
        } else if constexpr (std::is_same_v<T, GpdExp>) {
          return 1.0 / (1.0 + y);
        } else if constexpr (std::is_same_v<T, GpdPareto>) {
          // E[e^{-yZ}] = 1 - y * int_0^inf e^{-yx} (1+x)^{-beta} dx
          double cut = 32.0 / y;
          auto f = [&](double x) { return std::exp(-y * x) * std::pow(1.0 + x, -d.beta); };
          double integral = 0.0;
          double lo = 0.0;
          double hi = std::min(1.0, cut);
          for (;;) {
            integral += adaptive_simpson(f, lo, hi, 1e-12);
            if (hi >= cut) break;
            lo = hi;
            hi = std::min(hi * 8.0, cut);
          }
          return 1.0 - y * integral;
        } else if constexpr (std::is_same_v<T, GpdBounded>) {
          auto f = [&](double x) { return std::exp(-y * x) * std::pow(1.0 - x, d.gamma); };
          return 1.0 - y * adaptive_simpson(f, 0.0, 1.0, 1e-12);
        } else {
          AotParams q = aot_params(dist);
          double total = 0.0;
          for (int kappa = 0;; ++kappa) {
            double lo = aot_boundary_impl(q, kappa);
            double surv_lo = aot_branch_survival(q, kappa, lo);
            if (surv_lo * std::exp(-y * lo) < 1e-14 && kappa > 0) break;
            if (kappa >= kKappaCap) throw QuadratureFailure("branch sum did not converge");
            double hi = aot_boundary_impl(q, kappa + 1);
            auto f = [&](double x) {
              return std::exp(-y * x) * aot_branch_survival(q, kappa, x);
            };
            total += adaptive_simpson(f, lo, hi, 1e-13);
          }
          return 1.0 - y * total;
        }
      },
      dist.variant);
}

double laplace_process(const CompoundPoissonSpec& spec, std::span<const Interval> intervals,
                       std::span<const double> ys) {
  if (!(spec.theta > 0.0 && spec.theta <= 1.0)) throw DomainError("theta must lie in (0,1]");
  if (intervals.size() != ys.size()) throw DomainError("one y per interval required");
  std::vector<Interval> sorted(intervals.begin(), intervals.end());
  std::sort(sorted.begin(), sorted.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i + 1].lo < sorted[i].hi) throw OverlapError("intervals must be pairwise disjoint");
  }
  double exponent = 0.0;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (ys[i] < 0.0) throw DomainError("laplace argument must be nonnegative");
    exponent += (1.0 - laplace_multiplicity(spec.mult, ys[i])) * intervals[i].length();
  }
  return std::exp(-spec.theta * exponent);
}

double dprime_diagnostic(const ExceedanceSeries& ex, int p, std::size_t k_n) {
  if (k_n < 1) throw DomainError("k_n must be at least 1");
  const auto n = static_cast<double>(ex.series_length);
  const std::int64_t upper = ex.series_length / static_cast<std::int64_t>(k_n) - 1;
  if (upper <= p) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < ex.events.size(); ++i) {
    std::int64_t t = ex.events[i].time;
    if (t + p > ex.series_length - 1) continue;
    bool q_event = !(i + 1 < ex.events.size() && ex.events[i + 1].time - t <= p);
    if (!q_event) continue;
    // all exceedances at lags p+1 .. upper from this cluster-ending event
    for (std::size_t j = i + 1; j < ex.events.size(); ++j) {
      std::int64_t lag = ex.events[j].time - t;
      if (lag <= p) continue;
      if (lag > upper) break;
      total += n / (n - static_cast<double>(lag));
    }
  }
  return total;
}

double dprime_diagnostic(std::span<const double> values, double u, int p, std::size_t k_n) {
  return dprime_diagnostic(extract_exceedances(values, u), p, k_n);
}

std::vector<double> r_event_frequency(const ExceedanceSeries& ex, int p, MarkKind kind, double a_u,
                                      std::span<const double> xs) {
  if (ex.events.empty()) throw NoExceedances("no exceedances above the threshold");
  const std::size_t E = ex.events.size();
  // forward-chain marks: successive exceedances at most p apart
  std::vector<double> chain_mark(E);
  for (std::size_t r = E; r-- > 0;) {
    bool linked = r + 1 < E && ex.events[r + 1].time - ex.events[r].time <= p;
    double next = linked ? chain_mark[r + 1] : 0.0;
    switch (kind) {
      case MarkKind::Repp:
        chain_mark[r] = 1.0 + (linked ? next : 0.0);
        break;
      case MarkKind::Aot:
        chain_mark[r] = ex.events[r].excess + (linked ? next : 0.0);
        break;
      case MarkKind::Pot:
        chain_mark[r] = std::max(ex.events[r].excess, linked ? next : 0.0);
        break;
    }
  }
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) {
    std::int64_t count = 0;
    for (std::size_t r = 0; r < E; ++r) {
      std::int64_t t = ex.events[r].time;
      if (t + p > ex.series_length - 1) continue;
      if (!(a_u * chain_mark[r] > x)) continue;
      bool linked = r + 1 < E && ex.events[r + 1].time - t <= p;
      if (linked && a_u * chain_mark[r + 1] > x) continue;
      ++count;
    }
    out.push_back(static_cast<double>(count) / static_cast<double>(E));
  }
  return out;
}

}  // namespace mrepp
