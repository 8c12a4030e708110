#include "mrepp/stats.hpp"

#include <algorithm>
#include <cmath>

namespace mrepp {

double EmpiricalCDF::operator()(double x) const {
  auto it = std::upper_bound(sorted_samples.begin(), sorted_samples.end(), x);
  return static_cast<double>(it - sorted_samples.begin()) /
         static_cast<double>(sorted_samples.size());
}

EmpiricalCDF empirical_cdf(std::span<const double> samples) {
  if (samples.empty()) throw EmptySample("empirical CDF of an empty sample");
  EmpiricalCDF out;
  out.sorted_samples.assign(samples.begin(), samples.end());
  std::sort(out.sorted_samples.begin(), out.sorted_samples.end());
  return out;
}

KSResult ks_distance(const EmpiricalCDF& ecdf, const std::function<double(double)>& cdf) {
  const auto& s = ecdf.sorted_samples;
  if (s.empty()) throw EmptySample("KS distance of an empty sample");
  double n = static_cast<double>(s.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double f = cdf(s[i]);
    sup = std::max(sup, std::fabs(f - static_cast<double>(i + 1) / n));
    sup = std::max(sup, std::fabs(f - static_cast<double>(i) / n));
  }
  return {sup, n};
}

KSResult ks_distance_grid(const EmpiricalCDF& ecdf, const std::function<double(double)>& cdf,
                          std::span<const double> points) {
  if (ecdf.sorted_samples.empty()) throw EmptySample("KS distance of an empty sample");
  double sup = 0.0;
  for (double x : points) sup = std::max(sup, std::fabs(cdf(x) - ecdf(x)));
  return {sup, static_cast<double>(ecdf.n())};
}

double empirical_laplace(std::span<const double> samples, double y) {
  if (samples.empty()) throw EmptySample("empirical laplace of an empty sample");
  if (y < 0.0) throw DomainError("laplace argument must be nonnegative");
  double s = 0.0;
  for (double v : samples) s += std::exp(-y * v);
  return s / static_cast<double>(samples.size());
}

KSResult interarrival_exponential_check(std::span<const double> gaps, double theta) {
  if (gaps.empty()) throw TooFewPoints("need at least two points for inter-arrival gaps");
  auto ecdf = empirical_cdf(gaps);
  return ks_distance(ecdf, [theta](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-theta * x); });
}

KSResult interarrival_exponential_check(const MarkedPointProcess& mp, double theta) {
  if (mp.points.size() < 2) throw TooFewPoints("need at least two points for inter-arrival gaps");
  std::vector<double> gaps(mp.points.size() - 1);
  for (std::size_t i = 1; i < mp.points.size(); ++i)
    gaps[i - 1] = mp.points[i].rescaled_time - mp.points[i - 1].rescaled_time;
  return interarrival_exponential_check(gaps, theta);
}

KSResult two_sample_ks(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw EmptySample("two-sample KS needs nonempty samples");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double na = static_cast<double>(sa.size());
  double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double sup = 0.0;
  while (i < sa.size() && j < sb.size()) {
    double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= x) ++i;
    while (j < sb.size() && sb[j] <= x) ++j;
    sup = std::max(sup, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {sup, na * nb / (na + nb)};
}

}  // namespace mrepp
