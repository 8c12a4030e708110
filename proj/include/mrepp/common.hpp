#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mrepp {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};
class BreakpointError : public Error {
 public:
  using Error::Error;
};
class NonReturningError : public Error {
 public:
  using Error::Error;
};
class InsufficientSamples : public Error {
 public:
  using Error::Error;
};
class NoExceedances : public Error {
 public:
  using Error::Error;
};
class NotPeriodicError : public Error {
 public:
  using Error::Error;
};
class NotRepellingError : public Error {
 public:
  using Error::Error;
};
class QuadratureFailure : public Error {
 public:
  using Error::Error;
};
class OverlapError : public Error {
 public:
  using Error::Error;
};
class EmptySample : public Error {
 public:
  using Error::Error;
};
class TooFewPoints : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};
class ContainmentError : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};

/// Half-open interval [lo, hi).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return x >= lo && x < hi; }
  double length() const { return hi - lo; }
};

/// Distance on the unit circle: min(|x-y|, 1-|x-y|).
inline double circle_dist(double x, double y) {
  double d = std::fabs(x - y);
  return std::min(d, 1.0 - d);
}

/// SplitMix64 finalizer, used to derive well-separated seeds.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Deterministic per-stream seed derivation from a master seed.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream + 0x9E3779B97F4A7C15ull));
}

/// 53-bit uniform draw in [0, 1).
template <class Gen>
double uniform01(Gen& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace mrepp
