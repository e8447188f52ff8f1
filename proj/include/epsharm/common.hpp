#pragma once

// Shared basics: 3-vectors, complex shorthand, and the error types thrown
// across the library. Everything numeric is double precision.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace epsharm {

using Vec3 = std::array<double, 3>;
using cplx = std::complex<double>;

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) {
  return {s * a[0], s * a[1], s * a[2]};
}
inline Vec3 operator*(const Vec3& a, double s) { return s * a; }
inline Vec3& operator+=(Vec3& a, const Vec3& b) {
  a[0] += b[0]; a[1] += b[1]; a[2] += b[2];
  return a;
}
inline Vec3 operator-(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }

inline Vec3 normalized(const Vec3& a) {
  const double n = norm(a);
  return {a[0] / n, a[1] / n, a[2] / n};
}

// Error hierarchy. Names track what the failing precondition was about; the
// CLI maps ConfigError to exit 2, NoConvergence/LineSearchFailure to exit 3,
// everything else surfacing from a check to exit 1.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define EPSHARM_DEFINE_ERROR(NAME)                              \
  struct NAME : Error {                                         \
    explicit NAME(const std::string& msg) : Error(msg) {}       \
  }

EPSHARM_DEFINE_ERROR(PoleError);
EPSHARM_DEFINE_ERROR(InvalidResolution);
EPSHARM_DEFINE_ERROR(NonFiniteValue);
EPSHARM_DEFINE_ERROR(DerivativeUnavailable);
EPSHARM_DEFINE_ERROR(InfinityResult);
EPSHARM_DEFINE_ERROR(NotUnitary);
EPSHARM_DEFINE_ERROR(NonIntegerDegree);
EPSHARM_DEFINE_ERROR(WrongDegree);
EPSHARM_DEFINE_ERROR(NotDegreeOne);
EPSHARM_DEFINE_ERROR(NoConvergence);
EPSHARM_DEFINE_ERROR(LineSearchFailure);
EPSHARM_DEFINE_ERROR(DomainError);
EPSHARM_DEFINE_ERROR(TruncationError);
EPSHARM_DEFINE_ERROR(ConfigError);
EPSHARM_DEFINE_ERROR(NonFiniteIntegrand);

#undef EPSHARM_DEFINE_ERROR

constexpr double kPi = 3.14159265358979323846;

// Deterministic uniform doubles in [0,1) from a 64-bit generator state.
// Hand-rolled instead of std::uniform_real_distribution so that identical
// seeds give identical streams on any standard library.
template <class Gen>
double uniform01(Gen& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

template <class Gen>
double uniform(Gen& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

}  // namespace epsharm
