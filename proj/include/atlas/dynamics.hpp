#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "atlas/tower.hpp"

namespace atlas {

using Complex = std::complex<double>;

/// The function family f(z) = lambda * cosh(z)^q.
struct FunctionSpec {
  Complex lambda{1.0, 0.0};
  int q{1};

  static FunctionSpec h() { return {{1.0, 0.0}, 1}; }       // cosh(z)
  static FunctionSpec g() { return {{0.5, 0.0}, 1}; }       // cosh(z)/2
  static FunctionSpec cosh2() { return {{1.0, 0.0}, 2}; }   // cosh(z)^2

  bool real_lambda() const { return lambda.imag() == 0.0; }
  /// Default base radius for the maximum-modulus schedule.
  double default_radius() const;
};

// Regime thresholds. Arguments stay meaningful in fixed precision only
// while |z| * eps_mach is below theta_tol; the flags make the loss explicit.
inline constexpr double kRSwitch = 1e12;
inline constexpr double kAMax = 1e12;
inline constexpr double kLMax = 700.0;
inline constexpr double kThetaTol = 1e-3;
inline constexpr double kEpsCone = 0.1;  // |cos theta| floor in heuristic mode

/// lambda * cosh(z)^q to full binary64 accuracy. Requires |Re z| <= 700.
Complex evaluate(const FunctionSpec& f, Complex z);

/// d/dz of lambda * cosh(z)^q, i.e. lambda * q * cosh(z)^(q-1) * sinh(z).
Complex derivative(const FunctionSpec& f, Complex z);

/// Orbit state. Exact holds the point itself (|z| <= kRSwitch); LogPolar
/// holds log-modulus and argument just above that; RealAxis tracks
/// sign and tower magnitude on the real line with no ceiling; Poisoned is
/// the magnitude-only tail after argument loss, with mag_rigorous false
/// once the magnitude is itself only a cone-assumption lower bound.
struct ExactPoint {
  Complex z;
};
struct LogPolarPoint {
  double log_mod;
  double arg;
  bool arg_trusted;
};
struct RealAxisPoint {
  int sign;  // +1 or -1
  TowerReal mag;
};
struct PoisonedPoint {
  TowerReal mag;
  bool mag_rigorous;
};
using OrbitPoint =
    std::variant<ExactPoint, LogPolarPoint, RealAxisPoint, PoisonedPoint>;

OrbitPoint make_orbit_point(Complex z);

/// One application of f, switching regime as needed. Total: degradation is
/// encoded in the flags, never silent.
OrbitPoint step(const FunctionSpec& f, const OrbitPoint& p);

TowerReal magnitude(const OrbitPoint& p);
bool magnitude_rigorous(const OrbitPoint& p);

/// |f| on the real axis: the tower of |lambda| * cosh(x)^q for x = value(m).
/// Shared by the RealAxis regime and the maximum-modulus schedule.
TowerReal image_mag_from_abs_re(const FunctionSpec& f, const TowerReal& m);

/// Iterated maximum modulus M^0(R), ..., M^N(R), M(r) = |lambda| cosh(r)^q.
struct MaxModulusSchedule {
  double base_radius;
  std::vector<TowerReal> values;  // size N + 1, strictly increasing
};

/// Thrown when M(r) <= r somewhere at or above the base radius, i.e. the
/// schedule would not tend to infinity.
struct ScheduleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

MaxModulusSchedule max_modulus_schedule(const FunctionSpec& f, double R,
                                        int N);

/// Sampled max of |f| over `samples` equispaced points of |z| = r; oracle
/// for M(r) = |lambda| cosh(r)^q. Requires r <= 700.
double circle_max_check(const FunctionSpec& f, double r, int samples);

}  // namespace atlas
