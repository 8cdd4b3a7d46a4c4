#include "atlas/dynamics.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <numbers>
#include <stdexcept>

namespace atlas {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kPi = std::numbers::pi;
constexpr double kEpsMach = 2.220446049250313e-16;  // 2^-52

// Test hook: the selftest sabotage harness flips the cosh sign via env.
bool cosh_sign_fault() {
  static const bool fault = [] {
    const char* e = std::getenv("ATLAS_FAULT_COSH_SIGN");
    return e != nullptr && *e != '\0' && std::strcmp(e, "0") != 0;
  }();
  return fault;
}

// Angle reduced to (-pi, pi].
double reduce_angle(double t) {
  double r = std::remainder(t, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

// log(cosh(z)) for Re z >= 20: z - log 2 + log1p(exp(-2z)), the correction
// term below 1e-17 here.
Complex log_cosh_large(Complex z) {
  Complex corr = std::exp(-2.0 * z);
  return z - kLn2 + corr;
}

TowerReal heuristic_image_mag(const FunctionSpec& f, const TowerReal& m) {
  return image_mag_from_abs_re(f, mul_scalar(m, kEpsCone));
}

// Generic complex step for points off the whitelisted symmetry lines.
OrbitPoint step_complex(const FunctionSpec& f, Complex z) {
  const double x = z.real();
  const double direct_limit = (f.q == 2) ? 175.0 : 350.0;
  if (std::abs(x) <= direct_limit) {
    Complex w = evaluate(f, z);
    double aw = std::abs(w);
    if (aw <= kRSwitch) return ExactPoint{w};
    return LogPolarPoint{std::log(aw), std::arg(w), true};
  }
  // Blow-up regime: |cosh z| >= sinh|Re z|; go through logs.
  Complex zz = (x >= 0.0) ? z : -z;
  Complex lw =
      std::log(f.lambda) + static_cast<double>(f.q) * log_cosh_large(zz);
  if (cosh_sign_fault()) lw += Complex(0.0, kPi);
  double L = lw.real();
  double theta = reduce_angle(lw.imag());
  bool trusted = std::abs(z.imag()) * f.q * kEpsMach <= kThetaTol;
  if (L <= kLMax) return LogPolarPoint{L, theta, trusted};
  return PoisonedPoint{TowerReal::from_log(L), true};
}

}  // namespace

double FunctionSpec::default_radius() const {
  // For h any R > 0 works; for g the radius must clear the repelling
  // fixed point near 2.127.
  return (std::abs(lambda) >= 1.0) ? 1.0 : 3.0;
}

Complex evaluate(const FunctionSpec& f, Complex z) {
  if (!(std::abs(z.real()) <= 700.0)) {
    throw std::domain_error("evaluate: |Re z| > 700, use step()");
  }
  Complex ch = std::cosh(z);
  if (cosh_sign_fault()) ch = -ch;
  Complex p = (f.q == 2) ? ch * ch : ch;
  return f.lambda * p;
}

Complex derivative(const FunctionSpec& f, Complex z) {
  Complex ch = std::cosh(z);
  Complex sh = std::sinh(z);
  Complex p = (f.q == 2) ? 2.0 * ch * sh : sh;
  return f.lambda * p;
}

OrbitPoint make_orbit_point(Complex z) {
  if (std::abs(z) <= kRSwitch) return ExactPoint{z};
  return LogPolarPoint{std::log(std::abs(z)), std::arg(z), true};
}

TowerReal image_mag_from_abs_re(const FunctionSpec& f, const TowerReal& m) {
  const double logla = std::log(std::abs(f.lambda));
  const double q = static_cast<double>(f.q);
  auto d = m.to_double();
  if (d && *d <= 700.0) {
    double lc = (*d >= 1.0)
                    ? (*d + std::log1p(std::exp(-2.0 * *d)) - kLn2)
                    : std::log(std::cosh(*d));
    return TowerReal::from_log(q * lc + logla);
  }
  if (d) {
    double t = q * (*d - kLn2) + logla;
    if (std::isfinite(t)) return TowerReal::from_log(t);
  }
  // Exponent beyond binary64; the additive constants are below resolution.
  return exp_t(mul_scalar(m, q));
}

OrbitPoint step(const FunctionSpec& f, const OrbitPoint& p) {
  if (const auto* e = std::get_if<ExactPoint>(&p)) {
    const Complex z = e->z;
    if (f.real_lambda()) {
      const double lam = f.lambda.real();
      if (z.imag() == 0.0) {
        // cosh maps R to [1, inf); sign comes from lambda alone.
        return RealAxisPoint{
            lam < 0.0 ? -1 : 1,
            image_mag_from_abs_re(
                f, TowerReal::from_real(std::abs(z.real())))};
      }
      if (z.real() == 0.0) {
        // cosh(iy) = cos(y) lands in [-1, 1] on the real axis.
        double c = std::cos(z.imag());
        if (cosh_sign_fault()) c = -c;
        double v = lam * ((f.q == 2) ? c * c : c);
        return RealAxisPoint{v < 0.0 ? -1 : 1,
                             TowerReal::from_real(std::abs(v))};
      }
    }
    return step_complex(f, z);
  }
  if (const auto* lp = std::get_if<LogPolarPoint>(&p)) {
    double r = std::exp(lp->log_mod);
    if (!lp->arg_trusted || !(r <= kAMax)) {
      TowerReal magz = TowerReal::from_log(lp->log_mod);
      return PoisonedPoint{heuristic_image_mag(f, magz), false};
    }
    Complex z{r * std::cos(lp->arg), r * std::sin(lp->arg)};
    return step_complex(f, z);
  }
  if (const auto* ra = std::get_if<RealAxisPoint>(&p)) {
    return RealAxisPoint{f.lambda.real() < 0.0 ? -1 : 1,
                         image_mag_from_abs_re(f, ra->mag)};
  }
  const auto& po = std::get<PoisonedPoint>(p);
  return PoisonedPoint{heuristic_image_mag(f, po.mag), false};
}

TowerReal magnitude(const OrbitPoint& p) {
  if (const auto* e = std::get_if<ExactPoint>(&p)) {
    return TowerReal::from_real(std::abs(e->z));
  }
  if (const auto* lp = std::get_if<LogPolarPoint>(&p)) {
    return TowerReal::from_log(lp->log_mod);
  }
  if (const auto* ra = std::get_if<RealAxisPoint>(&p)) {
    return ra->mag;
  }
  return std::get<PoisonedPoint>(p).mag;
}

bool magnitude_rigorous(const OrbitPoint& p) {
  if (const auto* po = std::get_if<PoisonedPoint>(&p)) {
    return po->mag_rigorous;
  }
  return true;
}

MaxModulusSchedule max_modulus_schedule(const FunctionSpec& f, double R,
                                        int N) {
  if (!(R > 0.0) || !std::isfinite(R)) {
    throw std::invalid_argument("base radius must be positive and finite");
  }
  if (N < 0) throw std::invalid_argument("schedule length must be non-negative");
  // M^n(R) -> infinity needs M(r) > r for all r >= R. Above 700 the growth
  // is doubly exponential, so scan [R, 700].
  const double la = std::abs(f.lambda);
  const double hi = 700.0;
  const int scan = 8192;
  for (int i = 0; i <= scan; ++i) {
    double r = R + (hi - R) * i / scan;
    if (r < R) break;
    if (r > hi) break;
    double lc = (r >= 1.0) ? (r + std::log1p(std::exp(-2.0 * r)) - kLn2)
                           : std::log(std::cosh(r));
    double Mr = std::exp(f.q * lc + std::log(la));
    if (!(Mr > r)) {
      throw ScheduleError("schedule not increasing: M(r) <= r at r = " +
                          std::to_string(r));
    }
  }
  MaxModulusSchedule s;
  s.base_radius = R;
  s.values.reserve(static_cast<size_t>(N) + 1);
  s.values.push_back(TowerReal::from_real(R));
  for (int n = 0; n < N; ++n) {
    TowerReal next = image_mag_from_abs_re(f, s.values.back());
    if (!(next > s.values.back())) {
      throw ScheduleError("schedule not increasing at step " +
                          std::to_string(n + 1));
    }
    s.values.push_back(next);
  }
  return s;
}

double circle_max_check(const FunctionSpec& f, double r, int samples) {
  if (!(r >= 0.0 && r <= 700.0)) {
    throw std::domain_error("circle_max_check: need 0 <= r <= 700");
  }
  if (samples < 1) throw std::invalid_argument("need samples >= 1");
  double best = 0.0;
  for (int k = 0; k < samples; ++k) {
    double t = 2.0 * kPi * k / samples;
    Complex z{r * std::cos(t), r * std::sin(t)};
    best = std::max(best, std::abs(evaluate(f, z)));
  }
  return best;
}

}  // namespace atlas
