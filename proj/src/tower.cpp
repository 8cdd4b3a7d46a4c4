#include "atlas/tower.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace atlas {

namespace {
constexpr double kE = std::numbers::e;
// Largest t with exp(t) finite in binary64.
constexpr double kExpOverflow = 709.782712893384;
}  // namespace

TowerReal TowerReal::from_real(double x) {
  if (!std::isfinite(x) || x < 0.0) {
    throw std::invalid_argument("TowerReal::from_real: need finite x >= 0");
  }
  int m = 0;
  double r = x;
  while (r >= kE) {
    r = std::log(r);
    ++m;
  }
  // Rounding in log() can land a hair below the band floor.
  if (m >= 1 && r < 1.0) {
    r = std::exp(r);
    --m;
  }
  return TowerReal(m, r);
}

TowerReal TowerReal::from_log(double t) {
  if (!std::isfinite(t)) {
    throw std::invalid_argument("TowerReal::from_log: need finite t");
  }
  if (t <= kExpOverflow) return from_real(std::exp(t));
  return exp_t(from_real(t));
}

std::optional<double> TowerReal::to_double() const {
  double v = mantissa_;
  for (int i = 0; i < height_; ++i) {
    if (v > kExpOverflow) return std::nullopt;
    v = std::exp(v);
  }
  return v;
}

Ordering compare(const TowerReal& a, const TowerReal& b) {
  auto c = a <=> b;
  if (c < 0) return Ordering::less;
  if (c > 0) return Ordering::greater;
  return Ordering::equal;
}

TowerReal exp_t(const TowerReal& a) {
  if (a.height_ >= 1) return TowerReal(a.height_ + 1, a.mantissa_);
  if (a.mantissa_ >= 1.0) return TowerReal(1, a.mantissa_);
  return TowerReal(0, std::exp(a.mantissa_));
}

TowerReal log_t(const TowerReal& a) {
  if (a.height_ >= 1) return TowerReal(a.height_ - 1, a.mantissa_);
  if (a.mantissa_ < 1.0) {
    throw std::domain_error("log_t: represented value below 1");
  }
  return TowerReal(0, std::log(a.mantissa_));
}

TowerReal mul_scalar(const TowerReal& a, double c) {
  if (!std::isfinite(c) || c <= 0.0) {
    throw std::invalid_argument("mul_scalar: need finite c > 0");
  }
  if (auto xv = a.to_double()) {
    double y = *xv * c;
    if (std::isfinite(y)) return TowerReal::from_real(y);
    return TowerReal::from_log(std::log(*xv) + std::log(c));
  }
  // value = exp(t) with t the tower one level down; scale in the exponent.
  TowerReal t(a.height_ - 1, a.mantissa_);
  if (auto d = t.to_double()) {
    return TowerReal::from_log(*d + std::log(c));
  }
  // Exponent beyond binary64: |log c| is below its resolution. Saturate.
  return a;
}

TowerReal pow_t(const TowerReal& a, double p) {
  if (!std::isfinite(p) || p <= 0.0) {
    throw std::invalid_argument("pow_t: need finite p > 0");
  }
  if (auto d = a.to_double()) {
    if (*d == 0.0) return TowerReal::from_real(0.0);
    double y = std::pow(*d, p);
    if (std::isfinite(y) && y > 0.0) return TowerReal::from_real(y);
    double t = std::log(*d) * p;
    if (std::isfinite(t)) return TowerReal::from_log(t);
  }
  return exp_t(mul_scalar(log_t(a), p));
}

double rate_functional(const TowerReal& a, int n) {
  if (n < 0) throw std::invalid_argument("rate_functional: need n >= 0");
  TowerReal cur = a;
  int k = n;
  while (k > 0) {
    if (auto d = cur.to_double()) {
      double v = *d;
      while (k > 0) {
        v = std::log1p(v);
        --k;
      }
      return v;
    }
    cur = log_t(cur);
    --k;
  }
  auto d = cur.to_double();
  return d ? *d : std::numeric_limits<double>::infinity();
}

}  // namespace atlas
