#pragma once

#include <compare>
#include <cstdint>
#include <optional>

namespace atlas {

/// Non-negative real magnitude stored as a normalized exponential tower:
/// the value is exp applied `height` times to `mantissa`.
///
/// Normalization: height 0 carries mantissa in [0, e); height >= 1 carries
/// mantissa in [1, e). The bands tile [0, inf), so every non-negative real
/// has exactly one canonical form and lexicographic order on
/// (height, mantissa) equals numeric order of the represented values.
class TowerReal {
 public:
  TowerReal() : height_(0), mantissa_(0.0) {}

  /// Canonical form of a finite non-negative binary64.
  /// Throws std::invalid_argument on negative or non-finite input.
  static TowerReal from_real(double x);

  /// Canonical form of exp(t) for any finite t (t may be negative).
  static TowerReal from_log(double t);

  int height() const { return height_; }
  double mantissa() const { return mantissa_; }

  /// Represented value as binary64, or nullopt if it overflows.
  std::optional<double> to_double() const;

  friend bool operator==(const TowerReal&, const TowerReal&) = default;
  friend std::strong_ordering operator<=>(const TowerReal& a,
                                          const TowerReal& b) {
    if (a.height_ != b.height_) return a.height_ <=> b.height_;
    if (a.mantissa_ < b.mantissa_) return std::strong_ordering::less;
    if (a.mantissa_ > b.mantissa_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  TowerReal(int height, double mantissa)
      : height_(height), mantissa_(mantissa) {}
  friend TowerReal exp_t(const TowerReal&);
  friend TowerReal log_t(const TowerReal&);
  friend TowerReal mul_scalar(const TowerReal&, double);

  int height_;
  double mantissa_;
};

enum class Ordering { less, equal, greater };

/// Total order matching the represented values.
Ordering compare(const TowerReal& a, const TowerReal& b);

/// exp of the represented value, canonical.
TowerReal exp_t(const TowerReal& a);

/// log of the represented value; requires value >= 1 (inverse of exp_t on
/// its range). Throws std::domain_error below 1.
TowerReal log_t(const TowerReal& a);

/// value * c for c > 0. Exact whenever the exponent log(value) is itself
/// binary64-representable; above that the factor is below mantissa
/// resolution and the input is returned unchanged (saturation).
TowerReal mul_scalar(const TowerReal& a, double c);

/// value^p for p > 0, computed in the log domain when needed.
TowerReal pow_t(const TowerReal& a, double p);

/// F^(-n) of the represented value, F(t) = exp(t) - 1. Applies exact
/// log1p once the running value is binary64-representable; while it is
/// not, one inverse step is log_t (the +1 is below resolution there).
double rate_functional(const TowerReal& a, int n);

}  // namespace atlas
