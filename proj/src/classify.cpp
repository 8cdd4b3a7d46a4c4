#include "atlas/classify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace atlas {

namespace {

RateEstimate make_rate_estimate(std::vector<double> b) {
  RateEstimate r;
  r.b = std::move(b);
  if (r.b.empty()) return r;
  size_t win = std::max<size_t>(1, r.b.size() / 3);
  size_t start = r.b.size() - win;
  r.window_start = static_cast<int>(start);
  double lo = r.b[start], hi = r.b[start];
  for (size_t i = start; i < r.b.size(); ++i) {
    lo = std::min(lo, r.b[i]);
    hi = std::max(hi, r.b[i]);
  }
  r.liminf_est = lo;
  r.limsup_est = hi;
  return r;
}

}  // namespace

std::vector<FixedPointReport> find_fixed_points_real(const FunctionSpec& f,
                                                     double lo, double hi,
                                                     int grid) {
  if (!f.real_lambda()) {
    throw std::invalid_argument("find_fixed_points_real: lambda must be real");
  }
  if (!(lo < hi) || !(hi <= 700.0)) {
    throw std::invalid_argument("find_fixed_points_real: need lo < hi <= 700");
  }
  if (grid < 2) throw std::invalid_argument("need grid >= 2");
  const double lam = f.lambda.real();
  auto phi = [&](double x) {
    double c = std::cosh(x);
    return lam * ((f.q == 2) ? c * c : c) - x;
  };
  std::vector<FixedPointReport> out;
  double xprev = lo, fprev = phi(lo);
  for (int i = 1; i <= grid; ++i) {
    double x = lo + (hi - lo) * i / grid;
    double fx = phi(x);
    if (fprev == 0.0 || (fprev < 0.0) != (fx < 0.0)) {
      double a = xprev, b = x;
      double fa = fprev;
      for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
        double m = 0.5 * (a + b);
        double fm = phi(m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if ((fa < 0.0) == (fm < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      double p = 0.5 * (a + b);
      double mult = derivative(f, Complex(p, 0.0)).real();
      FixedPointReport::Type type;
      double am = std::abs(mult);
      if (std::abs(am - 1.0) < 1e-12) {
        type = FixedPointReport::Type::neutral;
      } else if (am < 1.0) {
        type = FixedPointReport::Type::attracting;
      } else {
        type = FixedPointReport::Type::repelling;
      }
      if (out.empty() || std::abs(out.back().location - p) > 1e-10) {
        out.push_back({p, mult, type});
      }
    }
    xprev = x;
    fprev = fx;
  }
  return out;
}

Classifier::Classifier(const FunctionSpec& f, const ClassifyParams& params)
    : f_(f), params_(params) {
  if (params_.N_depth < 0 || params_.K_delay < 0 ||
      !(params_.eps_attract > 0.0)) {
    throw std::invalid_argument("Classifier: invalid params");
  }
  if (params_.R == 0.0) params_.R = f.default_radius();
  schedule_ = max_modulus_schedule(f_, params_.R, params_.N_depth);
  if (f_.real_lambda()) {
    for (const auto& fp : find_fixed_points_real(f_, -20.0, 20.0, 40000)) {
      if (fp.type == FixedPointReport::Type::attracting) {
        attractors_.push_back(fp);
      }
    }
  }
}

ClassificationVerdict Classifier::classify(Complex z) const {
  const int K = params_.K_delay;
  const int N = params_.N_depth;
  const size_t need = static_cast<size_t>(K) + N + 1;

  std::vector<TowerReal> mags;
  mags.reserve(need);
  size_t horizon = need;  // index of first non-rigorous magnitude
  OrbitPoint p = make_orbit_point(z);
  for (size_t i = 0; i < need; ++i) {
    mags.push_back(magnitude(p));
    if (!magnitude_rigorous(p) && horizon == need) horizon = i;
    if (i + 1 < need) p = step(f_, p);
  }

  // Rate data over the rigorous prefix.
  std::vector<double> b;
  for (size_t n = 0; n < std::min(horizon, need); ++n) {
    b.push_back(rate_functional(mags[n], static_cast<int>(n)));
  }
  auto rate = make_rate_estimate(std::move(b));

  const bool rigorous = params_.mode == ClassifyMode::rigorous_horizon;
  bool truncated = false;
  for (int k = 0; k <= K; ++k) {
    int n_max = N;
    if (rigorous) {
      long avail = static_cast<long>(horizon) - 1 - k;
      if (avail < 0) {
        truncated = true;
        continue;
      }
      n_max = static_cast<int>(std::min<long>(N, avail));
      if (n_max < N) truncated = true;
    }
    bool ok = true;
    for (int n = 0; n <= n_max; ++n) {
      if (mags[k + n] < schedule_.values[n]) {
        ok = false;
        break;
      }
    }
    if (ok) {
      return {FastEscaping{k, n_max, params_.mode}, rate};
    }
  }

  // Convergence to a pre-verified attracting fixed point.
  for (const auto& fp : attractors_) {
    Complex target(fp.location, 0.0);
    Complex w = z;
    for (int s = 1; s <= params_.maxiter; ++s) {
      if (std::abs(w.real()) > 700.0) break;
      w = evaluate(f_, w);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) break;
      if (std::abs(w - target) < params_.eps_attract) {
        return {Attracted{target, s}, rate};
      }
    }
  }

  UndeterminedReason reason = (rigorous && truncated)
                                  ? UndeterminedReason::precision
                                  : UndeterminedReason::maxiter;
  return {Undetermined{reason}, rate};
}

RateEstimate Classifier::rate_sequence(Complex z, int N) const {
  if (N < 1) throw std::invalid_argument("rate_sequence: need N >= 1");
  std::vector<double> b;
  OrbitPoint p = make_orbit_point(z);
  for (int n = 0; n <= N; ++n) {
    if (!magnitude_rigorous(p)) break;
    b.push_back(rate_functional(magnitude(p), n));
    if (n < N) p = step(f_, p);
  }
  return make_rate_estimate(std::move(b));
}

ClassificationVerdict classify(const FunctionSpec& f, Complex z,
                               const ClassifyParams& params) {
  return Classifier(f, params).classify(z);
}

RateEstimate rate_sequence(const FunctionSpec& f, Complex z, int N) {
  ClassifyParams p;
  p.N_depth = 1;  // schedule is irrelevant for the rate sequence
  return Classifier(f, p).rate_sequence(z, N);
}

bool basin_test(const FunctionSpec& f, Complex z, double target, double eps,
                int maxiter) {
  if (!(eps > 0.0) || maxiter < 1) {
    throw std::invalid_argument("basin_test: invalid eps/maxiter");
  }
  // The declared target may be rounded (e.g. 0.589); refine it to the
  // nearby fixed point first, then demand it really attracts.
  Complex p(target, 0.0);
  for (int it = 0; it < 500; ++it) {
    Complex np = evaluate(f, p);
    if (std::abs(np - p) < 1e-14) break;
    p = np;
    if (!std::isfinite(p.real()) || std::abs(p - Complex(target, 0.0)) > 0.1) {
      throw std::invalid_argument(
          "basin_test: no attracting fixed point near target");
    }
  }
  if (std::abs(evaluate(f, p) - p) > 1e-10 ||
      std::abs(derivative(f, p)) >= 1.0) {
    throw std::invalid_argument("basin_test: target is not attracting fixed");
  }
  Complex w = z;
  for (int s = 0; s < maxiter; ++s) {
    if (std::abs(w - p) < eps) return true;
    if (std::abs(w.real()) > 700.0) return false;
    w = evaluate(f, w);
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return false;
  }
  return std::abs(w - p) < eps;
}

GrowthClass growth_class_test(const std::vector<TowerReal>& a) {
  if (a.size() < 10) {
    throw std::invalid_argument("growth_class_test: sequence too short");
  }
  std::vector<double> b;
  b.reserve(a.size());
  for (size_t n = 0; n < a.size(); ++n) {
    b.push_back(rate_functional(a[n], static_cast<int>(n)));
  }
  size_t win = std::max<size_t>(3, b.size() / 3);
  size_t start = b.size() - win;
  double lo = b[start], hi = b[start];
  for (size_t i = start; i < b.size(); ++i) {
    lo = std::min(lo, b[i]);
    hi = std::max(hi, b[i]);
  }
  double first = b[start];
  double last = b.back();
  double ratio = (first > 0.0) ? last / first : 0.0;
  if (hi < 0.01 || (ratio < 0.8 && last < 1.0)) {
    return GrowthClass::decaying_rate;
  }
  if (lo > 100.0 || ratio > 1.25) return GrowthClass::exploding_rate;
  return GrowthClass::bounded_rate;
}

double hyperbolic_gap(double C) {
  if (!(C >= 0.0) || !std::isfinite(C)) {
    throw std::invalid_argument("hyperbolic_gap: need C >= 0");
  }
  return std::exp(2.0 * C);
}

namespace {
// Adaptive Simpson for 1/s on [a, b], 0 < a <= b.
double simpson(double a, double b) {
  double m = 0.5 * (a + b);
  return (b - a) / 6.0 * (1.0 / a + 4.0 / m + 1.0 / b);
}
double integrate_recip(double a, double b, double whole, double tol,
                       int depth) {
  double m = 0.5 * (a + b);
  double left = simpson(a, m), right = simpson(m, b);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return integrate_recip(a, m, left, tol / 2.0, depth - 1) +
         integrate_recip(m, b, right, tol / 2.0, depth - 1);
}
}  // namespace

double annulus_distance(double R, double delta) {
  if (!(R > 1.0)) throw std::domain_error("annulus_distance: need R > 1");
  if (!(delta >= 1.0)) {
    throw std::domain_error("annulus_distance: need delta >= 1");
  }
  double a = std::log(R);
  double b = delta * a;
  if (!(b <= 709.0)) {
    throw std::domain_error("annulus_distance: R^delta not representable");
  }
  if (b == a) return 0.0;
  // Integrate dr/(r log r) after substituting s = log r.
  return integrate_recip(a, b, simpson(a, b), 1e-13, 48);
}

}  // namespace atlas
