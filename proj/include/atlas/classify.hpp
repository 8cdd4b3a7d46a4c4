#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "atlas/dynamics.hpp"
#include "atlas/tower.hpp"

namespace atlas {

enum class ClassifyMode { rigorous_horizon, tower_heuristic };

struct ClassifyParams {
  double R = 0.0;  // 0 means the function's default base radius
  int N_depth = 12;
  int K_delay = 8;
  int maxiter = 10000;
  double eps_attract = 1e-9;
  ClassifyMode mode = ClassifyMode::rigorous_horizon;
};

/// b_n = F^(-n)(|f^n(z)|) over the rigorously tracked part of the orbit,
/// with liminf/limsup estimated over the final third.
struct RateEstimate {
  std::vector<double> b;
  double liminf_est = 0.0;
  double limsup_est = 0.0;
  int window_start = 0;
};

struct FastEscaping {
  int delay = 0;
  int depth = 0;  // deepest n with |f^(n+delay)(z)| >= M^n(R) verified
  ClassifyMode mode = ClassifyMode::rigorous_horizon;
};
struct Attracted {
  Complex target;
  int steps = 0;
};
enum class UndeterminedReason { horizon, precision, maxiter };
struct Undetermined {
  UndeterminedReason reason;
};

struct ClassificationVerdict {
  std::variant<FastEscaping, Attracted, Undetermined> status;
  std::optional<RateEstimate> rate;

  bool fast_escaping() const {
    return std::holds_alternative<FastEscaping>(status);
  }
  bool attracted() const { return std::holds_alternative<Attracted>(status); }
  bool undetermined() const {
    return std::holds_alternative<Undetermined>(status);
  }
};

struct FixedPointReport {
  double location;
  double multiplier;
  enum class Type { attracting, repelling, neutral } type;
};

/// Real fixed points of x -> lambda * cosh(x)^q by sign-change bracketing
/// and bisection; requires real lambda and lo < hi <= 700.
std::vector<FixedPointReport> find_fixed_points_real(const FunctionSpec& f,
                                                     double lo, double hi,
                                                     int grid);

/// Shared per-function state (schedule, attracting fixed points) so grids
/// can classify many points without rebuilding it. Immutable after
/// construction and safe to share across threads.
class Classifier {
 public:
  Classifier(const FunctionSpec& f, const ClassifyParams& params);

  ClassificationVerdict classify(Complex z) const;
  RateEstimate rate_sequence(Complex z, int N) const;

  const MaxModulusSchedule& schedule() const { return schedule_; }
  const ClassifyParams& params() const { return params_; }
  const FunctionSpec& function() const { return f_; }

 private:
  FunctionSpec f_;
  ClassifyParams params_;
  MaxModulusSchedule schedule_;
  std::vector<FixedPointReport> attractors_;
};

/// One-shot wrappers.
ClassificationVerdict classify(const FunctionSpec& f, Complex z,
                               const ClassifyParams& params);
RateEstimate rate_sequence(const FunctionSpec& f, Complex z, int N);

/// true iff some iterate lands within eps of the (verified attracting)
/// target within maxiter steps.
bool basin_test(const FunctionSpec& f, Complex z, double target, double eps,
                int maxiter);

enum class GrowthClass { bounded_rate, decaying_rate, exploding_rate };

/// Tail classification of b_n = F^(-n)(a_n); invariant under a_n -> a_n^C.
GrowthClass growth_class_test(const std::vector<TowerReal>& a);

/// delta = exp(2C), the hyperbolic-gap constant.
double hyperbolic_gap(double C);

/// Numeric integral of dr / (r log r) from R to R^delta; equals log(delta).
double annulus_distance(double R, double delta);

}  // namespace atlas
