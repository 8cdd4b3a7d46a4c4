#pragma once

#include <vector>

#include "atlas/classify.hpp"
#include "atlas/dynamics.hpp"

namespace atlas {

/// Symbol sequence selecting inverse branches of g(z) = cosh(z)/2: entry
/// k_j picks the 2*pi*i*k translate; sigma fixes the tract side for the
/// whole address.
struct ExternalAddress {
  std::vector<int> entries;
  int sigma = +1;

  int bound() const;
};

struct RayPoint {
  Complex position;
  int depth = 0;
  double cauchy_error = 0.0;  // |estimate_D - estimate_(D-1)|
};

/// z with g(z) = w on the branch sigma * Log(2w + sqrt(4w^2 - 1)) + 2*pi*i*k,
/// principal part with Im in [0, pi]. Throws std::domain_error when 2w is
/// within 1e-8 of the cut [-1, 1].
Complex inverse_branch(Complex w, int k, int sigma);

/// Pullback of the real start abscissa X0 through the address entries
/// k_(D-1), ..., k_0. Requires X0 >= 5, D >= 2, prefix length >= D.
/// Branch-cut violations mid-pullback are reported with the failing depth.
RayPoint trace_ray(const ExternalAddress& address, int D, double X0);

/// true iff the traced point carries a fast-escaping certificate for g.
bool ray_escape_check(const ExternalAddress& address, int D, double X0,
                      const ClassifyParams& params);

}  // namespace atlas
