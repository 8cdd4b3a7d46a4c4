#include "atlas/rays.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace atlas {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

int ExternalAddress::bound() const {
  int b = 0;
  for (int k : entries) b = std::max(b, std::abs(k));
  return b;
}

Complex inverse_branch(Complex w, int k, int sigma) {
  if (sigma != 1 && sigma != -1) {
    throw std::invalid_argument("inverse_branch: sigma must be +1 or -1");
  }
  Complex u = 2.0 * w;
  if (std::abs(u.imag()) < 1e-8 && u.real() >= -1.0 - 1e-8 &&
      u.real() <= 1.0 + 1e-8) {
    throw std::domain_error("inverse_branch: 2w too close to the cut [-1,1]");
  }
  // (u + s)(u - s) = 1, so |u + s| >= 1 for the right sqrt sign; then
  // a = Log(u + s) has Re a >= 0 and negating it when needed puts
  // Im a in [0, pi]. cosh(sigma*a + 2*pi*i*k) = (e^a + e^-a)/2 = u exactly.
  Complex s = std::sqrt(u * u - 1.0);
  if (std::abs(u + s) < 1.0) s = -s;
  Complex a = std::log(u + s);
  if (a.imag() < 0.0) a = -a;
  return Complex(sigma, 0.0) * a + Complex(0.0, 2.0 * kPi * k);
}

namespace {
Complex pullback(const ExternalAddress& address, int depth, double X0) {
  Complex w(X0, 0.0);
  for (int j = depth - 1; j >= 0; --j) {
    try {
      w = inverse_branch(w, address.entries[j], address.sigma);
    } catch (const std::domain_error& e) {
      throw std::domain_error(std::string(e.what()) + " at pullback depth " +
                              std::to_string(depth - j));
    }
  }
  return w;
}
}  // namespace

RayPoint trace_ray(const ExternalAddress& address, int D, double X0) {
  if (!(X0 >= 5.0)) throw std::invalid_argument("trace_ray: need X0 >= 5");
  if (D < 2) throw std::invalid_argument("trace_ray: need D >= 2");
  if (static_cast<size_t>(D) > address.entries.size()) {
    throw std::invalid_argument("trace_ray: address prefix shorter than D");
  }
  Complex est = pullback(address, D, X0);
  Complex prev = pullback(address, D - 1, X0);
  return {est, D, std::abs(est - prev)};
}

bool ray_escape_check(const ExternalAddress& address, int D, double X0,
                      const ClassifyParams& params) {
  RayPoint p = trace_ray(address, D, X0);
  return classify(FunctionSpec::g(), p.position, params).fast_escaping();
}

}  // namespace atlas
