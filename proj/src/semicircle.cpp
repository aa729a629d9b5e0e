#include "halfheavy/semicircle.hpp"

#include <cmath>
#include <string>

namespace halfheavy {

namespace {

void require_off_axis(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z.imag()) < kMinImaginaryPart) {
    throw DomainError("z must satisfy |Im z| >= 1e-8");
  }
}

}  // namespace

cplx g_sc(cplx z) {
  require_off_axis(z);
  // The two roots multiply to 1, so exactly one lies inside the unit disc
  // whenever z is off the real axis.
  const cplx r = std::sqrt(z * z - 4.0);
  const cplx g1 = 0.5 * (z - r);
  const cplx g2 = 0.5 * (z + r);
  // Take the larger-modulus root directly and invert it: avoids the
  // cancellation in z - r when |z| is large.
  const cplx big = std::abs(g1) >= std::abs(g2) ? g1 : g2;
  return 1.0 / big;
}

cplx g_sc_prime(cplx z) {
  const cplx g = g_sc(z);
  return g / (2.0 * g - z);
}

KPoint k_point(cplx z, double t) {
  if (!(t > 0.0)) throw DomainError("k_point requires t > 0, got " + std::to_string(t));
  const cplx pref = sgn_im(z) * cplx{0.0, 1.0} * t;
  KPoint k;
  k.z = z;
  k.t = t;
  k.K = pref * g_sc(z);
  k.K_dz = pref * g_sc_prime(z);
  return k;
}

}  // namespace halfheavy
