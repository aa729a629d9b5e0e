#pragma once

#include "halfheavy/types.hpp"

namespace halfheavy {

/// Points closer than this to the real axis are rejected.
inline constexpr double kMinImaginaryPart = 1e-8;

/// Stieltjes transform of the semicircle law on [-2, 2]: the root of
/// G^2 - zG + 1 = 0 with |G| < 1.
cplx g_sc(cplx z);

/// dG/dz = G / (2G - z).
cplx g_sc_prime(cplx z);

struct KPoint {
  cplx z;
  double t = 0.0;
  cplx K;     // sgn(Im z) * i * t * G_sc(z)
  cplx K_dz;  // sgn(Im z) * i * t * G_sc'(z)
};

KPoint k_point(cplx z, double t);

}  // namespace halfheavy
