#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

#include "halfheavy/types.hpp"

namespace halfheavy {

/// Calibrated two-sided Pareto entry law: X symmetric, P(|X| > x) =
/// (x/t0)^{-alpha} for x >= t0 and no mass in (0, t0). Unit variance.
struct DistSpec {
  double alpha = 3.0;
  double t0 = 0.0;
  double c = 0.0;  // tail constant: P(|X|>x) = c/Gamma(alpha+1) x^{-alpha}
  bool symmetric = true;
};

struct TruncationParams {
  double beta = 0.0;
  double epsilon = 0.0;
  double muN = 0.0;
  double sigmaN = 1.0;
  std::int64_t N = 0;

  double cutoff() const { return std::pow(static_cast<double>(N), beta); }
};

struct CharFnValue {
  cplx exact;
  cplx expansion;
};

DistSpec calibrate(double alpha);

/// Throws DomainError unless dist is a calibrated member of the family.
void validate(const DistSpec& dist);

/// Coefficient c_phi in E exp(-s|a|^2 N) = 1 - s - c_phi s^{alpha/2} + o(.)
/// for the rescaled entry a = x/sqrt(N). Equals t0^alpha * Gamma(1 - alpha/2)
/// in the real class; the complex class picks up a factor 2^{1-alpha/2}
/// because |x|^2 = (xR^2 + xI^2)/2. Negative on 2 < alpha < 4.
double laplace_constant(const DistSpec& dist, SymmetryClass cls = SymmetryClass::real);

/// P(|X| > x).
double tail_probability(const DistSpec& dist, double x);

/// E[X^2 1{|X| > T}].
double tail_second_moment(const DistSpec& dist, double T);

/// E[X 1{|X| <= T}], computed from the separate positive and negative
/// half-lines. Zero for the symmetric family.
double truncated_mean(const DistSpec& dist, double T);

/// E[X^4 1{|X| <= T}].
double truncated_fourth_moment(const DistSpec& dist, double T);

/// Maps a uniform variate u in (0,1] and a sign to a draw: sign * t0 * u^{-1/alpha}.
inline double sample_from_uniform(const DistSpec& dist, double u, int sign) {
  const double magnitude = dist.t0 * std::pow(u, -1.0 / dist.alpha);
  return sign >= 0 ? magnitude : -magnitude;
}

template <class URBG>
double sample(const DistSpec& dist, URBG& rng) {
  // generate_canonical is in [0,1); flip it onto (0,1].
  const double u = 1.0 - std::generate_canonical<double, 53>(rng);
  const int sign = (rng() & 1u) ? 1 : -1;
  return sample_from_uniform(dist, u, sign);
}

TruncationParams truncation_params(const DistSpec& dist, std::int64_t N, double epsilon);

/// The constant C of the fourth-moment bound N^2 E|a|^4 <= C N^{beta(4-alpha)}
/// for the truncated, rescaled entries at this N (closed form).
double fourth_moment_constant(const DistSpec& dist, const TruncationParams& tp);

/// phi_N(lambda) = E exp(-i lambda |a|^2) for the entry a of the N x N
/// matrix. With `truncation` the entry is (x 1{|x|<=N^beta} - mu_N)/(sigma_N
/// sqrt N), otherwise x/sqrt(N). `expansion` is 1 - i lambda/N -
/// c_phi (i lambda)^{alpha/2} / N^{alpha/2}. Requires Im lambda <= 0.
CharFnValue char_fn(const DistSpec& dist, std::int64_t N, cplx lambda,
                    const std::optional<TruncationParams>& truncation,
                    SymmetryClass cls = SymmetryClass::real);

}  // namespace halfheavy
