#include "halfheavy/heavytail.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gauss_rule.hpp"

namespace halfheavy {

namespace {

// exp(w) - 1 without cancellation for small |w|.
cplx cexpm1(cplx w) {
  const double a = w.real();
  const double b = w.imag();
  const double s = std::sin(0.5 * b);
  return {std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b)};
}

const detail::GaussRule& rule16() {
  static const detail::GaussRule r(16);
  return r;
}

// E[exp(-s y)] - 1 for y = x^2, x the untruncated entry; s = i lambda / N
// with Re s >= 0. Finite part [t0^2, y_split] on a log grid, remainder on a
// ray rotated into the half plane where exp(-s y) decays.
cplx raw_square_laplace_minus_one(const DistSpec& d, cplx s) {
  const double a = d.alpha;
  const double rho = 0.5 * a;
  const double scale = 0.5 * a * std::pow(d.t0, a);  // density of y: scale * y^{-rho-1}
  const double abs_s = std::abs(s);
  const double y0 = d.t0 * d.t0;
  const double y_split = std::max(y0, 1.0 / abs_s);
  const auto& gr = rule16();

  cplx acc{0.0, 0.0};
  const double w_lo = std::log(y0);
  const double w_hi = std::log(y_split);
  if (w_hi > w_lo) {
    const int panels = std::max(1, static_cast<int>(std::ceil((w_hi - w_lo) / 0.25)));
    const double h = (w_hi - w_lo) / panels;
    for (int p = 0; p < panels; ++p) {
      acc += gr.integrate(
          [&](double w) {
            const double y = std::exp(w);
            return cexpm1(-s * y) * (scale * std::pow(y, -rho));  // includes dy = y dw
          },
          w_lo + p * h, w_lo + (p + 1) * h);
    }
  }

  // int_{y_split}^inf exp(-s y) g(y) dy along y = y_split + r e^{i theta}.
  const double theta = -std::arg(s);
  const cplx dir = std::polar(1.0, theta);
  const cplx prefactor = dir * std::exp(-s * y_split);
  cplx ray{0.0, 0.0};
  const double r_max = 60.0 / abs_s;
  const int ray_panels = 60;
  const double hr = r_max / ray_panels;
  for (int p = 0; p < ray_panels; ++p) {
    ray += gr.integrate(
        [&](double r) {
          const cplx y = y_split + r * dir;
          return std::exp(-abs_s * r) * scale * principal_pow(y, -rho - 1.0);
        },
        p * hr, (p + 1) * hr);
  }
  const double tail_mass = std::pow(d.t0, a) * std::pow(y_split, -rho);
  return acc + prefactor * ray - tail_mass;
}

// E[exp(-s (x 1{|x|<=T} - mu)^2)] - 1 for the real entry truncated at T.
cplx truncated_square_laplace_minus_one(const DistSpec& d, cplx s, double T, double mu) {
  const double a = d.alpha;
  const double half_density = 0.5 * a * std::pow(d.t0, a);  // per half-line, times x^{-a-1}
  const auto& gr = rule16();
  cplx acc = tail_probability(d, T) * cexpm1(-s * (mu * mu));
  if (T <= d.t0) return acc;

  const double w_lo = std::log(d.t0);
  const double w_hi = std::log(T);
  const double max_phase = std::abs(s) * (T + std::abs(mu)) * (T + std::abs(mu));
  const int panels = std::max({1, static_cast<int>(std::ceil((w_hi - w_lo) / 0.25)),
                               static_cast<int>(std::ceil(max_phase))});
  const double h = (w_hi - w_lo) / panels;
  for (int p = 0; p < panels; ++p) {
    acc += gr.integrate(
        [&](double w) {
          const double x = std::exp(w);
          const double weight = half_density * std::pow(x, -a);  // dx = x dw
          const double up = x - mu;
          const double down = -x - mu;
          return (cexpm1(-s * (up * up)) + cexpm1(-s * (down * down))) * weight;
        },
        w_lo + p * h, w_lo + (p + 1) * h);
  }
  return acc;
}

}  // namespace

std::string to_string(SymmetryClass s) { return s == SymmetryClass::real ? "real" : "complex"; }
std::string to_string(EntryMode m) { return m == EntryMode::raw ? "raw" : "truncated"; }

SymmetryClass parse_symmetry_class(const std::string& s) {
  if (s == "real") return SymmetryClass::real;
  if (s == "complex") return SymmetryClass::complex;
  throw InputError("unknown symmetry class '" + s + "'");
}

EntryMode parse_entry_mode(const std::string& s) {
  if (s == "raw") return EntryMode::raw;
  if (s == "truncated") return EntryMode::truncated;
  throw InputError("unknown entry mode '" + s + "'");
}

DistSpec calibrate(double alpha) {
  if (!(alpha > 2.0 && alpha < 4.0)) {
    throw DomainError("alpha must lie in (2, 4), got " + std::to_string(alpha));
  }
  DistSpec d;
  d.alpha = alpha;
  d.t0 = std::sqrt((alpha - 2.0) / alpha);
  d.c = std::tgamma(alpha + 1.0) * std::pow(d.t0, alpha);
  d.symmetric = true;
  return d;
}

void validate(const DistSpec& d) {
  if (!(d.alpha > 2.0 && d.alpha < 4.0)) throw DomainError("alpha must lie in (2, 4)");
  if (!(d.t0 > 0.0) || !(d.c > 0.0)) throw DomainError("t0 and c must be positive");
  const double variance = d.t0 * d.t0 * d.alpha / (d.alpha - 2.0);
  if (std::abs(variance - 1.0) > 1e-12) throw DomainError("distribution is not unit variance");
  const double c = std::tgamma(d.alpha + 1.0) * std::pow(d.t0, d.alpha);
  if (std::abs(c - d.c) > 1e-12 * std::max(1.0, c)) throw DomainError("tail constant inconsistent with t0");
  if (!d.symmetric) throw DomainError("only the symmetric family is supported");
}

double laplace_constant(const DistSpec& d, SymmetryClass cls) {
  const double rho = 0.5 * d.alpha;
  const double base = std::pow(d.t0, d.alpha) * std::tgamma(1.0 - rho);
  return cls == SymmetryClass::real ? base : std::pow(2.0, 1.0 - rho) * base;
}

double tail_probability(const DistSpec& d, double x) {
  if (x < d.t0) return 1.0;
  return std::pow(x / d.t0, -d.alpha);
}

double tail_second_moment(const DistSpec& d, double T) {
  const double a = d.alpha;
  const double from = std::max(T, d.t0);
  return a * std::pow(d.t0, a) * std::pow(from, 2.0 - a) / (a - 2.0);
}

double truncated_mean(const DistSpec& d, double T) {
  if (T <= d.t0) return 0.0;
  const double a = d.alpha;
  // Each half-line carries probability 1/2 for the symmetric family.
  const double p_plus = 0.5;
  const double p_minus = 0.5;
  const double half_line = a * std::pow(d.t0, a) * (std::pow(d.t0, 1.0 - a) - std::pow(T, 1.0 - a)) / (a - 1.0);
  return p_plus * half_line - p_minus * half_line;
}

double truncated_fourth_moment(const DistSpec& d, double T) {
  if (T <= d.t0) return 0.0;
  const double a = d.alpha;
  return a * std::pow(d.t0, a) * (std::pow(T, 4.0 - a) - std::pow(d.t0, 4.0 - a)) / (4.0 - a);
}

TruncationParams truncation_params(const DistSpec& d, std::int64_t N, double epsilon) {
  if (N < 2) throw InputError("truncation_params requires N >= 2");
  if (!(epsilon > 0.0)) throw InputError("truncation_params requires epsilon > 0");
  TruncationParams tp;
  tp.N = N;
  tp.epsilon = epsilon;
  tp.beta = 0.25 * (1.0 + d.alpha / 4.0) + epsilon;
  const double T = tp.cutoff();
  tp.muN = truncated_mean(d, T);
  const double second = 1.0 - tail_second_moment(d, T);
  tp.sigmaN = std::sqrt(second - tp.muN * tp.muN);
  return tp;
}

double fourth_moment_constant(const DistSpec& d, const TruncationParams& tp) {
  const double T = tp.cutoff();
  const double s2 = tp.sigmaN * tp.sigmaN;
  // mu_N = 0 for the symmetric family, so the centred fourth moment is the raw one.
  const double n2_m4 = truncated_fourth_moment(d, T) / (s2 * s2);
  return n2_m4 / std::pow(static_cast<double>(tp.N), tp.beta * (4.0 - d.alpha));
}

CharFnValue char_fn(const DistSpec& d, std::int64_t N, cplx lambda,
                    const std::optional<TruncationParams>& truncation, SymmetryClass cls) {
  if (lambda.imag() > 0.0) throw DomainError("char_fn requires Im lambda <= 0");
  if (N < 1) throw InputError("char_fn requires N >= 1");
  const double n = static_cast<double>(N);
  const double rho = 0.5 * d.alpha;
  const cplx il = cplx{0.0, 1.0} * lambda;

  CharFnValue out;
  out.expansion = 1.0 - il / n - laplace_constant(d, cls) * principal_pow(il, rho) / std::pow(n, rho);
  if (lambda == cplx{0.0, 0.0}) {
    out.exact = 1.0;
    out.expansion = 1.0;
    return out;
  }

  // Complex class: |a|^2 = (xR^2 + xI^2) / (2N), two independent halves.
  const cplx per_component = cls == SymmetryClass::real ? il : 0.5 * il;
  cplx half_minus_one;
  if (truncation) {
    const double s2 = truncation->sigmaN * truncation->sigmaN;
    const double mu = cls == SymmetryClass::real ? truncation->muN : 0.0;
    half_minus_one = truncated_square_laplace_minus_one(d, per_component / (s2 * n), truncation->cutoff(), mu);
  } else {
    half_minus_one = raw_square_laplace_minus_one(d, per_component / n);
  }
  if (cls == SymmetryClass::real) {
    out.exact = 1.0 + half_minus_one;
  } else {
    out.exact = 1.0 + half_minus_one * (2.0 + half_minus_one);
  }
  return out;
}

}  // namespace halfheavy
