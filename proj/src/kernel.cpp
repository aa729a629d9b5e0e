#include "halfheavy/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "gauss_rule.hpp"
#include "halfheavy/semicircle.hpp"

namespace halfheavy {

namespace {

constexpr cplx I{0.0, 1.0};

void require_kernel_point(cplx z) {
  if (!std::isfinite(z.real()) || std::abs(z.imag()) < kMinImaginaryPart) {
    throw DomainError("kernel requires z off the real axis");
  }
}

struct Node {
  double t;
  double w;  // Gauss weight / t
};

// Per-node quantities of one variable (z, t).
struct Side {
  std::vector<cplx> K, Kd, Kp, Kp1, g, E;
  std::vector<double> w;

  Side(cplx z, const std::vector<Node>& nodes, double p) {
    const double s = sgn_im(z);
    const cplx G = g_sc(z);
    const cplx Gd = g_sc_prime(z);
    const std::size_t n = nodes.size();
    K.resize(n), Kd.resize(n), Kp.resize(n), Kp1.resize(n), g.resize(n), E.resize(n), w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = nodes[i].t;
      K[i] = s * I * t * G;
      if (!(K[i].real() > 0.0)) throw DomainError("branch violation: Re K <= 0 at a quadrature node");
      Kd[i] = s * I * t * Gd;
      Kp[i] = principal_pow(K[i], p);
      Kp1[i] = Kp[i] / K[i];
      g[i] = s * I * t - Kd[i];
      E[i] = std::exp(s * I * t * z - K[i]);
      w[i] = nodes[i].w;
    }
  }
};

// Geometric panels between t_lo and t_hi, split further so that no panel
// is wider than max_width.
std::vector<Node> make_nodes(double t_lo, double t_hi, int panels_per_decade, double max_width,
                             const detail::GaussRule& rule) {
  std::vector<Node> nodes;
  const double decades = std::log10(t_hi / t_lo);
  const int geometric = std::max(1, static_cast<int>(std::ceil(decades * panels_per_decade)));
  const double ratio = std::pow(t_hi / t_lo, 1.0 / geometric);
  double a = t_lo;
  for (int k = 0; k < geometric; ++k) {
    const double b = (k + 1 == geometric) ? t_hi : a * ratio;
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
    const double h = (b - a) / pieces;
    for (int q = 0; q < pieces; ++q) {
      const double lo = a + q * h;
      const double half = 0.5 * h;
      const double mid = lo + half;
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const double t = mid + half * rule.nodes[i];
        nodes.push_back({t, half * rule.weights[i] / t});
      }
    }
    a = b;
  }
  return nodes;
}

// Pairwise (tree) summation in index order: the result depends only on
// the inputs, never on how rows were distributed across threads.
cplx tree_sum(const std::vector<cplx>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = lo; i < hi; ++i) acc += v[i];
    return acc;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return tree_sum(v, lo, mid) + tree_sum(v, mid, hi);
}

template <class RowFn>
cplx parallel_rows(std::size_t rows, int threads, RowFn&& row) {
  std::vector<cplx> sums(rows);
  const std::size_t workers = std::clamp<std::size_t>(threads > 0 ? static_cast<std::size_t>(threads) : 1, 1, rows ? rows : 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < rows; ++i) sums[i] = row(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < rows; i += workers) sums[i] = row(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  return rows ? tree_sum(sums, 0, rows) : cplx{0.0, 0.0};
}

struct Integral {
  cplx value;
  double abs_sum = 0.0;  // sum of |terms|, for the roundoff floor
};

// int int dd-integrand(t, t') w w' over the node product.
Integral dd_integral(const Side& a, const Side& b, double p, int threads) {
  std::vector<double> row_abs(a.w.size());
  const cplx v = parallel_rows(a.w.size(), threads, [&](std::size_t i) {
    cplx acc{0.0, 0.0};
    double acc_abs = 0.0;
    for (std::size_t j = 0; j < b.w.size(); ++j) {
      const cplx S = a.K[i] + b.K[j];
      const cplx pw = principal_pow(S, p);
      const cplx s1 = pw / S;
      const cplx s2 = s1 / S;
      const cplx B = pw - a.Kp[i] - b.Kp[j];
      const cplx Bz = p * (s1 - a.Kp1[i]) * a.Kd[i];
      const cplx Bzp = p * (s1 - b.Kp1[j]) * b.Kd[j];
      const cplx Bzz = p * (p - 1.0) * s2 * a.Kd[i] * b.Kd[j];
      const cplx term = b.w[j] * b.E[j] * (Bzz + Bz * b.g[j] + Bzp * a.g[i] + B * a.g[i] * b.g[j]);
      acc += term;
      acc_abs += std::abs(term);
    }
    row_abs[i] = a.w[i] * std::abs(a.E[i]) * acc_abs;
    return a.w[i] * a.E[i] * acc;
  });
  Integral out{v, 0.0};
  for (double r : row_abs) out.abs_sum += r;
  return out;
}

double default_t_max(cplx z, cplx zp) { return 40.0 / std::min(std::abs(z.imag()), std::abs(zp.imag())); }

double max_panel_width(cplx z, cplx zp, int panels_per_decade) {
  return (8.0 / panels_per_decade) / (1.0 + std::max(std::abs(z), std::abs(zp)));
}

}  // namespace

void validate(const QuadratureParams& p) {
  if (!(p.t_min > 0.0)) throw InputError("quadrature t_min must be positive");
  if (p.T_max > 0.0 && !(p.t_min < p.T_max)) throw InputError("quadrature requires t_min < T_max");
  if (!(p.target_rel_err > 0.0)) throw InputError("quadrature target_rel_err must be positive");
  if (p.panels_per_decade < 1 || p.points_per_panel < 2) throw InputError("quadrature resolution too small");
  if (p.max_refinements < 1) throw InputError("quadrature needs at least one refinement");
}

cplx integrand_undiff(cplx z, cplx zp, double t, double tp, const DistSpec& dist) {
  require_kernel_point(z);
  require_kernel_point(zp);
  const double p = 0.5 * dist.alpha;
  const KPoint k1 = k_point(z, t);
  const KPoint k2 = k_point(zp, tp);
  const cplx B = principal_pow(k1.K + k2.K, p) - principal_pow(k1.K, p) - principal_pow(k2.K, p);
  return B * std::exp(sgn_im(z) * I * t * z - k1.K + sgn_im(zp) * I * tp * zp - k2.K);
}

cplx integrand_dd(cplx z, cplx zp, double t, double tp, const DistSpec& dist) {
  require_kernel_point(z);
  require_kernel_point(zp);
  const double p = 0.5 * dist.alpha;
  const KPoint k1 = k_point(z, t);
  const KPoint k2 = k_point(zp, tp);
  const cplx S = k1.K + k2.K;
  const cplx B = principal_pow(S, p) - principal_pow(k1.K, p) - principal_pow(k2.K, p);
  const cplx Bz = p * (principal_pow(S, p - 1.0) - principal_pow(k1.K, p - 1.0)) * k1.K_dz;
  const cplx Bzp = p * (principal_pow(S, p - 1.0) - principal_pow(k2.K, p - 1.0)) * k2.K_dz;
  const cplx Bzz = p * (p - 1.0) * principal_pow(S, p - 2.0) * k1.K_dz * k2.K_dz;
  const cplx g1 = sgn_im(z) * I * t - k1.K_dz;
  const cplx g2 = sgn_im(zp) * I * tp - k2.K_dz;
  const cplx F = std::exp(sgn_im(z) * I * t * z - k1.K + sgn_im(zp) * I * tp * zp - k2.K);
  return (Bzz + Bz * g2 + Bzp * g1 + B * g1 * g2) * F;
}

KernelValue evaluate_C(cplx z, cplx zp, const DistSpec& dist, const QuadratureParams& params, SymmetryClass cls) {
  require_kernel_point(z);
  require_kernel_point(zp);
  validate(dist);
  validate(params);
  const double p = 0.5 * dist.alpha;
  const double kc = laplace_constant(dist, cls);
  const double t_max = params.T_max > 0.0 ? params.T_max : default_t_max(z, zp);
  if (!(params.t_min < t_max)) throw InputError("quadrature requires t_min < T_max");
  const detail::GaussRule rule(static_cast<unsigned>(params.points_per_panel));

  auto integrate = [&](int ppd) {
    const auto nodes = make_nodes(params.t_min, t_max, ppd, max_panel_width(z, zp, ppd), rule);
    const Side a(z, nodes, p), b(zp, nodes, p);
    const Integral in = dd_integral(a, b, p, params.threads);
    return Integral{-0.5 * kc * in.value, 0.5 * std::abs(kc) * in.abs_sum};
  };

  // Contribution of the L-shaped region where at least one variable lies in
  // the strip [lo, hi] and the other in [t_min, T_max] or the strip.
  auto strip_contribution = [&](int ppd, double lo, double hi) {
    const auto inner = make_nodes(params.t_min, t_max, ppd, max_panel_width(z, zp, ppd), rule);
    const auto strip = make_nodes(lo, hi, ppd, max_panel_width(z, zp, ppd), rule);
    std::vector<Node> all = inner;
    all.insert(all.end(), strip.begin(), strip.end());
    const Side sz(z, strip, p), szp_all(zp, all, p);
    const Side sz_in(z, inner, p), szp_strip(zp, strip, p);
    const cplx v = dd_integral(sz, szp_all, p, params.threads).value +
                   dd_integral(sz_in, szp_strip, p, params.threads).value;
    return 0.5 * std::abs(kc) * std::abs(v);
  };
  // Beyond T_max the integrand decays like exp(-t |Im z|), so the strip
  // [T, 2T] dominates what is left out. Below t_min it behaves like
  // t^{alpha/2 - 1} dt/t: the omitted part is a geometric series of dyadic
  // strips with ratio 2^{1 - alpha/2}.
  auto tail = [&](int ppd) { return strip_contribution(ppd, t_max, 2.0 * t_max); };
  auto head = [&](int ppd) {
    return strip_contribution(ppd, 0.5 * params.t_min, params.t_min) / (1.0 - std::pow(2.0, 1.0 - p));
  };

  KernelValue out;
  out.z = z;
  out.zprime = zp;
  out.alpha = dist.alpha;
  out.c = dist.c;
  out.kernel_constant = kc;
  out.params = params;
  out.params.T_max = t_max;

  int ppd = params.panels_per_decade;
  Integral coarse = integrate(ppd);
  const double tail_err = tail(ppd);
  const double head_err = head(ppd);
  for (int level = 0; level < params.max_refinements; ++level) {
    ppd *= 2;
    const Integral fine = integrate(ppd);
    out.value = fine.value;
    out.refinement_diff = std::abs(fine.value - coarse.value);
    out.tail_estimate = tail_err;
    out.head_estimate = head_err;
    out.est_abs_err = out.refinement_diff + tail_err + head_err + 1e-14 * fine.abs_sum;
    out.params.panels_per_decade = ppd;
    out.converged = out.est_abs_err <= params.target_rel_err * std::abs(out.value);
    if (out.converged) break;
    coarse = fine;
  }
  return out;
}

cplx evaluate_C_oracle(cplx z, cplx zp, const DistSpec& dist, const QuadratureParams& params, double fd_step,
                       SymmetryClass cls) {
  require_kernel_point(z);
  require_kernel_point(zp);
  validate(dist);
  validate(params);
  if (!(fd_step > 0.0)) throw InputError("fd_step must be positive");
  const double p = 0.5 * dist.alpha;
  const double kc = laplace_constant(dist, cls);
  const double t_max = params.T_max > 0.0 ? params.T_max : default_t_max(z, zp);
  const detail::GaussRule rule(static_cast<unsigned>(params.points_per_panel));
  const int ppd = params.panels_per_decade;
  const auto nodes = make_nodes(params.t_min, t_max, ppd, max_panel_width(z, zp, ppd), rule);

  const Side zp_plus(z + fd_step, nodes, p), zm(z - fd_step, nodes, p);
  const Side wp(zp + fd_step, nodes, p), wm(zp - fd_step, nodes, p);
  auto undiff = [p](const Side& a, std::size_t i, const Side& b, std::size_t j) {
    const cplx B = principal_pow(a.K[i] + b.K[j], p) - a.Kp[i] - b.Kp[j];
    return B * a.E[i] * b.E[j];
  };
  const cplx v = parallel_rows(nodes.size(), params.threads, [&](std::size_t i) {
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const cplx d = undiff(zp_plus, i, wp, j) - undiff(zp_plus, i, wm, j) - undiff(zm, i, wp, j) +
                     undiff(zm, i, wm, j);
      acc += nodes[j].w * d;
    }
    return nodes[i].w * acc;
  });
  return -0.5 * kc * v / (4.0 * fd_step * fd_step);
}

}  // namespace halfheavy
