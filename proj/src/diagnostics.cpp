#include "halfheavy/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "halfheavy/keyed_stream.hpp"
#include "halfheavy/semicircle.hpp"
#include "parallel.hpp"

namespace halfheavy {

IdentitySuite leave_one_out_suite(const EnsembleConfig& base, std::int64_t triples, std::int64_t N_max,
                                  std::uint64_t seed) {
  if (triples < 1) throw InputError("need at least one triple");
  if (N_max < 8) throw InputError("N_max must be at least 8");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> pick_n(8, N_max);
  std::uniform_real_distribution<double> pick_re(-3.0, 3.0);
  std::uniform_real_distribution<double> pick_im(0.1, 2.0);
  IdentitySuite out;
  out.triples = triples;
  for (std::int64_t t = 0; t < triples; ++t) {
    EnsembleConfig cfg = base;
    cfg.N = pick_n(rng);
    cfg.seed = keyed::derive_seed(seed, static_cast<std::uint64_t>(t));
    const double im = pick_im(rng) * ((rng() & 1u) ? 1.0 : -1.0);
    const cplx z{pick_re(rng), im};
    std::uniform_int_distribution<std::int64_t> pick_k(0, cfg.N - 1);
    const std::int64_t k = pick_k(rng);
    const auto loo = leave_one_out(build_matrix(cfg, 0), z, k);
    out.max_rel_residual = std::max(out.max_rel_residual, std::abs(loo.lhs - loo.rhs) / std::abs(loo.rhs));
    out.all_bound_ok = out.all_bound_ok && loo.bound_ok;
    out.all_sign_ok = out.all_sign_ok && loo.sign_ok;
  }
  return out;
}

BranchSuite branch_suite(int grid) {
  if (grid < 2) throw InputError("grid must have at least 2 points");
  BranchSuite out;
  out.z_points = grid;
  out.t_points = grid;
  out.min_re_K = INFINITY;
  for (int a = 0; a < grid; ++a) {
    const double frac = static_cast<double>(a) / (grid - 1);
    const double re = -4.0 + 8.0 * frac;
    const double im = std::exp(std::log(1e-2) + frac * std::log(300.0)) * (a % 2 == 0 ? 1.0 : -1.0);
    const cplx z{re, im};
    const cplx g = g_sc(z);
    out.max_quadratic_residual = std::max(out.max_quadratic_residual, std::abs(g * g - z * g + 1.0));
    out.max_fixed_point_residual = std::max(out.max_fixed_point_residual, std::abs(1.0 / (z - g) - g));
    for (int b = 0; b < grid; ++b) {
      const double t = std::pow(10.0, -6.0 + 9.0 * static_cast<double>(b) / (grid - 1));
      out.min_re_K = std::min(out.min_re_K, k_point(z, t).K.real());
    }
  }
  return out;
}

PhiGaps phi_expansion_gaps(const DistSpec& dist, cplx lambda, const std::vector<std::int64_t>& Ns, EntryMode mode,
                           double epsilon, SymmetryClass cls) {
  PhiGaps out;
  out.lambda = lambda;
  out.N = Ns;
  for (auto n : Ns) {
    std::optional<TruncationParams> tp;
    if (mode == EntryMode::truncated) tp = truncation_params(dist, n, epsilon);
    const auto v = char_fn(dist, n, lambda, tp, cls);
    out.scaled_gap.push_back(std::pow(static_cast<double>(n), 0.5 * dist.alpha) * std::abs(v.exact - v.expansion));
  }
  out.decreasing = out.scaled_gap.size() >= 2;
  for (std::size_t i = 1; i < out.scaled_gap.size(); ++i) {
    out.decreasing = out.decreasing && out.scaled_gap[i] < out.scaled_gap[i - 1];
  }
  return out;
}

QuadraticFormCheck quadratic_form_check(const DistSpec& dist, std::int64_t N, cplx z, double epsilon,
                                        std::int64_t draws, std::uint64_t seed) {
  EnsembleConfig cfg;
  cfg.N = N;
  cfg.dist = dist;
  cfg.mode = EntryMode::truncated;
  cfg.epsilon = epsilon;
  cfg.seed = keyed::derive_seed(seed, 0);
  const Eigen::MatrixXcd a = build_matrix(cfg, 0).as_complex();
  Eigen::MatrixXcd shifted = -a;
  shifted.diagonal().array() += z;
  const Eigen::MatrixXcd G = shifted.partialPivLu().inverse();

  std::mt19937_64 rng(keyed::derive_seed(seed, 1));
  QuadraticFormCheck out;
  out.N = N;
  out.z = z;
  out.stats = quadratic_form_stats(G, dist, epsilon, draws, rng);
  out.pass_X = out.stats.EX2_hat <= out.stats.boundX + 4.0 * out.stats.X_stderr;
  out.pass_E = out.stats.EE2_hat <= out.stats.boundE + 4.0 * out.stats.E_stderr;
  return out;
}

DiagConcentrationCheck diag_concentration_check(const EnsembleConfig& base, const std::vector<std::int64_t>& Ns,
                                                std::int64_t replicates, cplx z, int threads) {
  if (replicates < 1) throw InputError("need at least one replicate");
  DiagConcentrationCheck out;
  out.z = z;
  out.replicates = replicates;
  DiagConcentration acc(z);
  for (auto n : Ns) {
    EnsembleConfig cfg = base;
    cfg.N = n;
    cfg.seed = keyed::derive_seed(base.seed, static_cast<std::uint64_t>(n));
    std::vector<Eigen::VectorXcd> diags(static_cast<std::size_t>(replicates));
    detail::parallel_for(replicates, threads, [&](std::int64_t r) {
      diags[static_cast<std::size_t>(r)] = resolvent_diag(build_matrix(cfg, r), z);
    });
    for (const auto& d : diags) acc.add_diagonal(n, d);
  }
  out.mean_max_dev = acc.mean_max_dev();
  out.strictly_decreasing = out.mean_max_dev.size() >= 2;
  double prev = INFINITY;
  for (const auto& [n, v] : out.mean_max_dev) {
    out.strictly_decreasing = out.strictly_decreasing && v < prev;
    prev = v;
  }
  return out;
}

ExceedanceCheck exceedance_check(const EnsembleConfig& base, std::int64_t replicates) {
  if (replicates < 1) throw InputError("need at least one replicate");
  ExceedanceCheck out;
  out.N = base.N;
  out.replicates = replicates;
  double total = 0.0;
  for (std::int64_t r = 0; r < replicates; ++r) {
    const auto s = exceedance_stats(base, r);
    total += static_cast<double>(s.observed_count);
    out.expected = s.expected_count;
  }
  out.mean_observed = total / static_cast<double>(replicates);
  out.pass = std::abs(out.mean_observed - out.expected) <= 4.0 * std::sqrt(out.expected);
  return out;
}

}  // namespace halfheavy
