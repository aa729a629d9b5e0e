// Acceptance suite. Prints one PASS/FAIL line per criterion, with the
// measured numbers, and exits nonzero if any criterion fails.
//
//   acceptance            run all criteria
//   acceptance 1 3 7      run a subset
//
// The same lines are written to acceptance_report.txt in the working
// directory, since ctest hides the output of passing tests.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "halfheavy/diagnostics.hpp"
#include "halfheavy/experiments.hpp"
#include "halfheavy/kernel.hpp"

using namespace halfheavy;

namespace {

constexpr std::uint64_t kSeed = 20240611;

int worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

QuadratureParams quadrature() {
  QuadratureParams q;
  q.threads = worker_count();
  return q;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string fmtz(cplx z) { return fmt("%g", z.real()) + (z.imag() < 0 ? "" : "+") + fmt("%g", z.imag()) + "i"; }

struct Result {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

EnsembleConfig base_config(double alpha, EntryMode mode) {
  EnsembleConfig c;
  c.N = 128;
  c.dist = calibrate(alpha);
  c.mode = mode;
  c.epsilon = 0.01;
  c.seed = kSeed;
  return c;
}

// 1. Leave-one-out identity and interlacing bound.
Result exact_identities() {
  Result r;
  const auto s = leave_one_out_suite(base_config(3.0, EntryMode::raw), 50, 200, kSeed);
  r.require(s.max_rel_residual <= 1e-9, "max relative residual " + fmt("%.3e", s.max_rel_residual) + " <= 1e-9");
  r.require(s.all_bound_ok, "|Tr G - Tr G_k| <= pi/|Im z| on all 50 triples");
  r.require(s.all_sign_ok, "Im of the Schur denominator has the sign of Im z");
  return r;
}

// 2. Semicircle branch, positivity of Re K and the expansion gap.
Result branch_and_transform() {
  Result r;
  const auto b = branch_suite(20);
  r.require(b.max_quadratic_residual <= 1e-12, "quadratic residual " + fmt("%.2e", b.max_quadratic_residual));
  r.require(b.max_fixed_point_residual <= 1e-12, "fixed point residual " + fmt("%.2e", b.max_fixed_point_residual));
  r.require(b.min_re_K > 0.0, "min Re K over 20x20 grid " + fmt("%.3e", b.min_re_K));
  const auto g = phi_expansion_gaps(calibrate(3.0), {0.0, -1.0}, {100, 1000, 10000, 100000});
  std::string gaps;
  for (double v : g.scaled_gap) gaps += " " + fmt("%.5g", v);
  r.require(g.decreasing, "scaled expansion gap decreasing over N = 1e2..1e5:" + gaps);
  return r;
}

// 3. Kernel: oracle agreement, symmetry, conjugation, self-convergence.
Result kernel_correctness() {
  Result r;
  const std::vector<std::pair<cplx, cplx>> pairs = {
      {{0.0, 2.0}, {1.0, 1.0}}, {{0.5, 0.8}, {0.0, 3.0}}, {{1.0, 1.0}, {1.0, -1.0}}};
  for (double a : {2.5, 3.0, 3.5}) {
    const DistSpec d = calibrate(a);
    for (const auto& [z, zp] : pairs) {
      const std::string tag = "alpha=" + fmt("%g", a) + " (" + fmtz(z) + ", " + fmtz(zp) + ")";
      const KernelValue v = evaluate_C(z, zp, d, quadrature());
      r.require(v.converged, tag + " converged, est_abs_err " + fmt("%.2e", v.est_abs_err));

      const cplx o = evaluate_C_oracle(z, zp, d, v.params, 1e-4);
      const double rel = std::abs(o - v.value) / std::abs(v.value);
      r.require(rel <= 1e-4, tag + " oracle relative gap " + fmt("%.2e", rel));

      const KernelValue sw = evaluate_C(zp, z, d, quadrature());
      r.require(std::abs(sw.value - v.value) <= v.est_abs_err + sw.est_abs_err,
                tag + " symmetry gap " + fmt("%.2e", std::abs(sw.value - v.value)));

      const KernelValue cj = evaluate_C(std::conj(z), std::conj(zp), d, quadrature());
      r.require(std::abs(cj.value - std::conj(v.value)) <= v.est_abs_err + cj.est_abs_err,
                tag + " conjugation gap " + fmt("%.2e", std::abs(cj.value - std::conj(v.value))));

      QuadratureParams doubled = quadrature();
      doubled.T_max = 2.0 * v.params.T_max;
      doubled.panels_per_decade = 2 * doubled.panels_per_decade;
      const KernelValue w = evaluate_C(z, zp, d, doubled);
      r.require(std::abs(w.value - v.value) <= v.est_abs_err + w.est_abs_err,
                tag + " doubling gap " + fmt("%.2e", std::abs(w.value - v.value)));
    }
  }
  return r;
}

// 4. Variance scaling exponent at z = 1+i.
Result scaling_law() {
  Result r;
  std::vector<double> slopes;
  for (double a : {2.5, 3.0, 3.5}) {
    RunPlan plan;
    plan.alpha = a;
    plan.N_list = {128, 256, 512, 1024};
    plan.replicates_per_N = 400;
    plan.z_grid = {{1.0, 1.0}};
    plan.master_seed = kSeed;
    plan.threads = worker_count();
    const TraceTable table = run_ensemble(plan);
    const ScalingRow row = scaling_row(table, plan, 0, Tolerances{});
    slopes.push_back(row.slope);
    const double target = 2.0 - a / 2.0;
    r.require(std::abs(row.slope - target) <= 0.15, "alpha=" + fmt("%g", a) + " slope " + fmt("%.4f", row.slope) +
                                                        " +- " + fmt("%.4f", row.stderr_) + ", target " +
                                                        fmt("%.2f", target));
  }
  r.require(slopes[0] > slopes[1] && slopes[1] > slopes[2], "slopes decrease with alpha");
  return r;
}

// Shared by 5 and 6: alpha = 3, M = 2000 replicates at N = 256 and 1024.
struct CovarianceRuns {
  std::map<std::int64_t, std::vector<std::vector<cplx>>> rows;
  std::vector<cplx> grid = {{1.0, 1.0}, {0.0, 2.0}};
};

const CovarianceRuns& covariance_runs() {
  static const CovarianceRuns runs = [] {
    CovarianceRuns c;
    for (std::int64_t n : {256, 1024}) {
      RunPlan plan;
      plan.alpha = 3.0;
      plan.N_list = {n};
      plan.replicates_per_N = 2000;
      plan.z_grid = c.grid;
      plan.master_seed = kSeed + 1;
      plan.threads = worker_count();
      c.rows[n] = run_ensemble(plan).at(n);
    }
    return c;
  }();
  return runs;
}

// 5. Gaussian fluctuations of Tr G(1+i).
Result gaussianity() {
  Result r;
  const auto t = traces_at(covariance_runs().rows.at(1024), 0);
  for (const auto& row : normality_rows(t, {1.0, 1.0}, 1024, 3.0, Tolerances{})) {
    const auto& s = row.stats;
    r.require(std::abs(s.skewness_z) < 5.0, row.component + " skewness z-score " + fmt("%.3f", s.skewness_z));
    r.require(s.cdf_distance < 0.06, row.component + " normal cdf distance " + fmt("%.4f", s.cdf_distance));
    r.notes.push_back("     " + row.component + " excess kurtosis z-score " + fmt("%.3f", s.excess_kurtosis_z));
  }
  return r;
}

// 6. Empirical covariance against the kernel at (2i, 1+i).
Result covariance_match() {
  Result r;
  const cplx z{0.0, 2.0}, zp{1.0, 1.0};
  const KernelValue k = evaluate_C(z, zp, calibrate(3.0), quadrature());
  r.notes.push_back("     kernel C(2i, 1+i) = " + fmt("%.6f", k.value.real()) + " " + fmt("%+.6f", k.value.imag()) +
                    "i, est_abs_err " + fmt("%.1e", k.est_abs_err));
  std::map<std::int64_t, double> rel;
  for (std::int64_t n : {256, 1024}) {
    const auto& rows = covariance_runs().rows.at(n);
    const cplx e = empirical_covariance(traces_at(rows, 1), traces_at(rows, 0), n, 3.0);
    rel[n] = std::abs(e - k.value) / std::abs(k.value);
    r.notes.push_back("     N=" + std::to_string(n) + " empirical " + fmt("%.6f", e.real()) + " " +
                      fmt("%+.6f", e.imag()) + "i, relative gap " + fmt("%.4f", rel[n]));
  }
  r.require(rel[1024] <= 0.30, "relative gap at N=1024 " + fmt("%.4f", rel[1024]) + " <= 0.30");
  r.require(rel[1024] < rel[256], "gap shrinks: N=256 " + fmt("%.4f", rel[256]) + " -> N=1024 " +
                                      fmt("%.4f", rel[1024]));
  return r;
}

// 7. Diagonal concentration, quadratic-form bounds and exceedance counts.
Result concentration() {
  Result r;
  const auto dc = diag_concentration_check(base_config(3.0, EntryMode::truncated), {128, 256, 512, 1024}, 50,
                                           {0.0, 2.0}, worker_count());
  std::string devs;
  for (const auto& [n, v] : dc.mean_max_dev) devs += " N=" + std::to_string(n) + ":" + fmt("%.4f", v);
  r.require(dc.strictly_decreasing, "mean max |G_jj - g_sc| strictly decreasing:" + devs);

  for (double a : {2.5, 3.0, 3.5}) {
    const auto q = quadratic_form_check(calibrate(a), 200, {0.3, 0.7}, 0.01, 2000, kSeed);
    const std::string tag = "alpha=" + fmt("%g", a);
    r.require(q.pass_X, tag + " E|X|^2 " + fmt("%.3e", q.stats.EX2_hat) + " vs bound " + fmt("%.3e", q.stats.boundX));
    r.require(q.pass_E, tag + " E|E|^2 " + fmt("%.3e", q.stats.EE2_hat) + " vs bound " + fmt("%.3e", q.stats.boundE));
  }

  for (double a : {2.5, 3.0, 3.5}) {
    EnsembleConfig cfg = base_config(a, EntryMode::truncated);
    cfg.N = 256;
    const auto e = exceedance_check(cfg, 200);
    r.require(e.pass, "alpha=" + fmt("%g", a) + " exceedances per matrix " + fmt("%.3f", e.mean_observed) +
                          ", predicted " + fmt("%.3f", e.expected));
  }
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"exact identities", exact_identities},   {"branch and transform", branch_and_transform},
      {"kernel correctness", kernel_correctness}, {"variance scaling", scaling_law},
      {"gaussianity", gaussianity},             {"covariance match", covariance_match},
      {"concentration", concentration},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  std::FILE* report = std::fopen("acceptance_report.txt", "w");
  auto emit = [&](const std::string& line) {
    std::printf("%s\n", line.c_str());
    if (report) std::fprintf(report, "%s\n", line.c_str());
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& n : r.notes) emit("    " + n);
    emit(std::string(r.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(id) + " (" + criteria[i].first +
         ") [" + fmt("%.1f", secs) + " s]");
    std::fflush(stdout);
    if (report) std::fflush(report);
    if (!r.pass) ++failed;
  }
  if (report) std::fclose(report);
  return failed == 0 ? 0 : 1;
}
