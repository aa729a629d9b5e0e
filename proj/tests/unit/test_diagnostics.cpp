#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "halfheavy/diagnostics.hpp"
#include "halfheavy/heavytail.hpp"

using namespace halfheavy;

namespace {

EnsembleConfig base_config(double alpha, EntryMode mode, std::uint64_t seed) {
  EnsembleConfig c;
  c.N = 64;
  c.dist = calibrate(alpha);
  c.mode = mode;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("leave-one-out identity holds on random triples") {
  for (auto cls : {SymmetryClass::real, SymmetryClass::complex}) {
    auto base = base_config(2.6, EntryMode::raw, 21);
    base.symmetry_class = cls;
    const auto s = leave_one_out_suite(base, 30, 60, 5);
    CHECK(s.triples == 30);
    CHECK(s.max_rel_residual < 1e-8);
    CHECK(s.all_bound_ok);
    CHECK(s.all_sign_ok);
  }
  CHECK_THROWS_AS(leave_one_out_suite(base_config(3.0, EntryMode::raw, 1), 0, 60, 5), InputError);
  CHECK_THROWS_AS(leave_one_out_suite(base_config(3.0, EntryMode::raw, 1), 5, 7, 5), InputError);
}

TEST_CASE("branch suite residuals") {
  const auto b = branch_suite(20);
  CHECK(b.max_quadratic_residual < 1e-12);
  CHECK(b.max_fixed_point_residual < 1e-12);
  CHECK(b.min_re_K > 0.0);
  CHECK_THROWS_AS(branch_suite(1), InputError);
}

TEST_CASE("scaled expansion gaps shrink with N") {
  const auto d = calibrate(3.0);
  const auto g = phi_expansion_gaps(d, {0.0, -1.0}, {100, 1000, 10000, 100000});
  REQUIRE(g.scaled_gap.size() == 4);
  CHECK(g.decreasing);
  const auto single = phi_expansion_gaps(d, {0.0, -1.0}, {100});
  CHECK_FALSE(single.decreasing);
}

TEST_CASE("quadratic form moments match their closed forms") {
  // For a symmetric G and i.i.d. centred entries with E a^2 = 1/N:
  //   E|X|^2 = (2/N^2) sum_{i != j} |G_ij|^2
  //   E|E|^2 = (sum_i |G_ii|^2 / N^2) (m4 / sigma^4 - 1)
  const auto d = calibrate(3.0);
  const std::int64_t n = 40;
  const double eps = 0.01;
  auto cfg = base_config(3.0, EntryMode::truncated, 3);
  cfg.N = n;
  const Eigen::MatrixXcd a = build_matrix(cfg, 0).as_complex();
  Eigen::MatrixXcd shifted = -a;
  shifted.diagonal().array() += cplx{0.3, 0.7};
  const Eigen::MatrixXcd G = shifted.partialPivLu().inverse();

  std::mt19937_64 rng(77);
  const auto st = quadratic_form_stats(G, d, eps, 40000, rng);

  const double nd = static_cast<double>(n);
  double off = 0.0, diag = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) (i == j ? diag : off) += std::norm(G(i, j));
  }
  const double ex2 = 2.0 * off / (nd * nd);
  CHECK(std::abs(st.EX2_hat - ex2) < 4.0 * st.X_stderr);
  CHECK(ex2 <= st.boundX);

  const auto tp = truncation_params(d, n, eps);
  const double T = tp.cutoff();
  const double k = d.alpha * std::pow(d.t0, d.alpha);
  const double m4 = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double x) { return k * std::pow(x, 3.0 - d.alpha); }, d.t0, T, 10, 1e-13);
  const double s2 = tp.sigmaN * tp.sigmaN;
  const double ee2 = diag / (nd * nd) * (m4 / (s2 * s2) - 1.0);
  CHECK(std::abs(st.EE2_hat - ee2) < 4.0 * st.E_stderr);

  CHECK_THROWS_AS(quadratic_form_stats(G, d, eps, 1, rng), InputError);
  CHECK_THROWS_AS(quadratic_form_stats(Eigen::MatrixXcd(3, 2), d, eps, 10, rng), InputError);
}

TEST_CASE("quadratic form check stays under its bounds") {
  const auto q = quadratic_form_check(calibrate(3.0), 100, {0.3, 0.7}, 0.01, 1000, 4);
  CHECK(q.N == 100);
  CHECK(q.pass_X);
  CHECK(q.pass_E);
}

TEST_CASE("diagonal concentration decreases with N") {
  const auto base = base_config(3.0, EntryMode::truncated, 8);
  const auto c = diag_concentration_check(base, {64, 128, 256}, 12, {0.0, 2.0}, 2);
  CHECK(c.mean_max_dev.size() == 3);
  CHECK(c.strictly_decreasing);
  const auto again = diag_concentration_check(base, {64, 128, 256}, 12, {0.0, 2.0}, 1);
  CHECK(again.mean_max_dev == c.mean_max_dev);
  CHECK_THROWS_AS(diag_concentration_check(base, {64}, 0, {0.0, 2.0}, 1), InputError);
}

TEST_CASE("exceedance count near its expectation") {
  auto base = base_config(2.5, EntryMode::raw, 12);
  base.N = 128;
  const auto e = exceedance_check(base, 100);
  CHECK(e.expected > 0.0);
  CHECK(e.pass);
  CHECK_THROWS_AS(exceedance_check(base, 0), InputError);
}
