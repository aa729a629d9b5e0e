#include <cmath>

#include "doctest.h"
#include "halfheavy/semicircle.hpp"

using namespace halfheavy;

TEST_CASE("g_sc root selection") {
  const cplx g = g_sc({0.0, 2.0});
  CHECK(std::abs(g - cplx{0.0, 1.0 - std::sqrt(2.0)}) < 1e-15);
  CHECK(g.imag() == doctest::Approx(-0.414214).epsilon(1e-6));

  const cplx z10{0.0, 10.0};
  const cplx g10 = g_sc(z10);
  CHECK(g10.imag() == doctest::Approx(-0.0990).epsilon(1e-3));
  CHECK(std::abs(g10 - 1.0 / z10) <= 0.02 * std::abs(1.0 / z10));
}

TEST_CASE("g_sc invariants over the plane") {
  for (double re = -5.0; re <= 5.0; re += 0.37) {
    for (double im : {1e-6, 1e-3, 0.05, 0.5, 1.0, 3.0, 40.0}) {
      for (double s : {1.0, -1.0}) {
        const cplx z{re, s * im};
        const cplx g = g_sc(z);
        CHECK(std::abs(g) < 1.0);
        CHECK(std::abs(g * g - z * g + 1.0) <= 1e-12);
        CHECK(std::abs(1.0 / (z - g) - g) <= 1e-12);
        CHECK(g.imag() * z.imag() < 0.0);
        CHECK(std::abs(g_sc(std::conj(z)) - std::conj(g)) == 0.0);
      }
    }
  }
}

TEST_CASE("g_sc rejects points on or near the real axis") {
  CHECK_THROWS_AS(g_sc({1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(g_sc({0.5, 1e-9}), DomainError);
  CHECK_THROWS_AS(g_sc_prime({0.5, 0.0}), DomainError);
}

TEST_CASE("g_sc_prime") {
  // G(z) = (z - sqrt(z^2 - 4))/2, so G'(2i) = (1 - 1/sqrt 2)/2.
  const cplx d = g_sc_prime({0.0, 2.0});
  CHECK(std::abs(d - cplx{(1.0 - 1.0 / std::sqrt(2.0)) / 2.0, 0.0}) < 1e-15);

  const cplx z{1.0, 1.0};
  const double h = 1e-5;
  const cplx fd = (g_sc(z + h) - g_sc(z - h)) / (2.0 * h);
  CHECK(std::abs(fd - g_sc_prime(z)) <= 1e-8);
  const cplx fd_im = (g_sc(z + cplx{0.0, h}) - g_sc(z - cplx{0.0, h})) / cplx{0.0, 2.0 * h};
  CHECK(std::abs(fd_im - g_sc_prime(z)) <= 1e-8);
  for (cplx w : {cplx{0.3, 0.7}, cplx{-2.5, 0.1}, cplx{4.0, -1.0}}) {
    CHECK(std::abs(g_sc_prime(std::conj(w)) - std::conj(g_sc_prime(w))) == 0.0);
  }
}

TEST_CASE("k_point") {
  const KPoint k = k_point({0.0, 2.0}, 1.0);
  CHECK(std::abs(k.K - cplx{std::sqrt(2.0) - 1.0, 0.0}) < 1e-15);
  CHECK(k.K.real() == doctest::Approx(0.414214).epsilon(1e-6));

  for (int a = 0; a < 20; ++a) {
    const cplx z{-4.0 + 0.4 * a, (a % 2 ? -1.0 : 1.0) * (0.01 + 0.15 * a)};
    const cplx ratio = k_point(z, 0.1).K / 0.1;
    for (int b = 0; b < 20; ++b) {
      const double t = std::pow(10.0, -6.0 + 0.45 * b);
      const KPoint p = k_point(z, t);
      CHECK(p.K.real() > 0.0);
      CHECK(std::abs(k_point(z, 2.0 * t).K - 2.0 * p.K) <= 1e-15 * std::abs(p.K) * 4.0);
    }
    for (double t : {1.0, 10.0}) CHECK(std::abs(k_point(z, t).K / t - ratio) <= 1e-15 * std::abs(ratio) * 4.0);
  }
  CHECK_THROWS_AS(k_point({0.0, 1.0}, 0.0), DomainError);
  CHECK_THROWS_AS(k_point({0.0, 1.0}, -1.0), DomainError);
  CHECK_THROWS_AS(k_point({1.0, 0.0}, 1.0), DomainError);
}
