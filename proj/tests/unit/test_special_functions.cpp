#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "lft/oracles.hpp"
#include "lft/special_functions.hpp"

using namespace lft;
using std::numbers::pi;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = a + (b - a) * i / (n - 1);
  return x;
}

}  // namespace

TEST_SUITE("special_functions") {
  TEST_CASE("ln_gamma at simple points") {
    CHECK(std::abs(ln_gamma(1.0)) < 1e-14);
    CHECK(std::abs(ln_gamma(0.5) - std::log(std::sqrt(pi))) < 1e-14);
    CHECK(std::abs(ln_gamma(5.0) - std::log(24.0)) < 1e-13);
    const std::complex<double> z(0.3, 4.0);
    // Gamma(z+1) = z Gamma(z)
    CHECK(std::abs(std::exp(ln_gamma(z + 1.0) - ln_gamma(z)) - z) < 1e-12);
    CHECK_THROWS_AS(ln_gamma(-3.0), DomainError);
    CHECK_THROWS_AS(ln_gamma(0.0), DomainError);
  }

  TEST_CASE("gamma_ratio vanishes on a denominator pole") {
    CHECK(gamma_ratio(2.5, -2.0) == std::complex<double>(0, 0));
    CHECK(std::abs(gamma_ratio(5.0, 3.0) - 12.0) < 1e-12);
  }

  TEST_CASE("regularized 1F1 closed forms") {
    CHECK(regularized_1f1(0.7, 2.5, 0.0) == doctest::Approx(1 / std::tgamma(2.5)).epsilon(1e-14));
    for (double x : {-3.0, 0.2, 4.0}) CHECK(regularized_1f1(1, 1, x) == doctest::Approx(std::exp(x)).epsilon(1e-13));
  }

  TEST_CASE("regularized 1F1 at nonpositive integer b") {
    // 60-digit limits b -> -n of 1F1(a;b;x)/Gamma(b)
    CHECK(regularized_1f1(0.3, -2, 1.7) == doctest::Approx(3.0984435060076937472).epsilon(1e-12));
    CHECK(regularized_1f1(-1.5, -3, 0.4) == doctest::Approx(7.352875159558375145e-4).epsilon(1e-11));
    CHECK(regularized_1f1(2.2, 0, 3.0) == doctest::Approx(391.27545317576574723).epsilon(1e-12));
  }

  TEST_CASE("regularized 1F1 is continuous in b") {
    const double at = regularized_1f1(0.3, -2, 1.7);
    for (double db : {-1e-9, 1e-9}) CHECK(std::abs(regularized_1f1(0.3, -2 + db, 1.7) - at) < 1e-8 * std::abs(at));
  }

  TEST_CASE("regularized 1F1 overflow is reported in scaled form") {
    try {
      regularized_1f1(1, 1, 800);
      FAIL("no overflow reported");
    } catch (const ScaledOverflow& e) {
      CHECK(e.log_abs() == doctest::Approx(800).epsilon(1e-12));
      CHECK(e.sign() == 1);
    }
  }

  TEST_CASE("spherical pair Wronskian and small-r behaviour") {
    const auto grid = linspace(0.01, 60, 600);
    for (double e : {-0.02, -0.005, 0.003, 0.02})
      for (int ell : {0, 1, 3, 6}) {
        const CoulombPair p = coulomb_pair_spherical(e, ell, grid);
        double drift = 0;
        for (std::size_t i = 0; i < p.size(); ++i) drift = std::max(drift, std::abs(p.wronskian(i) * pi / 2 - 1));
        INFO("E=" << e << " l=" << ell);
        CHECK(drift < 1e-8);
      }
    const std::vector<double> small{1e-4, 2e-4};
    const CoulombPair p = coulomb_pair_spherical(-0.01, 2, small);
    CHECK(p.f_deriv[0] / p.f_vals[0] * small[0] == doctest::Approx(3).epsilon(1e-3));
    const std::vector<double> bad{0.0, 1.0};
    CHECK_THROWS_AS(coulomb_pair_spherical(-0.01, 2, bad), DomainError);
    CHECK_THROWS_AS(coulomb_pair_spherical(0.0, 2, grid), DomainError);
  }

  TEST_CASE("integer nu, l = n-1 gives the circular hydrogen function") {
    const int n = 5;
    const auto grid = linspace(0.5, 40, 80);
    const CoulombPair p = coulomb_pair_spherical(-0.5 / (n * n), n - 1, grid);
    const double c0 = p.f_vals[0] / (grid[0] * oracle::hydrogen_radial(n, n - 1, grid[0]));
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK(p.f_vals[i] / (grid[i] * oracle::hydrogen_radial(n, n - 1, grid[i])) == doctest::Approx(c0).epsilon(1e-9));
  }

  TEST_CASE("half-integer pair") {
    const double ebar = -0.1;  // nubar > lambda keeps A(nubar, lambda) positive
    const auto grid = linspace(0.05, 12, 300);
    for (double lambda : {-0.5, 0.0, 0.5, 1.5}) {
      const CoulombPair p = coulomb_pair_half_integer(ebar, lambda, grid);
      double drift = 0;
      // frozen Wronskian of the smooth pair
      for (std::size_t i = 0; i < p.size(); ++i) drift = std::max(drift, std::abs(p.wronskian(i) * pi - 1));
      INFO("lambda=" << lambda);
      CHECK(drift < 1e-8);
    }
    const double z = 1e-4;
    const PairValue v = smooth_pair_value(ebar, 0.5, z);
    CHECK(v.fp / v.f * z == doctest::Approx(1.5).epsilon(1e-3));
    for (double zeta : {0.3, 2.0, 7.5}) {
      const PairValue a = smooth_pair_value(ebar, 0.5, zeta);
      const oracle::HPPair o = oracle::hp_irregular_extrapolated(ebar, 0.5, zeta);
      CHECK(std::abs(a.g - o.g) < 1e-6 * std::max(1.0, std::abs(o.g)));
      CHECK(std::abs(a.f - o.f) < 1e-10 * std::max(1.0, std::abs(o.f)));
    }
    CHECK_THROWS_AS(coulomb_pair_half_integer(0.1, 0.5, grid), DomainError);
  }

  TEST_CASE("general-lambda branch covers non-half-integer lambda") {
    const PairValue a = smooth_pair_general(-0.4, 0.3, 1.2);
    const PairValue b = smooth_pair_value(-0.4, 0.3, 1.2);
    CHECK(a.f == doctest::Approx(b.f).epsilon(1e-12));
    CHECK(a.g == doctest::Approx(b.g).epsilon(1e-10));
    CHECK(a.wronskian() * pi == doctest::Approx(1).epsilon(1e-9));
  }
}
