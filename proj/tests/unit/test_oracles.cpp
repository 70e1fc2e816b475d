#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lft/config.hpp"
#include "lft/oracles.hpp"

using namespace lft;
using namespace lft::oracle;

TEST_SUITE("oracles") {
  TEST_CASE("Numerov free particle") {
    const double k = 1.3, h = 1e-3;
    OdeProblem p{[&](double) { return k * k; }, 0.0, h, 8000, 0.0, k};
    const OdeSolution s = numerov_integrate(p);
    double worst = 0;
    for (std::size_t i = 0; i < s.x.size(); ++i) worst = std::max(worst, std::abs(s.psi[i] - std::sin(k * s.x[i])));
    CHECK(worst < 1e-10);

    // inward from x = 8
    OdeProblem in{[&](double) { return k * k; }, 8.0, -h, 8000, std::sin(k * 8.0), k * std::cos(k * 8.0)};
    const OdeSolution t = numerov_integrate(in);
    CHECK(std::abs(t.psi.back() - 0.0) < 1e-10);

    OdeProblem coarse{[&](double) { return 1e4; }, 0.0, 0.01, 10, 0.0, 1.0};
    CHECK_THROWS_AS(numerov_integrate(coarse), AccuracyError);
  }

  TEST_CASE("Numerov is fourth order on the Coulomb problem") {
    // u'' + (2E + 2/r) u = 0 with E = -1/2, exact u = r e^{-r}
    auto run = [](double h) {
      const int steps = static_cast<int>(std::lround(5.0 / h));
      OdeProblem p{[](double r) { return -1.0 + 2.0 / r; }, 1.0, h, steps, std::exp(-1.0), 0.0};
      const OdeSolution s = numerov_integrate(p);
      return std::abs(s.psi.back() - 6.0 * std::exp(-6.0));
    };
    const double e1 = run(0.02), e2 = run(0.01), e3 = run(0.005);
    CHECK(std::log2(e1 / e2) == doctest::Approx(4).epsilon(0.05));
    CHECK(std::log2(e2 / e3) == doctest::Approx(4).epsilon(0.05));
  }

  TEST_CASE("shooting on the harmonic well") {
    auto V = [](double x) { return 0.5 * x * x; };
    for (int n : {0, 1, 5}) CHECK(std::abs(shooting_eigenvalue(V, -10, 10, 20000, n, 0, 10) - (n + 0.5)) < 1e-8);
  }

  TEST_CASE("bisection roots") {
    const auto r = bisection_roots([](double x) { return std::cos(x); }, 0, 10);
    REQUIRE(r.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(r[i] - (i + 0.5) * M_PI) < 1e-12);
  }

  TEST_CASE("50-digit linear algebra") {
    const HPMatrix I = HPMatrix::Identity(5, 5);
    CHECK((highprec_inverse(I) - I).cwiseAbs().maxCoeff() == 0);
    CHECK(hilbert_residual(8) < hp("1e-40"));

    std::mt19937 gen(5);
    std::uniform_real_distribution<double> u(-1, 1);
    Eigen::MatrixXd A(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) A(i, j) = u(gen);
    const Eigen::MatrixXd S = A + A.transpose();
    const auto ev = highprec_symmetric_eigenvalues(to_hp(S));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(static_cast<double>(ev[i]) - es.eigenvalues()(i)) < 1e-12);

    Eigen::MatrixXd sing = A;
    sing.row(2) = sing.row(4);
    try {
      highprec_inverse(to_hp(sing));
      FAIL("singular input accepted");
    } catch (const SingularMatrix& e) {
      CHECK(e.condition() > 1e40);
    }

    HPComplex c{to_hp(A), to_hp(S)};
    const HPComplex ci = highprec_complex_inverse(c);
    const HPMatrix re = c.re * ci.re - c.im * ci.im, im = c.re * ci.im + c.im * ci.re;
    CHECK((re - HPMatrix::Identity(6, 6)).cwiseAbs().maxCoeff() < hp("1e-40"));
    CHECK(im.cwiseAbs().maxCoeff() < hp("1e-40"));
  }

  TEST_CASE("hydrogen closed forms are normalized") {
    using boost::math::quadrature::gauss_kronrod;
    for (auto [n, l] : {std::pair{1, 0}, std::pair{4, 2}, std::pair{7, 6}}) {
      const double norm = gauss_kronrod<double, 61>::integrate(
          [&](double r) { return std::pow(hydrogen_radial(n, l, r) * r, 2); }, 0.0, 60.0 * n, 15, 1e-13);
      CHECK(norm == doctest::Approx(1).epsilon(1e-10));
    }
    // parabolic state: int |psi|^2 (xi + eta)/4 dxi deta dphi
    const int n = 3, n1 = 1, m = 1;
    const double norm = gauss_kronrod<double, 61>::integrate(
        [&](double xi) {
          return gauss_kronrod<double, 61>::integrate(
              [&](double eta) {
                const double v = hydrogen_parabolic(n, n1, m, xi, eta);
                return 2 * M_PI * v * v * (xi + eta) / 4;
              },
              0.0, 40.0 * n, 10, 1e-12);
        },
        0.0, 40.0 * n, 10, 1e-12);
    CHECK(norm == doctest::Approx(1).epsilon(1e-9));
  }

  TEST_CASE("sodium Rydberg levels from the default defects") {
    const auto levels = sodium_levels();
    CHECK(rydberg_self_check(default_config().defects, levels) < 0.01);
    std::map<int, double> off = default_config().defects;
    off[0] += 0.1;
    CHECK(rydberg_self_check(off, levels) > 0.01);
  }
}
