#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "lft/frame_transform.hpp"
#include "lft/oracles.hpp"
#include "lft/units.hpp"

using namespace lft;
using std::numbers::pi;

namespace {

LFTMatrix random_matrix(int rows, int cols, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  LFTMatrix U;
  U.m = 1;
  U.U.resize(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) U.U(i, j) = u(gen);
  return U;
}

}  // namespace

TEST_SUITE("frame_transform") {
  TEST_CASE("nu continuation") {
    CHECK(lft_nu(-0.5 / 400).real() == doctest::Approx(20).epsilon(1e-14));
    CHECK(lft_nu(0.02).real() == 0);
    CHECK(lft_nu(0.02).imag() == doctest::Approx(5).epsilon(1e-14));
    CHECK_THROWS_AS(lft_nu(0.0), DomainError);
  }

  TEST_CASE("angular factor against zero-field overlaps") {
    // n = 6 bound states: the frame transformation times the amplitude ratio is the overlap
    const int n = 6, m = 1;
    for (auto [n1, ell] : {std::pair{0, 1}, std::pair{2, 3}, std::pair{4, 5}, std::pair{1, 2}}) {
      const auto ov = oracle::zero_field_overlap(n, n1, m, ell);
      const double beta = (n1 + 0.5 * (m + 1)) / n;
      const double u = ov.amplitude_ratio * lft_angular_factor(beta, ell, m, {double(n), 0}).real();
      INFO("n1=" << n1 << " l=" << ell);
      CHECK(std::abs(u - ov.overlap) < 1e-8);
    }
    CHECK_THROWS_AS(lft_angular_factor(0.3, 0, 1, {5.0, 0}), std::out_of_range);
  }

  TEST_CASE("continued factor is real above threshold") {
    ProblemSpec s;
    s.energy = units::cm_to_hartree(135.8231);
    s.field = units::vcm_to_au(640);
    s.m = 1;
    const auto xi = solve_xi_channels(s, 90);
    const std::vector<double> log_eta(xi.size(), 0.0);
    const LFTMatrix U = lft_matrix(s, xi, log_eta, 6);
    CHECK(U.max_imag_residue < 1e-10);
    CHECK(U.ell_min() == 1);
    CHECK(U.ell_max() == 6);
    CHECK(U.U.allFinite());
    CHECK_THROWS_AS(U.column(0), std::out_of_range);
    CHECK_THROWS_AS(lft_matrix(s, xi, log_eta, 0), std::out_of_range);

    // N_xi and N_eta are fitted scalars, so resampling the tabulated grids leaves U alone
    XiOptions coarse;
    coarse.grid_points = 300;
    const auto xi2 = solve_xi_channels(s, 90, 0, coarse);
    const LFTMatrix U2 = lft_matrix(s, xi2, log_eta, 6);
    CHECK((U.U - U2.U).cwiseAbs().maxCoeff() < 1e-14 * U.U.cwiseAbs().maxCoeff());
  }

  TEST_CASE("pseudo-inverse round trip") {
    const LFTMatrix U = random_matrix(30, 6, 7);
    double residual = 1;
    const Eigen::MatrixXd X = inverse_transpose(U, 1e12, &residual);
    CHECK(residual < 1e-8);
    CHECK((U.U.transpose() * X - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-8);

    // a single l maps onto one column of the inverse
    Eigen::VectorXd a = Eigen::VectorXd::Zero(6);
    a(2) = 1;
    const ParabolicExpansion p = map_regular_to_parabolic(U, a);
    CHECK((p.coefficients - X.col(2)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((U.U.transpose() * p.coefficients - a).cwiseAbs().maxCoeff() < 1e-10);

    LFTMatrix bad = U;
    bad.U.col(3) = bad.U.col(1);
    CHECK_THROWS_AS(inverse_transpose(bad), IllConditionedMapping);
    CHECK_THROWS_AS(map_regular_to_parabolic(U, Eigen::VectorXd::Zero(4)), std::invalid_argument);
  }

  TEST_CASE("parabolic regular function from its spherical expansion") {
    ProblemSpec s;
    s.energy = units::cm_to_hartree(135.8231);
    s.field = units::vcm_to_au(640);
    s.m = 1;
    const auto all = solve_xi_channels(s, 70);
    std::vector<XiChannel> xi;
    std::vector<EtaSolutionPair> eta;
    std::vector<double> log_eta;
    for (int n1 : {40, 55, 70}) {
      xi.push_back(all[n1]);
      eta.push_back(solve_eta_channel({s.energy, s.field, all[n1].beta, 1}, n1));
      log_eta.push_back(eta.back().log_n_eta());
    }
    const int ell_max = 24;
    const LFTMatrix U = lft_matrix(s, xi, log_eta, ell_max);
    std::vector<CoulombPoint> pts;
    for (double r : {5.0, 12.0, 25.0, 40.0, 49.0})
      for (double th : {0.4, 1.3, 2.2, 2.9}) pts.push_back({r, th});
    std::vector<std::vector<SphericalValue>> sph;
    for (int ell = 1; ell <= ell_max; ++ell) sph.push_back(spherical_pair_values(s.energy, ell, 1, pts));
    for (std::size_t c = 0; c < xi.size(); ++c) {
      double worst = 0, scale = 0;
      for (std::size_t p = 0; p < pts.size(); ++p) {
        double sum = 0;
        for (int ell = 1; ell <= ell_max; ++ell) sum += U.U(c, ell - 1) * sph[ell - 1][p].f;
        const double direct = parabolic_regular(xi[c], eta[c], pts[p]);
        worst = std::max(worst, std::abs(sum - direct));
        scale = std::max(scale, std::abs(direct));
      }
      INFO("n1=" << xi[c].n1);
      CHECK(worst < 0.01 * scale);
    }
  }

  TEST_CASE("phase uniformity bound") {
    const double F = units::vcm_to_au(1000);
    const PhaseBound b = phase_uniformity_bound(F, 50, 0);
    CHECK(std::abs(b.value) < 1e-3);
    CHECK(b.valid);
    CHECK(std::abs(phase_uniformity_bound(F, 50, pi / 2).value) < 1e-18);
    CHECK(phase_uniformity_bound(2 * F, 50, 0.3).value == doctest::Approx(2 * phase_uniformity_bound(F, 50, 0.3).value));
    CHECK_FALSE(phase_uniformity_bound(F, 1e4, 0).valid);
  }
}
