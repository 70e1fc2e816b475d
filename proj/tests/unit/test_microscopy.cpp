#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "lft/microscopy.hpp"
#include "lft/pipeline.hpp"
#include "lft/units.hpp"

using namespace lft;
using cplx = std::complex<double>;
using std::numbers::pi;

namespace {

const ChannelSet& hydrogen_set() {
  static const ChannelSet set = [] {
    ProblemSpec s;
    s.energy = units::cm_to_hartree(-62);
    s.field = units::vcm_to_au(3590);
    s.m = 1;
    for (int l = 0; l <= 6; ++l) s.defects[l] = 0;
    s.dipoles = {{1, 1.0}, {2, 0.5}};
    return build_channels(s, ChannelPolicy{});
  }();
  return set;
}

std::vector<cplx> unit_vector(std::size_t n, std::size_t i) {
  std::vector<cplx> d(n, 0.0);
  d[i] = 1;
  return d;
}

}  // namespace

TEST_SUITE("microscopy") {
  TEST_CASE("outgoing wave is linear in the amplitudes") {
    const ChannelSet& set = hydrogen_set();
    const OutgoingWave wave(set.xi, set.eta);
    const std::size_t n = wave.size();
    REQUIRE(n > 3);
    const std::vector<cplx> zero(n, 0.0);
    const OutgoingValue z = wave.evaluate(zero, 20.0, 5e5);
    CHECK(std::abs(z.psi) == 0);
    std::vector<cplx> d1(n), d2(n), sum(n);
    for (std::size_t i = 0; i < n; ++i) {
      d1[i] = cplx(std::sin(1.0 + i), 0.3 * i);
      d2[i] = cplx(0.2, std::cos(2.0 * i));
      sum[i] = d1[i] + d2[i];
    }
    for (auto [xi, eta] : {std::pair{5.0, 3e4}, std::pair{40.0, 7e6}}) {
      const cplx a = wave.evaluate(d1, xi, eta).psi, b = wave.evaluate(d2, xi, eta).psi;
      const cplx c = wave.evaluate(sum, xi, eta).psi;
      CHECK(std::abs(c - a - b) < 1e-12 * (std::abs(a) + std::abs(b)));
    }
    CHECK_THROWS_AS(wave.evaluate(d1, 2 * wave.xi_limit(), 1e6), ExtrapolationError);
  }

  TEST_CASE("single channel density follows the WKB amplitude") {
    const ChannelSet& set = hydrogen_set();
    const OutgoingWave wave(set.xi, set.eta);
    const std::size_t c = set.xi.size() / 2;
    const auto& p = set.eta[c].channel;
    double ref = 0;
    for (double xi : {3.0, 11.0, 27.0})
      for (double eta : {2e6, 9e6, 4e7}) {
        const cplx psi = wave.channel(c, xi, eta).psi;
        const double X = set.xi[c].Xi(xi).f;
        if (std::abs(X) < 1e-3) continue;
        const double k = local_momentum(eta, p).k;
        const double r = std::norm(psi) * xi * eta * k / (X * X);
        if (ref == 0) ref = r;
        CHECK(r == doctest::Approx(ref).epsilon(1e-4));
      }
    CHECK(ref == doctest::Approx(1 / (2 * pi * pi)).epsilon(1e-3));
  }

  TEST_CASE("flux scales with omega") {
    const ChannelSet& set = hydrogen_set();
    const OutgoingWave wave(set.xi, set.eta);
    const auto d = unit_vector(wave.size(), 1);
    const double z = units::mm_to_au(-1);
    const double f1 = flux_density(wave, d, 2e4, z, 0.1), f2 = flux_density(wave, d, 2e4, z, 0.2);
    CHECK(f2 == doctest::Approx(2 * f1).epsilon(1e-14));
    CHECK(f1 >= 0);
  }

  TEST_CASE("single open channel shows the nodes of Xi") {
    const ChannelSet& set = hydrogen_set();
    const OutgoingWave wave(set.xi, set.eta);
    const double z = units::mm_to_au(-1);
    for (std::size_t c : {std::size_t{0}, std::size_t{2}, std::size_t{5}}) {
      const auto d = unit_vector(wave.size(), c);
      const DetectorMap map = differential_cross_section(wave, d, z, default_rho_grid(set.xi, z), 0.1);
      const auto& s = map.dsigma_drho;
      const double peak = *std::max_element(s.begin(), s.end());
      // only inside the allowed xi range of this channel; xi = rho^2 / (r - z) on the detector plane
      const double xt = xi_turning_point(set.spec.energy, set.spec.field, set.xi[c].beta);
      int zeros = 0;
      for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        const double rho = map.rho_grid[i];
        const double xi = rho * rho / (std::hypot(rho, z) - z);
        if (xi < xt && s[i] < s[i - 1] && s[i] <= s[i + 1] && s[i] < 1e-3 * peak) ++zeros;
      }
      INFO("n1=" << set.xi[c].n1);
      CHECK(zeros == set.xi[c].n1);
    }
  }

  TEST_CASE("cross sections") {
    const std::vector<cplx> none(4, 0.0);
    CHECK(total_cross_section(none, 0.1) == 0);
    const std::vector<cplx> one{1.0};
    CHECK(total_cross_section(one, 0.1) == doctest::Approx(2 * 0.1 / units::speed_of_light));

    const ChannelSet& set = hydrogen_set();
    const OutgoingWave wave(set.xi, set.eta);
    const double z = units::mm_to_au(-1);
    std::vector<cplx> d(wave.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = cplx(1.0 / (1 + i), 0.1 * i);
    const auto grid = default_rho_grid(set.xi, z);
    const DetectorMap map = differential_cross_section(wave, d, z, grid, 0.1);
    CHECK_FALSE(map.coverage_warning);
    CHECK(map.integrated() / total_cross_section(d, 0.1) == doctest::Approx(1).epsilon(0.01));
    for (double v : map.dsigma_drho) CHECK(v >= 0);
    // m = 1: dsigma/drho ~ rho^3 at the axis, faster than the Jacobian alone
    const auto& s = map.dsigma_drho;
    CHECK(std::log(s[4] / s[2]) / std::log(grid[4] / grid[2]) > 2.5);
    CHECK(std::log(s[2] / s[1]) / std::log(grid[2] / grid[1]) > 2.5);

    const std::vector<double> half(grid.begin(), grid.begin() + grid.size() / 2);
    CHECK(differential_cross_section(wave, d, z, half, 0.1).coverage_warning);
  }
}
