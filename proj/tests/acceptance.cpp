// Acceptance criteria; run with the criterion number (1-9) or "all".
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "lft/field_free.hpp"
#include "lft/frame_transform.hpp"
#include "lft/microscopy.hpp"
#include "lft/oracles.hpp"
#include "lft/pipeline.hpp"
#include "lft/scattering.hpp"
#include "lft/special_functions.hpp"
#include "lft/units.hpp"
#include "lft/xi_channels.hpp"

using namespace lft;
using std::numbers::pi;

namespace {

constexpr double kEps = 135.8231;  // cm^-1

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "  ok   " : "  FAIL ") + what);
  }
};

std::string num(double x) {
  char b[48];
  std::snprintf(b, sizeof b, "%.4g", x);
  return b;
}

ProblemSpec stark(double e_cm, double f_vcm, int m) {
  ProblemSpec s;
  s.energy = units::cm_to_hartree(e_cm);
  s.field = units::vcm_to_au(f_vcm);
  s.m = m;
  return s;
}

std::map<int, double> sodium_defects() {
  std::map<int, double> d{{0, 1.348}, {1, 0.855}, {2, 0.0159}, {3, 0.0016}};
  for (int l = 4; l <= 8; ++l) d[l] = 0;
  return d;
}

std::map<int, double> sodium_dipoles(int m) {
  if (m == 0) return {{0, std::sqrt(1.0 / 3)}, {2, std::sqrt(4.0 / 15)}};
  return {{2, std::sqrt(3.0 / 15)}};
}

std::vector<CoulombPoint> recon_points() {
  std::vector<CoulombPoint> pts;
  for (int i = 0; i <= 70; ++i) pts.push_back({10.0 + i, 5 * pi / 6});
  return pts;
}

double max_over(const IrregularReconstruction& r, const std::vector<CoulombPoint>& pts, double lo, double hi) {
  double m = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (pts[i].r >= lo && pts[i].r <= hi) m = std::max(m, r.rel_err[i]);
  return m;
}

// 1. U support and node structure at eps = +135.8231 cm^-1, F = 640 V/cm, m = 1.
Outcome criterion1() {
  Outcome o;
  ChannelPolicy pol;
  pol.n1_total = 120;
  const ChannelSet set = build_channels(stark(kEps, 640, 1), pol);
  const std::map<int, int> expected_nodes{{1, 0}, {2, 1}, {3, 2}, {6, 5}};
  for (const auto& [ell, nodes] : expected_nodes) {
    const Eigen::VectorXd c = set.U.column(ell);
    const double mx = c.cwiseAbs().maxCoeff();
    double outside = 0, beta_outside = 0;
    int worst = -1;
    int count = 0;
    double prev = 0;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      const int n1 = set.U.n1[static_cast<std::size_t>(i)];
      const double beta = set.U.beta[static_cast<std::size_t>(i)];
      const double rel = std::abs(c(i)) / mx;
      if ((n1 <= 38 - 5 || n1 >= 79 + 5) && rel > outside) {
        outside = rel;
        worst = n1;
      }
      if ((beta < -0.2 || beta > 1.2)) beta_outside = std::max(beta_outside, rel);
      if (rel > 1e-3) {
        if (prev * c(i) < 0) ++count;
        prev = c(i);
      }
    }
    o.check(count == nodes, "l=" + std::to_string(ell) + " nodes " + std::to_string(count) + " (expected " +
                                std::to_string(nodes) + ")");
    o.check(outside < 1e-3, "l=" + std::to_string(ell) + " max |U|/max outside n1 in [34,83]: " + num(outside) +
                                " at n1=" + std::to_string(worst));
    o.notes.push_back("       l=" + std::to_string(ell) + " max |U|/max for beta outside (-0.2,1.2): " +
                      num(beta_outside));
  }
  return o;
}

// 2. Irregular reconstruction above threshold.
Outcome criterion2() {
  Outcome o;
  const ProblemSpec spec = stark(kEps, 640, 1);
  const auto pts = recon_points();
  const auto xi100 = solve_xi_channels(spec, 99);
  for (int ell : {1, 2, 3}) {
    const auto r = reconstruct_irregular_spherical(spec, xi100, {}, ell, pts);
    const double e = max_over(r, pts, 10, 80);
    o.check(e < 0.02, "l=" + std::to_string(ell) + " n1_tot=100 max rel err " + num(e));
  }
  std::vector<double> res;
  double low_r = 0;
  for (int ntot : {60, 100, 230}) {
    const auto xi = solve_xi_channels(spec, ntot - 1);
    const auto r = reconstruct_irregular_spherical(spec, xi, {}, 6, pts);
    res.push_back(max_over(r, pts, 10, 80));
    if (ntot == 230) low_r = max_over(r, pts, 10, 20);
    o.notes.push_back("       l=6 n1_tot=" + std::to_string(ntot) + " max rel err " + num(res.back()) +
                      ", r<=20: " + num(max_over(r, pts, 10, 20)));
  }
  o.check(res[0] > res[1] && res[1] > res[2], "l=6 residual strictly decreasing over n1_tot 60,100,230");
  o.check(low_r < 0.02, "l=6 n1_tot=230 reproduces g for r<20 (max rel err " + num(low_r) + ")");
  return o;
}

// 3. Below threshold with the 25 channels of beta < 1.
Outcome criterion3() {
  Outcome o;
  const ProblemSpec spec = stark(-kEps, 640, 1);
  auto xi = solve_xi_channels(spec, 40);
  std::erase_if(xi, [](const XiChannel& c) { return !(c.beta < 1); });
  o.check(xi.size() == 25, "channels with beta < 1: " + std::to_string(xi.size()));
  const auto pts = recon_points();
  for (int ell : {1, 2, 3}) {
    const auto r = reconstruct_irregular_spherical(spec, xi, {}, ell, pts);
    const double e = max_over(r, pts, 10, 80);
    o.check(e < 0.02, "l=" + std::to_string(ell) + " max rel err " + num(e));
  }
  const auto r6 = reconstruct_irregular_spherical(spec, xi, {}, 6, pts);
  const double far = max_over(r6, pts, 20.5, 80), near = max_over(r6, pts, 10, 20);
  o.check(far > 0.02, "l=6 discrepancy beyond r=20 present (max rel err " + num(far) + ", r<=20: " + num(near) + ")");
  return o;
}

// 4. Wronskians, R/S algebra and gamma above the barrier.
Outcome criterion4() {
  Outcome o;
  for (double sign : {1.0, -1.0}) {
    ProblemSpec spec = stark(sign * kEps, 640, 1);
    spec.defects = sodium_defects();
    spec.dipoles = sodium_dipoles(1);
    ChannelPolicy pol;
    pol.n1_total = sign > 0 ? 100 : 40;  // below threshold only beta < 1 survives
    const ChannelSet set = build_channels(spec, pol);
    double w_raw = 0, w_ren = 0, g_dev = 0;
    int above = 0;
    for (const auto& p : set.eta) {
      for (double x : p.eta_grid) {
        w_raw = std::max(w_raw, std::abs(p.raw_wronskian_at(x) * pi / 2 - 1));
        w_ren = std::max(w_ren, std::abs(p.wronskian_at(x) / ((2 / pi) * p.sin_gamma) - 1));
      }
      if (sign > 0 && p.barrier == BarrierClass::above_barrier) {
        g_dev = std::max(g_dev, std::abs(p.gamma - pi / 2));
        ++above;
      }
    }
    const std::string tag = sign > 0 ? " eps>0 (" : " eps<0 (";
    const std::string nch = std::to_string(set.eta.size()) + " channels)";
    o.check(w_raw < 1e-6, "W = 2/pi" + tag + nch + ": " + num(w_raw));
    o.check(w_ren < 1e-6, "W = (2/pi) sin(gamma)" + tag + nch + ": " + num(w_ren));
    const ScatteringSet sc = assemble_scattering(set.U, spec.defects, spec.dipoles, set.cot_gamma);
    o.check(sc.symmetry_error < 1e-10, "R symmetry" + tag.substr(0, tag.size() - 2) + ": " + num(sc.symmetry_error));
    o.check(sc.unitarity_error < 1e-10, "S unitarity" + tag.substr(0, tag.size() - 2) + ": " + num(sc.unitarity_error));
    o.check(sc.form_difference < 1e-10, "S two forms" + tag.substr(0, tag.size() - 2) + ": " + num(sc.form_difference));
    if (sign > 0)
      o.check(above > 0 && g_dev < 1e-3,
              "gamma = pi/2 on " + std::to_string(above) + " above-barrier channels: max dev " + num(g_dev));
  }
  return o;
}

// 5. Numerov and F = 0 overlap cross-checks.
Outcome criterion5() {
  Outcome o;
  std::mt19937 rng(20240607);
  std::uniform_real_distribution<double> ue(50, 150), uf(500, 4000), ub(0.1, 0.9);
  std::bernoulli_distribution coin(0.5);
  double worst = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const double e_cm = (coin(rng) ? 1 : -1) * ue(rng);
    const double f = uf(rng), beta = ub(rng);
    const int m = coin(rng) ? 1 : 0;
    const EtaChannelParams p{units::cm_to_hartree(e_cm), units::vcm_to_au(f), beta, m};
    const EtaSolutionPair pair = solve_eta_channel(p);
    const double end = std::min(pair.eta2, 300.0);
    oracle::OdeProblem pr;
    pr.q = [&p](double x) {
      return p.energy / 2 + (1.0 - p.m * p.m) / (4 * x * x) + (1 - p.beta) / x + p.field * x / 4;
    };
    pr.x0 = pair.eta1;
    pr.h = 2e-4;
    pr.steps = static_cast<int>(std::ceil((end - pr.x0) / pr.h));
    pr.h = (end - pr.x0) / pr.steps;
    pr.psi0 = pair.boundary.f;
    pr.dpsi0 = pair.boundary.fp;
    const auto sol = oracle::numerov_integrate(pr);
    double scale = 0, err = 0;
    for (std::size_t i = 0; i < sol.x.size(); i += 25) {
      scale = std::max(scale, std::abs(sol.psi[i]));
      err = std::max(err, std::abs(pair.raw_at(sol.x[i]).f - sol.psi[i]));
    }
    worst = std::max(worst, err / scale);
    o.notes.push_back("       eps=" + num(e_cm) + " F=" + num(f) + " beta=" + num(beta) + " m=" + std::to_string(m) +
                      ": " + num(err / scale));
  }
  o.check(worst < 1e-6, "R-matrix vs Numerov, 10 random channels: max " + num(worst));

  const int n = 8, m = 1;
  double worst_u = 0;
  const std::complex<double> nu(n, 0);
  for (int n1 = 0; n1 + m + 1 <= n; ++n1)
    for (int ell = m; ell < n; ++ell) {
      const auto ov = oracle::zero_field_overlap(n, n1, m, ell);
      const double beta = (n1 + 0.5 * (m + 1)) / n;
      const double u = ov.amplitude_ratio * lft_angular_factor(beta, ell, m, nu).real();
      worst_u = std::max(worst_u, std::abs(u - ov.overlap));
    }
  o.check(worst_u < 1e-6, "U vs F=0 overlaps (n=8, m=1): max |diff| " + num(worst_u));
  return o;
}

// 6. Hydrogen: no defects.
Outcome criterion6() {
  Outcome o;
  ProblemSpec spec = stark(-62, 3590, 0);
  for (int l = 0; l <= 8; ++l) spec.defects[l] = 0;
  spec.dipoles = sodium_dipoles(0);
  ChannelPolicy pol;
  const ChannelSet set = build_channels(spec, pol);
  const ScatteringSet sc = assemble_scattering(set.U, spec.defects, spec.dipoles, set.cot_gamma);
  const Eigen::Index n = sc.R.rows();
  const double r_max = sc.R.cwiseAbs().maxCoeff();
  const double s_dev = (sc.S - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  o.check(r_max == 0, "R = 0: max |R| " + num(r_max));
  o.check(s_dev == 0, "S = I: max |S - I| " + num(s_dev));
  const double omega = units::cm_to_hartree(24476.09 - 62);
  const double z = -units::mm_to_au(1);
  const auto res = run_microscopy(set, omega, z, {}, 1001);
  const auto direct = parabolic_composition(set, omega, z, res.map.rho_grid);
  double peak = 0, diff = 0;
  for (std::size_t i = 0; i < direct.dsigma_drho.size(); ++i) {
    peak = std::max(peak, direct.dsigma_drho[i]);
    diff = std::max(diff, std::abs(direct.dsigma_drho[i] - res.map.dsigma_drho[i]));
  }
  o.check(diff <= 1e-6 * peak, "fringes vs direct parabolic composition: max diff/peak " + num(diff / peak));
  return o;
}

std::vector<double> maxima(const DetectorMap& m, double scale, double prominence) {
  const auto& s = m.dsigma_drho;
  const double peak = *std::max_element(s.begin(), s.end());
  const double h = m.rho_grid[1] - m.rho_grid[0];
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i)
    if (s[i] > s[i - 1] && s[i] >= s[i + 1] && s[i] > prominence * peak) {
      const double den = s[i - 1] - 2 * s[i] + s[i + 1];
      const double dx = den != 0 ? 0.5 * (s[i - 1] - s[i + 1]) / den : 0.0;
      out.push_back((m.rho_grid[i] + dx * h) / scale);
    }
  return out;
}

// 7. Sodium microscopy.
Outcome criterion7() {
  Outcome o;
  for (double e_cm : {-62.0, -41.0})
    for (int m : {0, 1}) {
      ProblemSpec spec = stark(e_cm, 3590, m);
      spec.defects = sodium_defects();
      spec.dipoles = sodium_dipoles(m);
      const ChannelSet set = build_channels(spec, ChannelPolicy{});
      const double omega = units::cm_to_hartree(24476.09 + e_cm);
      const std::string tag = "eps=" + num(e_cm) + " m=" + std::to_string(m) + ": ";
      std::vector<std::vector<double>> peaks;
      for (double zmm : {-1.0, -0.5, -2.0}) {
        const auto res = run_microscopy(set, omega, units::mm_to_au(zmm), {}, 2001);
        const auto& s = res.map.dsigma_drho;
        // fringes above 5% of the peak at -1 mm, followed through every local maximum elsewhere
        peaks.push_back(maxima(res.map, std::sqrt(std::abs(zmm)), zmm == -1.0 ? 0.05 : 0.0));
        if (zmm != -1.0) continue;
        const double lo = *std::min_element(s.begin(), s.end());
        const double hi = *std::max_element(s.begin(), s.end());
        o.check(lo >= 0, tag + "dsigma/drho >= 0 (min " + num(lo) + ")");
        const auto all_peaks = maxima(res.map, 1, 0.01);
        o.check(all_peaks.size() >= 3, tag + std::to_string(all_peaks.size()) + " fringe maxima");
        const double rho_cl = res.map.rho_grid.back() / 1.2;
        double beyond = 0;
        for (std::size_t i = 0; i < s.size(); ++i)
          if (res.map.rho_grid[i] >= 1.1 * rho_cl) beyond = std::max(beyond, s[i]);
        o.check(beyond < 1e-3 * hi, tag + "outer cutoff, max beyond 1.1 rho_cl / peak " + num(beyond / hi));
        const double ratio = res.map.integrated() / res.sigma_total;
        o.check(std::abs(ratio - 1) < 0.01, tag + "integral / sigma_tot = " + num(ratio));
      }
      double dev = 0;
      bool same = !peaks[0].empty();
      for (std::size_t k = 1; k < peaks.size(); ++k) {
        same = same && !peaks[k].empty();
        for (double p : peaks[0]) {
          double best = 1e300;
          for (double q : peaks[k]) best = std::min(best, std::abs(q - p) / p);
          dev = std::max(dev, best);
        }
      }
      o.check(same && dev < 0.01, tag + "fringe positions in rho/sqrt|z| over z = -0.5,-1,-2 mm: " +
                                      std::to_string(peaks[0].size()) + " maxima, max shift " + num(dev));
    }
  return o;
}

// 8. Field-induced phase of a zero-energy electron in the Coulomb zone.
Outcome criterion8() {
  Outcome o;
  double worst = 0;
  for (int i = 0; i <= 180; ++i) {
    const auto b = phase_uniformity_bound(units::vcm_to_au(1000), 50, pi * i / 180);
    worst = std::max(worst, std::abs(b.value));
    if (!b.valid) o.check(false, "bound marked invalid at theta index " + std::to_string(i));
  }
  o.check(worst < 1e-3, "F=1 kV/cm, r=50: max |dphi| " + num(worst) + " rad");
  return o;
}

// 9. Half-integer lambda Coulomb pairs.
Outcome criterion9() {
  Outcome o;
  std::vector<double> zeta;
  for (int i = 1; i <= 400; ++i) zeta.push_back(0.075 * i);
  double w_dev = 0, ext = 0;
  for (double ebar : {-0.3, -0.02, -0.002})
    for (double lam : {-0.5, 0.0, 0.5, 1.0}) {
      const CoulombPair p = coulomb_pair_half_integer(ebar, lam, zeta);
      for (std::size_t i = 0; i < p.size(); ++i) w_dev = std::max(w_dev, std::abs(p.wronskian(i) * pi - 1));
      for (double z : {0.3, 2.0, 11.0, 40.0}) {
        const PairValue v = smooth_pair_value(ebar, lam, z);
        const auto h = oracle::hp_irregular_extrapolated(ebar, lam, z);
        ext = std::max(ext, std::abs(v.g - h.g) / std::hypot(h.f, h.g));
      }
    }
  // same Wronskian bound as the channel solutions
  o.check(w_dev < 1e-6, "W = 1/pi along the grid: max rel dev " + num(w_dev));
  o.check(ext < 1e-6, "l'Hopital irregular vs 50-digit lambda extrapolation: max " + num(ext));

  double cross = 0;
  for (double e_cm : {-135.8231, -41.0})
    for (double beta : {0.2, 0.6}) {
      const double eps = units::cm_to_hartree(e_cm), c = 1 - beta;
      const FieldFreeEtaPair eta_pair(eps, beta, 1);
      std::vector<double> etas, rs;
      for (int i = 1; i <= 60; ++i) {
        etas.push_back(0.5 * i);
        rs.push_back(c * 0.5 * i / 2);
      }
      const auto ev = eta_pair.evaluate(etas);
      const CoulombPair sp = coulomb_pair_spherical(eps / (c * c), 0, rs);
      const double s = std::sqrt(2 / c);
      for (std::size_t i = 0; i < etas.size(); ++i) {
        const double env = std::hypot(sp.f_vals[i], sp.g_vals[i]) * s;
        cross = std::max(cross, std::max(std::abs(ev[i].f - s * sp.f_vals[i]), std::abs(ev[i].g - s * sp.g_vals[i])) / env);
      }
    }
  o.check(cross < 1e-8, "lambda=0 eta pair vs spherical l=0 pair with (1-beta)/2 scaling: max " + num(cross));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9};
  const std::string which = argc > 1 ? argv[1] : "all";
  std::vector<int> run;
  if (which == "all") {
    for (int i = 1; i <= 9; ++i) run.push_back(i);
  } else {
    run.push_back(std::stoi(which));
  }
  bool all = true;
  for (int c : run) {
    if (c < 1 || c > 9) {
      std::fprintf(stderr, "criterion must be 1-9\n");
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(c - 1)]();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& n : o.notes) std::printf("%s\n", n.c_str());
    std::printf("%s criterion %d (%.1f s)\n", o.pass ? "PASS" : "FAIL", c, dt);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
