#include "lft/eta_channels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <lapacke.h>

#include "lft/field_free.hpp"

namespace lft {

namespace {

using std::numbers::pi;

// exact (non-Langer) coefficient q in psi'' + q psi = 0
double exact_q(double eta, const EtaChannelParams& p) {
  return p.energy / 2 + (1.0 - p.m * p.m) / (4 * eta * eta) + (1 - p.beta) / eta + p.field * eta / 4;
}

double wrap_pm_pi(double x) {
  x = std::remainder(x, 2 * pi);
  return x <= -pi ? x + 2 * pi : x;
}

// second-order local momentum q1^2 = Q - Q''/(4Q) + 5 Q'^2/(16 Q^2) from the exact coefficient Q
struct Milne {
  double q, dq, excess;  // q1, dq1/deta, q1^2 - k_Langer^2
};

Milne milne(double eta, const EtaChannelParams& p) {
  const double c = 1.0 - p.m * p.m, Z = 1 - p.beta;
  const double Q = exact_q(eta, p);
  const double Q1 = -c / (2 * eta * eta * eta) - Z / (eta * eta) + p.field / 4;
  const double Q2 = 3 * c / (2 * eta * eta * eta * eta) + 2 * Z / (eta * eta * eta);
  const double corr = -Q2 / (4 * Q) + 5 * Q1 * Q1 / (16 * Q * Q);
  return {std::sqrt(Q + corr), Q1 / (2 * std::sqrt(Q)), 1 / (4 * eta * eta) + corr};
}

struct Fit {
  double log_alpha, theta;
};

Fit wkb_fit(const EtaChannelParams& p, double eta, double u, double up) {
  const Milne w = milne(eta, p);
  const double amp = std::sqrt(2 / (pi * w.q));
  const double sn = u / amp;
  const double cs = (up / amp + w.dq / (2 * w.q) * sn) / w.q;
  return {std::log(std::hypot(sn, cs)), std::atan2(sn, cs)};
}

double phase_tail(const EtaChannelParams& p, double eta2) {
  auto f = [&p](double x) {
    const Milne w = milne(x, p);
    return w.excess / (w.q + std::sqrt(local_momentum_sq(x, p)));
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, eta2, std::numeric_limits<double>::infinity(),
                                                                        20, 1e-13);
}

double log_add(double la, int sa, double lb, int sb, int& sign) {
  // signed sum of exp(la) sa + exp(lb) sb in log form
  if (sa == 0) {
    sign = sb;
    return lb;
  }
  if (sb == 0) {
    sign = sa;
    return la;
  }
  const double ref = std::max(la, lb);
  const double v = sa * std::exp(la - ref) + sb * std::exp(lb - ref);
  sign = v < 0 ? -1 : (v > 0 ? 1 : 0);
  return v == 0 ? -std::numeric_limits<double>::infinity() : ref + std::log(std::abs(v));
}

double smoothness(const EtaChannelParams& p, double eta) {
  const double k2 = local_momentum_sq(eta, p);
  if (k2 <= 0) return std::numeric_limits<double>::infinity();
  return std::abs(local_momentum_sq_slope(eta, p)) / (2 * k2 * std::sqrt(k2));
}

const EtaSector& sector_for(const std::vector<EtaSector>& sectors, double eta) {
  for (const auto& s : sectors)
    if (eta <= s.basis->right()) return s;
  return sectors.back();
}

}  // namespace

const char* to_string(BarrierClass c) {
  switch (c) {
    case BarrierClass::above_barrier: return "above-barrier";
    case BarrierClass::below_barrier: return "below-barrier";
    case BarrierClass::no_barrier: return "no-barrier";
  }
  return "?";
}

double local_momentum_sq(double eta, const EtaChannelParams& p) {
  return p.energy / 2 - double(p.m * p.m) / (4 * eta * eta) + (1 - p.beta) / eta + p.field * eta / 4;
}

double local_momentum_sq_slope(double eta, const EtaChannelParams& p) {
  return double(p.m * p.m) / (2 * eta * eta * eta) - (1 - p.beta) / (eta * eta) + p.field / 4;
}

LocalMomentum local_momentum(double eta, const EtaChannelParams& p) {
  const double k2 = local_momentum_sq(eta, p);
  return {std::sqrt(std::abs(k2)), k2 < 0};
}

std::vector<double> turning_points(const EtaChannelParams& p) {
  // zeros of c(eta) = eta^2 k^2 = (F/4) eta^3 + (eps/2) eta^2 + Z eta - m^2/4
  const double a3 = p.field / 4, a2 = p.energy / 2, a1 = 1 - p.beta, a0 = -double(p.m * p.m) / 4;
  auto c = [&](double x) { return ((a3 * x + a2) * x + a1) * x + a0; };
  std::vector<double> roots;
  double top;
  if (a3 > 0) {
    top = 1 + std::max({std::abs(a2), std::abs(a1), std::abs(a0)}) / a3;
  } else if (a2 != 0) {
    top = 1 + std::max(std::abs(a1), std::abs(a0)) / std::abs(a2);
  } else {
    return roots;
  }
  const double lo = 1e-10;
  const int n = 6000;
  double x0 = lo, c0 = c(lo);
  if (c0 == 0) roots.push_back(lo);
  for (int i = 1; i <= n; ++i) {
    const double x1 = lo * std::pow(top / lo, double(i) / n);
    const double c1 = c(x1);
    if ((c0 < 0) != (c1 < 0) && c0 != 0) {
      boost::uintmax_t iters = 200;
      auto tol = boost::math::tools::eps_tolerance<double>(52);
      auto r = boost::math::tools::toms748_solve(c, x0, x1, c0, c1, tol, iters);
      roots.push_back((r.first + r.second) / 2);
    }
    x0 = x1;
    c0 = c1;
  }
  return roots;
}

double outer_turning_point(const EtaChannelParams& p) {
  const auto r = turning_points(p);
  return r.empty() ? 0.0 : r.back();
}

BarrierClass classify_barrier(const EtaChannelParams& p) {
  if (p.beta > 1) return BarrierClass::no_barrier;
  const auto r = turning_points(p);
  const std::size_t barrier_roots = p.m == 0 ? 2 : 3;
  return r.size() >= barrier_roots ? BarrierClass::below_barrier : BarrierClass::above_barrier;
}

double phase_integral(const EtaChannelParams& p, double a, double b) {
  if (b == a) return 0;
  using boost::math::quadrature::gauss_kronrod;
  auto k = [&p](double x) { return std::sqrt(std::max(0.0, local_momentum_sq(x, p))); };
  // x = a + t^2 removes the square-root behaviour at a turning point
  const double near = std::min(b, std::max(2 * a, a + 50.0));
  auto smooth = [&](double t) { return 2 * t * k(a + t * t); };
  double acc = gauss_kronrod<double, 61>::integrate(smooth, 0.0, std::sqrt(near - a), 20, 1e-14);
  if (b > near) acc += gauss_kronrod<double, 61>::integrate(k, near, b, 20, 1e-14);
  return acc;
}

double RMatrixWorkspace::gamma(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (j - i > kd) return 0;
  return gamma_band[static_cast<std::size_t>(j) * (kd + 1) + (kd + i - j)];
}

double RMatrixWorkspace::lambda(int i, int j) const {
  if (i != j) return 0;
  return (i == inner_index() || i == outer_index()) ? 1.0 : 0.0;
}

RMatrixWorkspace build_workspace(const EtaChannelParams& p, std::shared_ptr<const BSplineBasis> basis,
                                 int quad_points) {
  RMatrixWorkspace ws;
  ws.channel = p;
  ws.eta1 = basis->left();
  ws.eta2 = basis->right();
  if (!(ws.eta1 > 0)) throw std::invalid_argument("build_workspace: inner surface must be positive");
  const int k = basis->order();
  ws.kd = k - 1;
  const int n = basis->size();
  ws.gamma_band.assign(static_cast<std::size_t>(n) * (ws.kd + 1), 0.0);
  const GaussRule& g = gauss_legendre_rule(quad_points);
  std::vector<double> buf(2 * k);
  for (int iv = 0; iv < basis->intervals(); ++iv) {
    const double a = basis->breakpoints()[iv], b = basis->breakpoints()[iv + 1];
    const double half = (b - a) / 2, mid = (a + b) / 2;
    for (std::size_t q = 0; q < g.x.size(); ++q) {
      const double x = mid + half * g.x[q];
      const double w = half * g.w[q];
      const int first = basis->evaluate(x, 1, buf);
      const double qx = exact_q(x, p);
      for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
          const int gi = first + i, gj = first + j;
          ws.gamma_band[static_cast<std::size_t>(gj) * (ws.kd + 1) + (ws.kd + gi - gj)] +=
              w * (qx * buf[i] * buf[j] - buf[k + i] * buf[k + j]);
        }
    }
  }
  ws.basis = std::move(basis);
  return ws;
}

std::vector<double> eta_breakpoints(const EtaChannelParams& p, double eta1, double eta2) {
  if (!(eta1 > 0) || !(eta2 > eta1)) throw std::invalid_argument("eta_breakpoints: need 0 < eta1 < eta2");
  std::vector<double> br{eta1};
  double x = eta1;
  while (x < eta2) {
    const double scale = std::sqrt(std::abs(local_momentum_sq(x, p)));
    const double airy = std::cbrt(std::abs(local_momentum_sq_slope(x, p)));
    double h = 0.15 * x;
    if (scale > 0) h = std::min(h, (2 * pi / 16) / scale);
    if (airy > 0) h = std::min(h, (2 * pi / 16) / airy);
    x += h;
    br.push_back(x);
  }
  if (br.size() > 2 && eta2 - br[br.size() - 2] < 0.5 * (br.back() - br[br.size() - 2])) br.pop_back();
  br.back() = eta2;
  return br;
}

RMatrixWorkspace build_workspace(const EtaChannelParams& p, double eta1, double eta2, const EtaOptions& opt) {
  auto basis = std::make_shared<const BSplineBasis>(eta_breakpoints(p, eta1, eta2), opt.order);
  return build_workspace(p, std::move(basis), opt.quad_points);
}

std::array<SurfaceSolution, 2> solve_surface_eigenproblem(const RMatrixWorkspace& ws) {
  const int n = ws.size();
  const int nc = n - 2;
  const int kd = ws.kd;
  const int I = ws.inner_index(), O = ws.outer_index();
  double om00 = ws.gamma(I, I), om01 = ws.gamma(I, O), om11 = ws.gamma(O, O);
  std::vector<double> X(2 * static_cast<std::size_t>(std::max(nc, 0)), 0.0);

  if (nc > 0) {
    // closed-closed block in general band storage for LU with partial pivoting
    const int ldab = 3 * kd + 1;
    std::vector<double> ab(static_cast<std::size_t>(ldab) * nc, 0.0);
    double anorm = 0;
    for (int j = 0; j < nc; ++j) {
      double col = 0;
      for (int i = std::max(0, j - kd); i <= std::min(nc - 1, j + kd); ++i) {
        const double v = ws.gamma(i + 1, j + 1);
        ab[static_cast<std::size_t>(j) * ldab + (2 * kd + i - j)] = v;
        col += std::abs(v);
      }
      anorm = std::max(anorm, col);
    }
    for (int i = 0; i < nc; ++i) {
      X[i] = ws.gamma(i + 1, I);
      X[nc + i] = ws.gamma(i + 1, O);
    }
    std::vector<lapack_int> ipiv(nc);
    lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, nc, nc, kd, kd, ab.data(), ldab, ipiv.data());
    if (info != 0) throw ClosedChannelSingular("closed-closed block is singular at this energy");
    double rcond = 0;
    info = LAPACKE_dgbcon(LAPACK_COL_MAJOR, '1', nc, kd, kd, ab.data(), ldab, ipiv.data(), anorm, &rcond);
    if (info != 0 || rcond < 1e-14) throw ClosedChannelSingular("closed-closed block is numerically singular");
    info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', nc, kd, kd, 2, ab.data(), ldab, ipiv.data(), X.data(), nc);
    if (info != 0) throw ClosedChannelSingular("closed-closed back substitution failed");
    for (int i = 0; i < nc; ++i) {
      om00 -= ws.gamma(I, i + 1) * X[i];
      om01 -= 0.5 * (ws.gamma(I, i + 1) * X[nc + i] + ws.gamma(O, i + 1) * X[i]);
      om11 -= ws.gamma(O, i + 1) * X[nc + i];
    }
  }

  // Jacobi rotation of the 2x2 surface matrix
  double c = 1, s = 0, t = 0;
  if (om01 != 0) {
    const double tau = (om11 - om00) / (2 * om01);
    t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1 + tau * tau));
    c = 1 / std::sqrt(1 + t * t);
    s = t * c;
  }
  const std::array<double, 2> b{om00 - t * om01, om11 + t * om01};
  const std::array<std::array<double, 2>, 2> v{{{c, -s}, {s, c}}};

  std::array<SurfaceSolution, 2> out;
  for (int l = 0; l < 2; ++l) {
    auto& sol = out[l];
    sol.b = b[l];
    sol.coef.assign(n, 0.0);
    sol.coef[I] = v[l][0];
    sol.coef[O] = v[l][1];
    for (int i = 0; i < nc; ++i) sol.coef[i + 1] = -(X[i] * v[l][0] + X[nc + i] * v[l][1]);
    sol.inner = v[l][0];
    sol.outer = v[l][1];
  }
  return out;
}

EtaSolutionPair construct_regular_irregular(const EtaChannelParams& p, std::span<const RMatrixWorkspace> sectors,
                                            const PairValue& boundary) {
  if (sectors.empty()) throw std::invalid_argument("construct_regular_irregular: no sectors");
  EtaSolutionPair pair;
  pair.channel = p;
  pair.boundary = boundary;
  pair.eta1 = sectors.front().eta1;
  pair.eta2 = sectors.back().eta2;

  // state (u, u') per solution, carried with a log scale; the irregular state is kept as its
  // component independent of the regular one plus a multiple log_c/sign_c of the regular solution
  std::array<double, 2> u{boundary.f, boundary.g}, up{boundary.fp, boundary.gp}, logs{0, 0};
  double log_c = -std::numeric_limits<double>::infinity();
  int sign_c = 0;
  for (std::size_t si = 0; si < sectors.size(); ++si) {
    const auto& ws = sectors[si];
    const auto sol = solve_surface_eigenproblem(ws);
    // [psi1 psi2; psi1' psi2'] at the inner surface
    const double m00 = sol[0].inner, m01 = sol[1].inner;
    const double m10 = sol[0].b * sol[0].inner, m11 = sol[1].b * sol[1].inner;
    const double det = m00 * m11 - m01 * m10;
    const double fro = std::sqrt(m00 * m00 + m01 * m01 + m10 * m10 + m11 * m11);
    if (det == 0 || fro * fro / std::abs(det) > 1e12)
      throw DegenerateSolution("surface solutions are numerically dependent at eta=" + std::to_string(ws.eta1));
    EtaSector sec;
    sec.basis = ws.basis;
    sec.log_c = log_c;
    sec.sign_c = sign_c;
    std::array<double, 2> ub{}, upb{};
    for (int w = 0; w < 2; ++w) {
      const double a1 = (m11 * u[w] - m01 * up[w]) / det;
      const double a2 = (-m10 * u[w] + m00 * up[w]) / det;
      std::vector<double> coef(ws.size());
      for (int i = 0; i < ws.size(); ++i) coef[i] = a1 * sol[0].coef[i] + a2 * sol[1].coef[i];
      ub[w] = a1 * sol[0].outer + a2 * sol[1].outer;
      upb[w] = -(a1 * sol[0].b * sol[0].outer + a2 * sol[1].b * sol[1].outer);
      (w == 0 ? sec.reg : sec.irr) = std::move(coef);
      (w == 0 ? sec.log_reg : sec.log_irr) = logs[w];
    }
    pair.end_scaled = {ub[0], upb[0], ub[1], upb[1]};
    pair.sectors.push_back(std::move(sec));
    if (si + 1 == sectors.size()) break;

    const double nr = std::hypot(ub[0], upb[0]);
    const double ni = std::hypot(ub[1], upb[1]);
    const double cosang = (ub[0] * ub[1] + upb[0] * upb[1]) / (nr * ni);
    if (std::abs(cosang) > 0.9) {
      // move the regular component of the irregular state into the coefficient
      const double c = (ub[0] * ub[1] + upb[0] * upb[1]) / (nr * nr);
      ub[1] -= c * ub[0];
      upb[1] -= c * upb[0];
      log_c = log_add(log_c, sign_c, std::log(std::abs(c)) + logs[1] - logs[0], c < 0 ? -1 : 1, sign_c);
    }
    for (int w = 0; w < 2; ++w) {
      const double mag = std::max(std::abs(ub[w]), std::abs(upb[w]));
      u[w] = ub[w] / mag;
      up[w] = upb[w] / mag;
      logs[w] += std::log(mag);
    }
  }
  return pair;
}

PairValue EtaSolutionPair::raw_at(double eta) const {
  const EtaSector& s = sector_for(sectors, eta);
  const auto r = s.basis->combine(s.reg, eta);
  const auto i = s.basis->combine(s.irr, eta);
  const double er = std::exp(s.log_reg), ei = std::exp(s.log_irr);
  const double ec = s.sign_c * std::exp(s.log_c + s.log_reg);
  return {er * r.f, er * r.fp, ei * i.f + ec * r.f, ei * i.fp + ec * r.fp};
}

PairValue EtaSolutionPair::at(double eta) const {
  const EtaSector& s = sector_for(sectors, eta);
  const auto r = s.basis->combine(s.reg, eta);
  const auto i = s.basis->combine(s.irr, eta);
  const double er = std::exp(s.log_reg - log_alpha_reg), ei = std::exp(s.log_irr - log_alpha_irr);
  const double ec = s.sign_c * std::exp(s.log_c + s.log_reg - log_alpha_irr);
  return {er * r.f, er * r.fp, ei * i.f + ec * r.f, ei * i.fp + ec * r.fp};
}

double EtaSolutionPair::raw_wronskian_at(double eta) const {
  const EtaSector& s = sector_for(sectors, eta);
  const auto r = s.basis->combine(s.reg, eta);
  const auto i = s.basis->combine(s.irr, eta);
  return (r.f * i.fp - r.fp * i.f) * std::exp(s.log_reg + s.log_irr);
}

double EtaSolutionPair::wronskian_at(double eta) const {
  const EtaSector& s = sector_for(sectors, eta);
  const auto r = s.basis->combine(s.reg, eta);
  const auto i = s.basis->combine(s.irr, eta);
  return (r.f * i.fp - r.fp * i.f) * std::exp(s.log_reg + s.log_irr - log_alpha_reg - log_alpha_irr);
}

void extract_phases(EtaSolutionPair& pair, double smoothness_tolerance) {
  const auto& p = pair.channel;
  const double eta2 = pair.eta2;
  if (local_momentum_sq(eta2, p) <= 0 || smoothness(p, eta2) >= smoothness_tolerance)
    throw DomainError("extract_phases: eta2=" + std::to_string(eta2) + " is not in the WKB region");
  pair.eta0 = outer_turning_point(p);
  pair.barrier = classify_barrier(p);
  if (pair.eta0 >= eta2) throw DomainError("extract_phases: eta2 inside the barrier");
  pair.phase_eta2 = phase_integral(p, pair.eta0, eta2) + pi / 4;

  pair.phase_tail = phase_tail(p, eta2);

  const auto& last = pair.sectors.back();
  const Fit fr = wkb_fit(p, eta2, pair.end_scaled.f, pair.end_scaled.fp);
  const Fit fi = wkb_fit(p, eta2, pair.end_scaled.g, pair.end_scaled.gp);
  pair.log_alpha_reg = last.log_reg + fr.log_alpha;
  pair.theta_reg = fr.theta;
  // irregular phasor = independent part + c * regular phasor
  {
    const double l1 = last.log_irr + fi.log_alpha;
    const double l2 = last.log_c + pair.log_alpha_reg;
    const double ref = last.sign_c == 0 ? l1 : std::max(l1, l2);
    double re = std::exp(l1 - ref) * std::cos(fi.theta), im = std::exp(l1 - ref) * std::sin(fi.theta);
    if (last.sign_c != 0) {
      re += last.sign_c * std::exp(l2 - ref) * std::cos(fr.theta);
      im += last.sign_c * std::exp(l2 - ref) * std::sin(fr.theta);
    }
    pair.log_alpha_irr = ref + std::log(std::hypot(re, im));
    pair.theta_irr = std::atan2(im, re);
  }
  pair.delta = wrap_pm_pi(fr.theta - pair.phase_eta2 + pair.phase_tail);
  // sin(gamma) from the boundary Wronskian, cos(gamma) from the fitted phases
  const double wb = pair.boundary.wronskian();
  pair.sin_gamma = std::exp(std::log(std::abs(wb) * pi / 2) - pair.log_alpha_reg - pair.log_alpha_irr);
  pair.gamma = std::atan2(pair.sin_gamma, std::cos(pair.theta_reg - pair.theta_irr));
}

EtaSolutionPair solve_eta_channel(const EtaChannelParams& p, int n1, const EtaOptions& opt) {
  if (p.energy < 0 && p.beta >= 1)
    throw DomainError("solve_eta_channel: beta >= 1 at negative energy is omitted");
  if (p.field <= 0 && p.energy <= 0) throw DomainError("solve_eta_channel: no continuum without field at eps <= 0");
  const double eta0 = outer_turning_point(p);
  double eta2 = opt.eta2;
  if (eta2 <= 0) {
    const double zone = p.field > 0 ? 0.1 / std::sqrt(p.field) : 30 / std::sqrt(2 * p.energy);
    eta2 = 1.5 * std::max(eta0, zone);
    while (smoothness(p, eta2) >= opt.wkb_smoothness) eta2 *= 1.2;
  }
  const FieldFreeEtaPair ff(p.energy, p.beta, p.m);
  const PairValue boundary = ff.at(opt.eta1);

  std::vector<double> br = eta_breakpoints(p, opt.eta1, eta2);
  // sector ends as breakpoint indices
  std::vector<std::size_t> ends;
  {
    double action = 0;
    std::size_t count = 0;
    for (std::size_t i = 1; i < br.size(); ++i) {
      const double mid = (br[i] + br[i - 1]) / 2;
      const double k2 = local_momentum_sq(mid, p);
      if (k2 < 0) action += std::sqrt(-k2) * (br[i] - br[i - 1]);
      ++count;
      if ((action > opt.sector_action || count >= static_cast<std::size_t>(opt.sector_intervals)) &&
          i + 2 < br.size()) {
        ends.push_back(i);
        action = 0;
        count = 0;
      }
    }
    ends.push_back(br.size() - 1);
  }

  for (int attempt = 0;; ++attempt) {
    try {
      std::vector<RMatrixWorkspace> ws;
      std::size_t start = 0;
      for (std::size_t e : ends) {
        auto basis = std::make_shared<const BSplineBasis>(
            std::vector<double>(br.begin() + start, br.begin() + e + 1), opt.order);
        ws.push_back(build_workspace(p, std::move(basis), opt.quad_points));
        start = e;
      }
      EtaSolutionPair pair = construct_regular_irregular(p, ws, boundary);
      pair.n1 = n1;
      pair.log_nf = ff.log_nf();
      extract_phases(pair, std::max(opt.wkb_smoothness * 10, 1e-2));
      pair.eta_grid = br;
      for (double x : br) {
        const PairValue v = pair.at(x);
        pair.Upsilon_vals.push_back(v.f);
        pair.Upsilon_deriv.push_back(v.fp);
        pair.Upsilon_bar_vals.push_back(v.g);
        pair.Upsilon_bar_deriv.push_back(v.gp);
      }
      return pair;
    } catch (const ClosedChannelSingular&) {
      if (attempt >= opt.max_retries) throw;
      // move the outer surface one knot spacing outward
      const double h = br.back() - br[br.size() - 2];
      br.push_back(br.back() + h);
      ends.back() = br.size() - 1;
    }
  }
}

WkbValue wkb_propagate(const EtaChannelParams& p, double eta_from, double phase_from, double eta_target) {
  const double k2 = local_momentum_sq(eta_target, p);
  if (k2 <= 0) throw DomainError("wkb_propagate: target lies in a classically forbidden region");
  WkbValue v;
  v.k = std::sqrt(k2);
  v.dk = local_momentum_sq_slope(eta_target, p) / (2 * v.k);
  v.amplitude = std::sqrt(2 / (pi * v.k));
  auto k = [&p](double x) {
    const double q = local_momentum_sq(x, p);
    if (q <= 0) throw DomainError("wkb_propagate: forbidden region en route");
    return std::sqrt(q);
  };
  v.phase = phase_from;
  if (eta_target != eta_from)
    v.phase += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(k, eta_from, eta_target, 25, 1e-15);
  return v;
}

WkbValue wkb_propagate(const EtaSolutionPair& pair, double eta_target) {
  if (eta_target < pair.eta2) throw DomainError("wkb_propagate: target inside the R-matrix box");
  return wkb_propagate(pair.channel, pair.eta2, pair.phase_eta2, eta_target);
}

}  // namespace lft
