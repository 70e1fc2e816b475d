#include "lft/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/laguerre.hpp>
#include <boost/math/special_functions/spherical_harmonic.hpp>

namespace lft::oracle {

namespace {

using std::numbers::pi;

void check_square(const HPMatrix& a, const char* who) {
  if (a.rows() != a.cols()) throw std::invalid_argument(std::string(who) + ": square matrix required");
  if (a.rows() > 32) throw std::invalid_argument(std::string(who) + ": dimension above 32");
}

hp norm_inf(const HPMatrix& a) {
  hp best = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    hp s = 0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) s += abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

HPMatrix identity(Eigen::Index n) {
  HPMatrix I = HPMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) I(i, i) = 1;
  return I;
}

HPMatrix embed(const HPComplex& a) {
  const Eigen::Index n = a.re.rows();
  HPMatrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = a.re;
  out.topRightCorner(n, n) = -a.im;
  out.bottomLeftCorner(n, n) = a.im;
  out.bottomRightCorner(n, n) = a.re;
  return out;
}

HPMatrix mul(const HPMatrix& a, const HPMatrix& b) {
  HPMatrix c = HPMatrix::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k)
      for (Eigen::Index j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
  return c;
}

HPMatrix transpose(const HPMatrix& a) {
  HPMatrix t(a.cols(), a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

HPMatrix diag(const Eigen::VectorXd& v) {
  HPMatrix d = HPMatrix::Zero(v.size(), v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) d(i, i) = hp(v(i));
  return d;
}

// (A + iB) as a complex double matrix from its embedded block form.
Eigen::MatrixXcd complex_part(const HPMatrix& e, Eigen::Index n) {
  Eigen::MatrixXcd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out(i, j) = {static_cast<double>(e(i, j)), static_cast<double>(e(n + i, j))};
  return out;
}

// 1F1(a; b; x)/Gamma(b) by its power series; x >= 0.
hp hyp1f1_regularized(const hp& a, const hp& b, const hp& x) {
  int k0 = 0;
  hp term;
  const hp bf = floor(b);
  if (b <= 0 && b == bf) {
    k0 = static_cast<int>(-b) + 1;
    term = 1;
    for (int j = 0; j < k0; ++j) term *= (a + j) * x / (j + 1);
  } else {
    term = 1 / boost::math::tgamma(b);
  }
  hp sum = term;
  const hp eps = std::numeric_limits<hp>::epsilon();
  for (int k = k0; k < 100000; ++k) {
    term *= (a + k) * x / ((k + 1) * (b + k));
    sum += term;
    if (k > x && k > abs(a) && abs(term) <= eps * abs(sum)) return sum;
  }
  throw std::runtime_error("hyp1f1_regularized: series did not converge");
}

hp smooth_regular_hp(const hp& nubar, const hp& mu, const hp& zeta) {
  const hp A = boost::math::tgamma(mu + nubar + 1) / (pow(nubar, 2 * mu + 1) * boost::math::tgamma(nubar - mu));
  if (!(A > 0)) throw std::domain_error("hp_smooth_regular: A(nubar, mu) is not positive");
  return sqrt(A) * pow(hp(2), mu + hp(0.5)) * pow(zeta, mu + 1) * exp(-zeta / nubar) *
         hyp1f1_regularized(mu - nubar + 1, 2 * mu + 2, 2 * zeta / nubar);
}

}  // namespace

OdeSolution numerov_integrate(const OdeProblem& pr) {
  if (!pr.q) throw std::invalid_argument("numerov_integrate: no coefficient");
  if (pr.steps < 2 || pr.h == 0) throw std::invalid_argument("numerov_integrate: need h != 0 and two steps");
  OdeSolution s;
  s.x.resize(static_cast<std::size_t>(pr.steps) + 1);
  s.psi.resize(s.x.size());
  std::vector<double> q(s.x.size());
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    s.x[i] = pr.x0 + static_cast<double>(i) * pr.h;
    q[i] = pr.q(s.x[i]);
    if (!std::isfinite(q[i])) throw std::domain_error("numerov_integrate: coefficient not finite on the grid");
    const double kh = std::sqrt(std::abs(q[i])) * std::abs(pr.h);
    if (kh > pr.max_kh)
      throw AccuracyError("numerov_integrate: |k h| = " + std::to_string(kh) + " at x = " + std::to_string(s.x[i]));
  }
  // first step by RK4 on (psi, psi')
  {
    const int sub = 64;
    const double dt = pr.h / sub;
    double y = pr.psi0, yp = pr.dpsi0, x = pr.x0;
    for (int j = 0; j < sub; ++j) {
      const double k1y = yp, k1p = -pr.q(x) * y;
      const double k2y = yp + 0.5 * dt * k1p, k2p = -pr.q(x + 0.5 * dt) * (y + 0.5 * dt * k1y);
      const double k3y = yp + 0.5 * dt * k2p, k3p = -pr.q(x + 0.5 * dt) * (y + 0.5 * dt * k2y);
      const double k4y = yp + dt * k3p, k4p = -pr.q(x + dt) * (y + dt * k3y);
      y += dt / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
      yp += dt / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
      x += dt;
    }
    s.psi[0] = pr.psi0;
    s.psi[1] = y;
  }
  // summed form on w = (1 + h^2 q / 12) psi: the first difference is carried instead of two levels,
  // which keeps rounding from growing like 1/(k h)
  const double h2 = pr.h * pr.h / 12;
  const double hh = pr.h * pr.h;
  double w = (1 + h2 * q[1]) * s.psi[1];
  double dw = w - (1 + h2 * q[0]) * s.psi[0];
  for (std::size_t i = 1; i + 1 < s.x.size(); ++i) {
    dw -= hh * q[i] * s.psi[i];
    w += dw;
    s.psi[i + 1] = w / (1 + h2 * q[i + 1]);
  }
  return s;
}

double shooting_eigenvalue(const std::function<double(double)>& V, double a, double b, int steps, int n, double e_lo,
                           double e_hi, double tolerance) {
  auto nodes = [&](double E) {
    OdeProblem pr;
    pr.q = [&](double x) { return 2 * (E - V(x)); };
    pr.x0 = a;
    pr.h = (b - a) / steps;
    pr.steps = steps;
    pr.psi0 = 0;
    pr.dpsi0 = 1e-8;
    const auto sol = numerov_integrate(pr);
    int count = 0;
    for (std::size_t i = 2; i < sol.psi.size(); ++i)
      if ((sol.psi[i] < 0) != (sol.psi[i - 1] < 0)) ++count;
    return count;
  };
  if (nodes(e_lo) > n || nodes(e_hi) <= n) throw std::invalid_argument("shooting_eigenvalue: bracket misses the state");
  while (e_hi - e_lo > tolerance) {
    const double mid = 0.5 * (e_lo + e_hi);
    if (nodes(mid) > n) e_hi = mid;
    else e_lo = mid;
  }
  return 0.5 * (e_lo + e_hi);
}

std::vector<double> bisection_roots(const std::function<double(double)>& f, double a, double b, int samples) {
  std::vector<double> roots;
  double x0 = a, f0 = f(a);
  for (int i = 1; i <= samples; ++i) {
    const double x1 = a + (b - a) * i / samples;
    const double f1 = f(x1);
    if (f0 == 0) roots.push_back(x0);
    else if ((f0 < 0) != (f1 < 0) && f1 != 0) {
      double lo = x0, hi = x1, flo = f0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

HPMatrix to_hp(const Eigen::MatrixXd& a) {
  HPMatrix out(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out(i, j) = hp(a(i, j));
  return out;
}

Eigen::MatrixXd to_double(const HPMatrix& a) {
  Eigen::MatrixXd out(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out(i, j) = static_cast<double>(a(i, j));
  return out;
}

HPMatrix highprec_solve(const HPMatrix& a_in, const HPMatrix& b_in) {
  check_square(a_in, "highprec_solve");
  if (b_in.rows() != a_in.rows()) throw std::invalid_argument("highprec_solve: size mismatch");
  const Eigen::Index n = a_in.rows();
  HPMatrix a = a_in, b = b_in;
  std::vector<Eigen::Index> col(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = i;
  const hp scale = norm_inf(a_in);
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index pr = k, pc = k;
    hp best = -1;
    for (Eigen::Index i = k; i < n; ++i)
      for (Eigen::Index j = k; j < n; ++j)
        if (abs(a(i, j)) > best) {
          best = abs(a(i, j));
          pr = i;
          pc = j;
        }
    if (best <= scale * hp("1e-45")) {
      const double cond = best > 0 ? static_cast<double>(scale / best) : std::numeric_limits<double>::infinity();
      throw SingularMatrix("highprec_solve: singular matrix (condition estimate " + std::to_string(cond) + ")", cond);
    }
    a.row(k).swap(a.row(pr));
    b.row(k).swap(b.row(pr));
    a.col(k).swap(a.col(pc));
    std::swap(col[static_cast<std::size_t>(k)], col[static_cast<std::size_t>(pc)]);
    const hp piv = a(k, k);
    for (Eigen::Index j = 0; j < n; ++j) a(k, j) /= piv;
    for (Eigen::Index j = 0; j < b.cols(); ++j) b(k, j) /= piv;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == k || a(i, k) == 0) continue;
      const hp f = a(i, k);
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) -= f * a(k, j);
      for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) -= f * b(k, j);
    }
  }
  // undo the column permutation: row k of b holds unknown col[k]
  HPMatrix x(n, b.cols());
  for (Eigen::Index k = 0; k < n; ++k) x.row(col[static_cast<std::size_t>(k)]) = b.row(k);
  return x;
}

HPMatrix highprec_inverse(const HPMatrix& a) {
  check_square(a, "highprec_inverse");
  return highprec_solve(a, identity(a.rows()));
}

std::vector<hp> highprec_symmetric_eigenvalues(const HPMatrix& a_in) {
  check_square(a_in, "highprec_symmetric_eigenvalues");
  HPMatrix a = a_in;
  const Eigen::Index n = a.rows();
  const hp eps = std::numeric_limits<hp>::epsilon();
  for (int sweep = 0; sweep < 100; ++sweep) {
    hp off = 0, total = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        total += a(i, j) * a(i, j);
        if (i != j) off += a(i, j) * a(i, j);
      }
    if (off <= eps * eps * total) break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0) continue;
        const hp theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const hp t = (theta >= 0 ? 1 : -1) / (abs(theta) + sqrt(theta * theta + 1));
        const hp c = 1 / sqrt(t * t + 1), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const hp akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const hp apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<hp> ev;
  for (Eigen::Index i = 0; i < n; ++i) ev.push_back(a(i, i));
  std::sort(ev.begin(), ev.end());
  return ev;
}

hp hilbert_residual(int n) {
  HPMatrix H(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) H(i, j) = hp(1) / (i + j + 1);
  const HPMatrix P = mul(H, highprec_inverse(H));
  hp err = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) err = std::max(err, abs(P(i, j) - (i == j ? 1 : 0)));
  return err;
}

HPComplex highprec_complex_inverse(const HPComplex& a) {
  const Eigen::Index n = a.re.rows();
  const HPMatrix inv = highprec_inverse(embed(a));
  return {inv.topLeftCorner(n, n), inv.bottomLeftCorner(n, n)};
}

Eigen::MatrixXd hp_reaction_matrix(const Eigen::MatrixXd& K, const Eigen::VectorXd& cot_gamma) {
  const HPMatrix k = to_hp(K);
  const HPMatrix A = identity(K.rows()) - mul(diag(cot_gamma), k);
  return to_double(mul(k, highprec_inverse(A)));
}

Eigen::MatrixXcd hp_s_matrix(const Eigen::MatrixXd& R) {
  const Eigen::Index n = R.rows();
  const HPMatrix r = to_hp(R);
  const HPComplex plus{identity(n), r}, minus{identity(n), -r};
  return complex_part(mul(embed(plus), highprec_inverse(embed(minus))), n);
}

Eigen::VectorXd hp_dipole_reaction(const Eigen::VectorXd& d, const Eigen::MatrixXd& U, const Eigen::VectorXd& delta,
                                   const Eigen::VectorXd& cot_gamma) {
  const HPMatrix u = to_hp(U);
  HPMatrix t = HPMatrix::Zero(delta.size(), delta.size());
  HPMatrix row(1, d.size());
  for (Eigen::Index j = 0; j < delta.size(); ++j) {
    t(j, j) = tan(hp(delta(j)));
    row(0, j) = hp(d(j)) / cos(hp(delta(j)));
  }
  const HPMatrix K = mul(mul(u, t), transpose(u));
  const HPMatrix A = identity(U.rows()) - mul(diag(cot_gamma), K);
  const HPMatrix D = mul(mul(row, transpose(u)), highprec_inverse(A));
  return to_double(transpose(D)).col(0);
}

Eigen::VectorXcd hp_dipole_incoming(const Eigen::VectorXd& D_R, const Eigen::MatrixXd& R) {
  const Eigen::Index n = R.rows();
  const HPComplex minus{identity(n), -to_hp(R)};
  const HPComplex inv = highprec_complex_inverse(minus);
  const HPMatrix row = transpose(to_hp(D_R));
  const HPMatrix re = mul(row, inv.re), im = mul(row, inv.im);
  Eigen::VectorXcd out(n);
  for (Eigen::Index j = 0; j < n; ++j) out(j) = {static_cast<double>(re(0, j)), static_cast<double>(im(0, j))};
  return out;
}

Eigen::MatrixXd hp_reaction_matrix_via_inverse(const Eigen::MatrixXd& U, const Eigen::VectorXd& delta,
                                               const Eigen::VectorXd& cot_gamma) {
  if (U.rows() != U.cols()) throw std::invalid_argument("hp_reaction_matrix_via_inverse: square U required");
  const HPMatrix ui = highprec_inverse(to_hp(U));
  HPMatrix c = HPMatrix::Zero(delta.size(), delta.size());
  for (Eigen::Index j = 0; j < delta.size(); ++j) c(j, j) = 1 / tan(hp(delta(j)));
  const HPMatrix rinv = mul(mul(transpose(ui), c), ui) - diag(cot_gamma);
  return to_double(highprec_inverse(rinv));
}

double hp_smooth_regular(double energy_bar, double mu, double zeta) {
  const hp nubar = 1 / sqrt(-hp(energy_bar));
  return static_cast<double>(smooth_regular_hp(nubar, hp(mu), hp(zeta)));
}

HPPair hp_irregular_extrapolated(double energy_bar, double lambda_c, double zeta, double h) {
  if (!(energy_bar < 0)) throw std::domain_error("hp_irregular_extrapolated: negative scaled energy required");
  const hp nubar = 1 / sqrt(-hp(energy_bar));
  const hp z = zeta;
  const hp lc = lambda_c;
  const hp dh = h;
  auto general = [&](const hp& lam) {
    const hp th = (2 * lam + 1) * boost::math::constants::pi<hp>();
    return smooth_regular_hp(nubar, lam, z) * cos(th) / sin(th) - smooth_regular_hp(nubar, -lam - 1, z) / sin(th);
  };
  HPPair out;
  out.f = static_cast<double>(smooth_regular_hp(nubar, lc, z));
  out.g = static_cast<double>((general(lc + dh) + general(lc - dh)) / 2);
  return out;
}

double hydrogen_radial(int n, int ell, double r) {
  using boost::math::factorial;
  const double x = 2 * r / n;
  const double norm = std::sqrt(std::pow(2.0 / n, 3) * factorial<double>(n - ell - 1) /
                                (2.0 * n * factorial<double>(n + ell)));
  return norm * std::exp(-r / n) * std::pow(x, ell) * boost::math::laguerre(n - ell - 1, 2 * ell + 1, x);
}

double hydrogen_parabolic(int n, int n1, int m, double xi, double eta) {
  using boost::math::factorial;
  m = std::abs(m);
  const int n2 = n - n1 - m - 1;
  if (n1 < 0 || n2 < 0) throw std::invalid_argument("hydrogen_parabolic: n1 + |m| + 1 > n");
  const double p1 = factorial<double>(n1 + m) / factorial<double>(n1);
  const double p2 = factorial<double>(n2 + m) / factorial<double>(n2);
  const double C = std::sqrt(2.0) / (n * n) / std::sqrt(p1 * p2);
  return C * std::exp(-(xi + eta) / (2.0 * n)) * std::pow(xi * eta / (n * n), 0.5 * m) *
         boost::math::laguerre(n1, m, xi / n) * boost::math::laguerre(n2, m, eta / n) / std::sqrt(2 * pi);
}

OverlapCheck zero_field_overlap(int n, int n1, int m, int ell) {
  using boost::math::binomial_coefficient;
  using boost::math::factorial;
  m = std::abs(m);
  if (ell < m || ell >= n) throw std::invalid_argument("zero_field_overlap: need |m| <= l < n");
  const int n2 = n - n1 - m - 1;
  OverlapCheck out;
  // <R Y | psi>, dV = (xi + eta)/4 dxi deta dphi; the phi integral cancels e^{i m phi}/sqrt(2 pi) against Y's.
  const double L = 80.0 * n;  // Laguerre tails reach xi/n ~ 4 n2 + 2m
  const int panels = 60;
  using rule = boost::math::quadrature::gauss<double, 20>;
  const auto& xs = rule::abscissa();
  const auto& ws = rule::weights();
  std::vector<double> node, weight;
  for (int p = 0; p < panels; ++p) {
    const double a = L * p / panels, b = L * (p + 1) / panels;
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double w = ws[i] * hw;
      if (xs[i] == 0) {
        node.push_back(c);
        weight.push_back(w);
      } else {
        node.push_back(c - hw * xs[i]);
        weight.push_back(w);
        node.push_back(c + hw * xs[i]);
        weight.push_back(w);
      }
    }
  }
  double sum = 0;
  for (std::size_t i = 0; i < node.size(); ++i)
    for (std::size_t j = 0; j < node.size(); ++j) {
      const double xi = node[i], eta = node[j];
      const double r = 0.5 * (xi + eta);
      const double theta = std::acos(std::clamp((xi - eta) / (xi + eta), -1.0, 1.0));
      const double Ybar = std::sqrt(2 * pi) * boost::math::spherical_harmonic_r(ell, m, theta, 0.0);
      sum += weight[i] * weight[j] * (xi + eta) / 4 * hydrogen_radial(n, ell, r) * Ybar *
             hydrogen_parabolic(n, n1, m, xi, eta) * std::sqrt(2 * pi);
    }
  out.overlap = sum;

  // closed-form small-coordinate amplitudes
  const double p1 = factorial<double>(n1 + m) / factorial<double>(n1);
  const double p2 = factorial<double>(n2 + m) / factorial<double>(n2);
  const double C = std::sqrt(2.0) / (n * n) / std::sqrt(p1 * p2);
  const double n_xi_eta = C * std::pow(n, -m) * binomial_coefficient<double>(n1 + m, n1) *
                          binomial_coefficient<double>(n2 + m, n2);
  const double n_ell = std::sqrt(std::pow(2.0 / n, 3) * factorial<double>(n - ell - 1) /
                                 (2.0 * n * factorial<double>(n + ell))) *
                       std::pow(2.0 / n, ell) * binomial_coefficient<double>(n + ell, n - ell - 1);
  out.amplitude_ratio = n_xi_eta / n_ell;
  return out;
}

std::vector<RydbergLevel> sodium_levels() {
  return {{4, 0, 25739.99}, {5, 0, 33200.67}, {6, 0, 36372.62}, {4, 1, 30270.0},  {5, 1, 35042.8},
          {3, 2, 29172.84}, {4, 2, 34548.75}, {5, 2, 37036.75}, {4, 3, 34586.9}, {5, 3, 37057.6}};
}

double rydberg_self_check(const std::map<int, double>& defects, std::span<const RydbergLevel> levels,
                          double ionization_cm) {
  const double rydberg_cm = 219474.6313632 / 2;
  double worst = 0;
  for (const auto& lv : levels) {
    const auto it = defects.find(lv.ell);
    if (it == defects.end()) throw std::invalid_argument("rydberg_self_check: no defect for l=" + std::to_string(lv.ell));
    const double predicted = rydberg_cm / std::pow(lv.n - it->second, 2);
    const double measured = ionization_cm - lv.term_cm;
    worst = std::max(worst, std::abs(predicted - measured) / measured);
  }
  return worst;
}

}  // namespace lft::oracle
