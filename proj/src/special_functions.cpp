#include "lft/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/float128.hpp>

#include "lft/field_free.hpp"

namespace lft {

ScaledOverflow::ScaledOverflow(double log_abs, int sign)
    : std::overflow_error("value outside double range (ln|v| = " + std::to_string(log_abs) + ")"),
      log_abs_(log_abs),
      sign_(sign) {}

namespace {

using quad = boost::multiprecision::float128;
using std::numbers::pi;

constexpr std::array<double, 9> lanczos_coef = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

bool is_pole(std::complex<double> z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

bool is_nonpositive_integer(quad b) { return b <= 0 && b == floor(b); }

quad rgamma(quad b) {
  if (is_nonpositive_integer(b)) return 0;
  return 1 / boost::math::tgamma(b);
}

// Power series, x >= 0.  Terms recur as t_{k+1} = t_k (a+k) x / ((k+1)(b+k)).
quad hyp1f1_reg_series(quad a, quad b, quad x) {
  int k0 = 0;
  quad term;
  if (is_nonpositive_integer(b)) {
    // leading terms vanish identically; first survivor has Gamma(b+k0) = Gamma(1)
    k0 = static_cast<int>(-b) + 1;
    term = 1;
    for (int j = 0; j < k0; ++j) term *= (a + j) * x / (j + 1);
  } else {
    term = rgamma(b);
  }
  quad sum = term;
  const quad eps = std::numeric_limits<quad>::epsilon();
  int small_run = 0;
  for (int k = k0; k < 200000; ++k) {
    term *= (a + k) * x / ((k + 1) * (b + k));
    sum += term;
    if (term == 0) return sum;
    if (abs(term) <= eps * abs(sum) && k > abs(a) && k > x) {
      if (++small_run >= 3) return sum;
    } else {
      small_run = 0;
    }
  }
  throw std::runtime_error("regularized_1f1: series did not converge");
}

quad hyp1f1_reg_q(quad a, quad b, quad x) {
  if (x < 0) return exp(x) * hyp1f1_reg_series(b - a, b, -x);
  return hyp1f1_reg_series(a, b, x);
}

// lnA and its lambda-derivative; A must be positive for the pair to be real.
void log_amplitude(quad nubar, quad mu, quad& ln_a, quad& dln_a) {
  int s1 = 1, s2 = 1;
  quad l1 = boost::math::lgamma(mu + nubar + 1, &s1);
  quad l2 = boost::math::lgamma(nubar - mu, &s2);
  if (s1 * s2 < 0)
    throw DomainError("A(nubar, lambda) is negative: the smooth pair acquires imaginary parts");
  ln_a = l1 - (2 * mu + 1) * log(nubar) - l2;
  dln_a = boost::math::digamma(mu + nubar + 1) - 2 * log(nubar) + boost::math::digamma(nubar - mu);
}

struct RegularParts {
  quad f, fp, df, dfp;
};

// f_mu(zeta) = A^(1/2) 2^(mu+1/2) zeta^(mu+1) e^(-zeta/nubar) 1F1reg(mu-nubar+1; 2mu+2; 2zeta/nubar)
// with its zeta-derivative and, optionally, both mu-derivatives.
RegularParts smooth_regular(quad nubar, quad mu, quad zeta, bool with_mu_derivative) {
  quad ln_a, dln_a;
  log_amplitude(nubar, mu, ln_a, dln_a);
  const quad x = 2 * zeta / nubar;
  const quad a = mu - nubar + 1;
  const quad b = 2 * mu + 2;
  const quad pref = exp(ln_a / 2 + (mu + quad(0.5)) * log(quad(2)) + (mu + 1) * log(zeta) - zeta / nubar);
  const quad m0 = hyp1f1_reg_q(a, b, x);
  const quad m1 = hyp1f1_reg_q(a + 1, b + 1, x);
  const quad c = (mu + 1) / zeta - 1 / nubar;
  RegularParts out{};
  out.f = pref * m0;
  out.fp = pref * (c * m0 + 2 / nubar * a * m1);
  if (!with_mu_derivative) return out;

  // Richardson-extrapolated central differences of the hypergeometric factors only
  auto m_of = [&](quad s, int shift) { return hyp1f1_reg_q(s - nubar + 1 + shift, 2 * s + 2 + shift, x); };
  auto dm = [&](int shift) {
    const quad h = quad(1e-5);
    quad d1 = (m_of(mu + h, shift) - m_of(mu - h, shift)) / (2 * h);
    quad d2 = (m_of(mu + h / 2, shift) - m_of(mu - h / 2, shift)) / h;
    return (4 * d2 - d1) / 3;
  };
  const quad dm0 = dm(0);
  const quad dm1 = dm(1);
  const quad lpre = dln_a / 2 + log(quad(2)) + log(zeta);
  out.df = lpre * out.f + pref * dm0;
  out.dfp = lpre * out.fp + pref * (m0 / zeta + c * dm0 + 2 / nubar * (m1 + a * dm1));
  return out;
}

void check_grid(std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0)) throw DomainError("grid values must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("grid must be strictly increasing");
  }
}

bool twice_integral(double lambda) { return std::abs(2 * lambda - std::round(2 * lambda)) < 1e-12; }

}  // namespace

std::complex<double> ln_gamma(std::complex<double> z) {
  if (is_pole(z)) throw DomainError("ln_gamma: pole of Gamma at nonpositive integer");
  std::complex<double> shift = 0;
  if (z.real() < 0.5) {
    const int n = static_cast<int>(std::ceil(0.5 - z.real()));
    for (int j = 0; j < n; ++j) shift += std::log(z + double(j));
    z += double(n);
  }
  z -= 1.0;
  std::complex<double> s = lanczos_coef[0];
  for (std::size_t i = 1; i < lanczos_coef.size(); ++i) s += lanczos_coef[i] / (z + double(i));
  const std::complex<double> t = z + 7.5;
  return 0.5 * std::log(2 * pi) + (z + 0.5) * std::log(t) - t + std::log(s) - shift;
}

std::complex<double> gamma_ratio(std::complex<double> z, std::complex<double> w) {
  if (is_pole(w)) {
    if (is_pole(z)) throw DomainError("gamma_ratio: both arguments on poles");
    return 0.0;
  }
  return std::exp(ln_gamma(z) - ln_gamma(w));
}

double regularized_1f1(double a, double b, double x) {
  const quad v = hyp1f1_reg_q(a, b, x);
  if (!isfinite(v)) throw std::runtime_error("regularized_1f1: non-finite result");
  if (abs(v) > std::numeric_limits<double>::max())
    throw ScaledOverflow(static_cast<double>(log(abs(v))), v < 0 ? -1 : 1);
  return static_cast<double>(v);
}

double smooth_amplitude(double nubar, double lambda) {
  quad ln_a, d;
  log_amplitude(nubar, lambda, ln_a, d);
  return static_cast<double>(exp(ln_a));
}

PairValue smooth_pair_value(double energy_bar, double lambda, double zeta) {
  if (!(energy_bar < 0)) throw DomainError("smooth Coulomb pair requires negative scaled energy");
  if (!(zeta > 0)) throw DomainError("smooth Coulomb pair requires zeta > 0");
  if (!twice_integral(lambda)) return smooth_pair_general(energy_bar, lambda, zeta);
  const double lc = std::round(2 * lambda) / 2;
  const quad nubar = 1 / sqrt(-quad(energy_bar));
  const RegularParts reg = smooth_regular(nubar, lc, zeta, true);
  // mu = -lambda-1 branch; d/dlambda f_{-lambda-1} = -(d/dmu f_mu)
  const RegularParts mir = smooth_regular(nubar, -quad(lc) - 1, zeta, true);
  const quad cos_c = (static_cast<long>(std::llround(2 * lc + 1)) % 2 == 0) ? 1 : -1;
  const quad two_pi = 2 * boost::math::constants::pi<quad>();
  PairValue out;
  out.f = static_cast<double>(reg.f);
  out.fp = static_cast<double>(reg.fp);
  out.g = static_cast<double>((reg.df + mir.df / cos_c) / two_pi);
  out.gp = static_cast<double>((reg.dfp + mir.dfp / cos_c) / two_pi);
  return out;
}

PairValue smooth_pair_general(double energy_bar, double lambda, double zeta) {
  if (!(energy_bar < 0)) throw DomainError("smooth Coulomb pair requires negative scaled energy");
  const quad nubar = 1 / sqrt(-quad(energy_bar));
  const quad th = (2 * quad(lambda) + 1) * boost::math::constants::pi<quad>();
  const quad s = sin(th);
  if (abs(s) < 1e-30) throw DomainError("general-lambda Coulomb pair is singular at 2*lambda integral");
  const RegularParts reg = smooth_regular(nubar, lambda, zeta, false);
  const RegularParts mir = smooth_regular(nubar, -quad(lambda) - 1, zeta, false);
  const quad cot = cos(th) / s;
  PairValue out;
  out.f = static_cast<double>(reg.f);
  out.fp = static_cast<double>(reg.fp);
  out.g = static_cast<double>(reg.f * cot - mir.f / s);
  out.gp = static_cast<double>(reg.fp * cot - mir.fp / s);
  return out;
}

CoulombPair coulomb_pair_half_integer(double energy_bar, double lambda, std::span<const double> zeta_grid) {
  if (!(energy_bar < 0)) throw DomainError("coulomb_pair_half_integer: positive scaled energy is not supported");
  check_grid(zeta_grid);
  CoulombPair p;
  p.grid.assign(zeta_grid.begin(), zeta_grid.end());
  p.energy = energy_bar;
  p.ell_or_lambda = lambda;
  p.charge_like = 1;
  for (double z : zeta_grid) {
    const PairValue v = smooth_pair_value(energy_bar, lambda, z);
    p.f_vals.push_back(v.f);
    p.f_deriv.push_back(v.fp);
    p.g_vals.push_back(v.g);
    p.g_deriv.push_back(v.gp);
  }
  return p;
}

CoulombPair coulomb_pair_spherical(double energy, int ell, std::span<const double> grid) {
  if (energy == 0) throw DomainError("coulomb_pair_spherical: zero energy");
  if (ell < 0) throw DomainError("coulomb_pair_spherical: negative ell");
  check_grid(grid);
  CoulombPair p;
  p.grid.assign(grid.begin(), grid.end());
  p.energy = energy;
  p.ell_or_lambda = ell;
  p.charge_like = 1;
  std::vector<PairValue> vals;
  if (energy < 0) {
    for (double r : grid) {
      PairValue v = smooth_pair_value(2 * energy, ell, r);
      vals.push_back({std::sqrt(2.0) * v.f, std::sqrt(2.0) * v.fp, std::sqrt(2.0) * v.g, std::sqrt(2.0) * v.gp});
    }
  } else {
    vals = StandingCoulomb(energy, 1.0, ell).evaluate(grid);
  }
  for (const auto& v : vals) {
    p.f_vals.push_back(v.f);
    p.f_deriv.push_back(v.fp);
    p.g_vals.push_back(v.g);
    p.g_deriv.push_back(v.gp);
  }
  return p;
}

double spherical_normalization(double energy, int ell) {
  if (energy == 0) throw DomainError("spherical_normalization: zero energy");
  if (energy < 0) {
    const double nu = 1 / std::sqrt(-2 * energy);
    return std::exp((ell + 1) * std::log(2.0) - std::lgamma(2.0 * ell + 2)) * std::sqrt(smooth_amplitude(nu, ell));
  }
  return std::exp(StandingCoulomb(energy, 1.0, ell).log_norm());
}

}  // namespace lft
