#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace lft {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Thrown when a value is finite but outside double range; carries ln|value| and its sign.
class ScaledOverflow : public std::overflow_error {
 public:
  ScaledOverflow(double log_abs, int sign);
  double log_abs() const { return log_abs_; }
  int sign() const { return sign_; }

 private:
  double log_abs_;
  int sign_;
};

std::complex<double> ln_gamma(std::complex<double> z);

// Gamma(z)/Gamma(w) via log-Gamma; exactly zero when w sits on a pole and z does not.
std::complex<double> gamma_ratio(std::complex<double> z, std::complex<double> w);

// 1F1(a;b;x)/Gamma(b), finite for nonpositive integer b.
double regularized_1f1(double a, double b, double x);

// A(nubar, lambda) = Gamma(lambda+nubar+1) / (nubar^(2 lambda+1) Gamma(nubar-lambda))
double smooth_amplitude(double nubar, double lambda);

struct PairValue {
  double f = 0, fp = 0, g = 0, gp = 0;
  double wronskian() const { return f * gp - fp * g; }
};

struct CoulombPair {
  std::vector<double> grid;
  std::vector<double> f_vals, g_vals;
  std::vector<double> f_deriv, g_deriv;
  double energy = 0;
  double ell_or_lambda = 0;
  double charge_like = 1;

  std::size_t size() const { return grid.size(); }
  double wronskian(std::size_t i) const { return f_vals[i] * g_deriv[i] - f_deriv[i] * g_vals[i]; }
};

// Energy-normalized Coulomb pair for u'' + (2E + 2/r - l(l+1)/r^2) u = 0 with W[f,g] = 2/pi.
// E < 0: smooth pair (relative phase pi/2 near the origin).  E > 0: standing-wave pair
// (relative phase pi/2 asymptotically), generated numerically.
CoulombPair coulomb_pair_spherical(double energy, int ell, std::span<const double> grid);

// Small-r coefficient N in f = N r^(l+1) [1 + O(r)] for the pair above.
double spherical_normalization(double energy, int ell);

// Smooth pair of f'' + (ebar - lambda(lambda+1)/zeta^2 + 2/zeta) f = 0, ebar < 0, W = 1/pi.
// For 2*lambda integral the irregular member is the l'Hopital limit; otherwise the general form.
CoulombPair coulomb_pair_half_integer(double energy_bar, double lambda, std::span<const double> zeta_grid);
PairValue smooth_pair_value(double energy_bar, double lambda, double zeta);

// General-lambda irregular member g = f_l cot((2l+1)pi) - f_{-l-1}/sin((2l+1)pi); undefined at 2l integral.
PairValue smooth_pair_general(double energy_bar, double lambda, double zeta);

}  // namespace lft
