#pragma once

#include <complex>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

namespace lft::oracle {

// |k h| above the Numerov stability bound.
class AccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrix : public std::runtime_error {
 public:
  SingularMatrix(const std::string& what, double condition) : std::runtime_error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

// psi'' + q(x) psi = 0 on the uniform grid x0 + i h, i = 0..steps.  For an inward run h < 0.
struct OdeProblem {
  std::function<double(double)> q;
  double x0 = 0, h = 0;
  int steps = 0;
  double psi0 = 0, dpsi0 = 0;
  double max_kh = 0.5;
};

struct OdeSolution {
  std::vector<double> x, psi;
};

// Fourth-order Numerov recursion; the first step comes from RK4 substeps.
OdeSolution numerov_integrate(const OdeProblem& problem);

// n-th bound state of psi'' + 2 (E - V) psi = 0 on [a, b] by bisection on the node count.
double shooting_eigenvalue(const std::function<double(double)>& V, double a, double b, int steps, int n, double e_lo,
                           double e_hi, double tolerance = 1e-12);

// Zeros of f on (a, b) found by scanning `samples` cells and bisecting sign changes.
std::vector<double> bisection_roots(const std::function<double(double)>& f, double a, double b, int samples = 20000);

using hp = boost::multiprecision::cpp_bin_float_50;
using HPMatrix = Eigen::Matrix<hp, Eigen::Dynamic, Eigen::Dynamic>;

HPMatrix to_hp(const Eigen::MatrixXd& a);
Eigen::MatrixXd to_double(const HPMatrix& a);

// Gauss-Jordan with full pivoting in 50 digits.  Dimension at most 32 (complex problems are embedded
// as real 2n x 2n blocks).
HPMatrix highprec_inverse(const HPMatrix& a);
HPMatrix highprec_solve(const HPMatrix& a, const HPMatrix& b);
// Cyclic Jacobi; eigenvalues ascending.
std::vector<hp> highprec_symmetric_eigenvalues(const HPMatrix& a);
// max |H H^-1 - I| for the n x n Hilbert matrix.
hp hilbert_residual(int n);

// Complex n x n matrices carried as (real, imaginary) parts.
struct HPComplex {
  HPMatrix re, im;
};
HPComplex highprec_complex_inverse(const HPComplex& a);

// Scattering quantities in 50 digits, following their defining formulas directly.
Eigen::MatrixXd hp_reaction_matrix(const Eigen::MatrixXd& K, const Eigen::VectorXd& cot_gamma);
Eigen::MatrixXcd hp_s_matrix(const Eigen::MatrixXd& R);
Eigen::VectorXd hp_dipole_reaction(const Eigen::VectorXd& d, const Eigen::MatrixXd& U, const Eigen::VectorXd& delta,
                                   const Eigen::VectorXd& cot_gamma);
Eigen::VectorXcd hp_dipole_incoming(const Eigen::VectorXd& D_R, const Eigen::MatrixXd& R);
// R = (U^-T cot(delta) U^-1 - cot(gamma))^-1 for square U; small well-conditioned cases only.
Eigen::MatrixXd hp_reaction_matrix_via_inverse(const Eigen::MatrixXd& U, const Eigen::VectorXd& delta,
                                               const Eigen::VectorXd& cot_gamma);

// Smooth Coulomb pair member f_mu in 50 digits and the irregular partner at 2 lambda integral,
// obtained by averaging the general-lambda form at lambda_c +- h.
struct HPPair {
  double f = 0, g = 0;
};
double hp_smooth_regular(double energy_bar, double mu, double zeta);
HPPair hp_irregular_extrapolated(double energy_bar, double lambda_c, double zeta, double h = 1e-5);

// Hydrogen closed forms.
// R_nl(r), normalized to int R^2 r^2 dr = 1.
double hydrogen_radial(int n, int ell, double r);
// Parabolic bound state Xi(xi) Upsilon(eta) / sqrt(xi eta) * e^{i m phi}/sqrt(2 pi) at phi = 0, normalized in 3D.
double hydrogen_parabolic(int n, int n1, int m, double xi, double eta);

struct OverlapCheck {
  double overlap = 0;          // <R_nl Y_lm | parabolic state> by quadrature
  double amplitude_ratio = 0;  // N_xi N_eta / N_l from the closed forms
};
// F = 0 bound hydrogen states: U_{n1 l} should equal amplitude_ratio times the angular factor.
OverlapCheck zero_field_overlap(int n, int n1, int m, int ell);

// Field-free Rydberg check: binding of -1/(2 (n - mu)^2) against tabulated sodium terms.
struct RydbergLevel {
  int n;
  int ell;
  double term_cm;  // above the ground state
};
std::vector<RydbergLevel> sodium_levels();
inline constexpr double sodium_ionization_cm = 41449.451;
// Largest relative deviation of the predicted binding energies.
double rydberg_self_check(const std::map<int, double>& defects, std::span<const RydbergLevel> levels,
                          double ionization_cm = sodium_ionization_cm);

}  // namespace lft::oracle
