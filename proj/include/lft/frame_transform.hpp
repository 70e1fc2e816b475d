#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "lft/eta_channels.hpp"
#include "lft/problem.hpp"
#include "lft/xi_channels.hpp"

namespace lft {

class ContinuationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IllConditionedMapping : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Local frame transformation U(n1, l): rows follow the supplied channels, column j is l = |m| + j.
struct LFTMatrix {
  Eigen::MatrixXd U;
  int m = 0;
  double energy = 0, field = 0;
  std::complex<double> nu;
  std::vector<int> n1;
  std::vector<double> beta;
  double max_imag_residue = 0;  // largest |Im|/magnitude met while taking the real part

  int ell_min() const { return m; }
  int ell_max() const { return m + static_cast<int>(U.cols()) - 1; }
  // Column of angular momentum l; throws std::out_of_range outside [|m|, ell_max].
  Eigen::VectorXd column(int ell) const;
};

// nu = 1/sqrt(-2 eps), continued to i/sqrt(2 eps) above threshold.
std::complex<double> lft_nu(double energy);

// Angular part of U without the amplitude ratio N_xi N_eta / N_el (complex for eps > 0).
// scale receives sum |term| over the finite sum, for judging cancellation.
std::complex<double> lft_angular_factor(double beta, int ell, int m, std::complex<double> nu, double* scale = nullptr);

// U from the xi channels and ln N_eta per channel (same order).  Requires l_max >= |m|.
LFTMatrix lft_matrix(const ProblemSpec& spec, std::span<const XiChannel> xi, std::span<const double> log_n_eta,
                     int ell_max, double imag_tolerance = 1e-10);

// Coefficients c with sum_l a_l f_l / r = sum_n c_n psi_n, c = (U^T)^+ a.
struct ParabolicExpansion {
  Eigen::VectorXd coefficients;
  double residual = 0;   // max |U^T (U^T)^+ - I| on the l subspace
  double condition = 0;  // singular-value ratio of U
};
ParabolicExpansion map_regular_to_parabolic(const LFTMatrix& U, const Eigen::VectorXd& spherical,
                                            double max_condition = 1e12);
// (U^T)^+ itself, rows n1, columns l.
Eigen::MatrixXd inverse_transpose(const LFTMatrix& U, double max_condition = 1e12, double* residual = nullptr);

struct CoulombPoint {
  double r = 0, theta = 0;
  double xi() const;
  double eta() const;
};

// psi_n and chi_n (phi = 0) from the channel functions.
double parabolic_regular(const XiChannel& xi, const EtaSolutionPair& eta, const CoulombPoint& pt);
double parabolic_irregular(const XiChannel& xi, const EtaSolutionPair& eta, const CoulombPoint& pt);

// f_l Y_lm / r and g_l Y_lm / r at phi = 0 for the energy-normalized spherical pair.
struct SphericalValue {
  double f = 0, g = 0;
};
std::vector<SphericalValue> spherical_pair_values(double energy, int ell, int m, std::span<const CoulombPoint> pts);

enum class ChiSource { automatic, field_free, numeric };

struct ReconstructOptions {
  ChiSource source = ChiSource::field_free;
  double field_free_threshold = 1e-6;  // automatic: field-free eta functions while F r^2 is below this
  double coulomb_zone = 0.1;           // warning when r sqrt(F) exceeds this
};

struct IrregularReconstruction {
  std::vector<double> g_lft;       // g^LFT / r
  std::vector<double> g_analytic;  // g Y / r
  std::vector<double> rel_err;     // |difference| / (|Y| sqrt(f^2 + g^2) / r)
  std::vector<bool> outside_zone;
  int channels_used = 0;
};
// sum_n chi_n csc(gamma_n) U_nl over the supplied channels (at eps < 0 only beta < 1 contributes).
// The product csc(gamma) U Upsilon_bar is formed as (N_xi N_f / N_el) K_l Upsilon_bar_raw, in which the
// exponentially large and small amplitudes of deep channels cancel analytically.
IrregularReconstruction reconstruct_irregular_spherical(const ProblemSpec& spec, std::span<const XiChannel> xi,
                                                        std::span<const EtaSolutionPair> eta, int ell,
                                                        std::span<const CoulombPoint> pts,
                                                        const ReconstructOptions& opt = {});

struct PhaseBound {
  double value = 0;
  bool valid = true;  // F r^2 small
};
// Field-induced phase -(sqrt 2 / 5) F r^(5/2) cos(theta) of a zero-energy electron.
PhaseBound phase_uniformity_bound(double field, double r, double theta);

}  // namespace lft
