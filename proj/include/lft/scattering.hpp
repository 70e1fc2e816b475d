#pragma once

#include <map>
#include <stdexcept>

#include <Eigen/Dense>

#include "lft/frame_transform.hpp"
#include "lft/problem.hpp"

namespace lft {

// Resolvent I - cot(gamma) K is singular: the energy sits on a barrier-pinned resonance.
class ResonanceSingularity : public std::runtime_error {
 public:
  ResonanceSingularity(const std::string& what, double rcond) : std::runtime_error(what), rcond_(rcond) {}
  double rcond() const { return rcond_; }

 private:
  double rcond_;
};

// delta_l = pi mu_l over the columns of U; every l in [|m|, l_max] must have a defect.
Eigen::VectorXd defect_phases(const LFTMatrix& U, const std::map<int, double>& defects);
// d_l over the columns of U (missing l contribute zero).
Eigen::VectorXd dipole_vector(const LFTMatrix& U, const std::map<int, double>& dipoles);

// K = U tan(delta) U^T
Eigen::MatrixXd k_matrix(const LFTMatrix& U, const Eigen::VectorXd& delta);

// R = K (I - cot(gamma) K)^-1, with cot(gamma) diagonal over channels.
Eigen::MatrixXd reaction_matrix(const Eigen::MatrixXd& K, const Eigen::VectorXd& cot_gamma,
                                double symmetry_tolerance = 1e-10);

// Same R through the channel-space identity K (I - c K)^-1 = U T (I - U^T c U T)^-1 U^T, T = tan(delta).
// Only an l x l system is solved, so channels with cot(gamma) ~ 1e90 and U ~ 1e-45 stay well scaled.
Eigen::MatrixXd reaction_matrix(const LFTMatrix& U, const Eigen::VectorXd& delta, const Eigen::VectorXd& cot_gamma,
                                double symmetry_tolerance = 1e-10);

// S = (I + iR)(I - iR)^-1
Eigen::MatrixXcd s_matrix(const Eigen::MatrixXd& R);
// S = [I - (cot(gamma) - i) K][I - (cot(gamma) + i) K]^-1
Eigen::MatrixXcd s_matrix_from_k(const Eigen::MatrixXd& K, const Eigen::VectorXd& cot_gamma);
// The same, written as I + 2i U T (I - U^T (cot(gamma) + i) U T)^-1 U^T.
Eigen::MatrixXcd s_matrix_from_k(const LFTMatrix& U, const Eigen::VectorXd& delta, const Eigen::VectorXd& cot_gamma);

// D^R = d^T cos(delta)^-1 U^T (I - cot(gamma) K)^-1, returned as a column over channels.
Eigen::VectorXd dipole_reaction(const Eigen::VectorXd& d, const LFTMatrix& U, const Eigen::VectorXd& delta,
                                const Eigen::VectorXd& cot_gamma);
// D^- = D^R (I - iR)^-1
Eigen::VectorXcd dipole_incoming(const Eigen::VectorXd& D_R, const Eigen::MatrixXd& R);

struct ScatteringSet {
  Eigen::MatrixXd K, R;
  Eigen::MatrixXcd S;
  Eigen::VectorXd delta, cot_gamma, d_ell;
  Eigen::VectorXd D_R;
  Eigen::VectorXcd D_minus;
  double symmetry_error = 0;   // max |R - R^T|
  double unitarity_error = 0;  // max |S S^dagger - I|
  double form_difference = 0;  // max |S - S(K, cot gamma)|
};

// Everything at one energy; throws std::logic_error when the two S forms disagree beyond tolerance.
ScatteringSet assemble_scattering(const LFTMatrix& U, const std::map<int, double>& defects,
                                  const std::map<int, double>& dipoles, const Eigen::VectorXd& cot_gamma,
                                  double tolerance = 1e-10);

}  // namespace lft
