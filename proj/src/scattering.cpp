#include "lft/scattering.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace lft {

namespace {

using cplx = std::complex<double>;

double max_abs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

void check_channels(const Eigen::MatrixXd& K, const Eigen::VectorXd& cot_gamma) {
  if (K.rows() != K.cols() || K.rows() != cot_gamma.size())
    throw std::invalid_argument("scattering: K must be square with one cot(gamma) per channel");
}

Eigen::VectorXd tangents(const Eigen::VectorXd& delta) {
  Eigen::VectorXd t(delta.size());
  for (int j = 0; j < t.size(); ++j) t(j) = std::tan(delta(j));
  return t;
}

// U^T diag(c) U over channels
template <class Vec>
auto weighted_gram(const Eigen::MatrixXd& U, const Vec& c) {
  using Scalar = typename Vec::Scalar;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> Uc = U.cast<Scalar>();
  return Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(Uc.transpose() * c.asDiagonal() * Uc);
}

void check_finite(const Eigen::VectorXd& cot_gamma) {
  if (!cot_gamma.allFinite()) throw std::invalid_argument("scattering: cot(gamma) is not finite");
}

// smallest singular value of I - X relative to max(1, largest); the identity sets the scale
template <class Mat>
double reciprocal_condition(const Mat& A) {
  if (A.size() == 0) return 1;
  Eigen::JacobiSVD<Mat> svd(A);
  const auto& s = svd.singularValues();
  return s(s.size() - 1) / std::max(1.0, static_cast<double>(s(0)));
}

void check_resonance(double rcond, const char* where) {
  if (!(rcond > 1e-14))
    throw ResonanceSingularity(std::string(where) + ": I - cot(gamma) K is singular (rcond " + std::to_string(rcond) +
                                   "); the energy lies on a resonance",
                               rcond);
}

// T (I - U^T c U T)^-1 on the l space, before symmetrization
Eigen::MatrixXd reaction_core(const LFTMatrix& U, const Eigen::VectorXd& delta, const Eigen::VectorXd& cot_gamma) {
  if (delta.size() != U.U.cols() || cot_gamma.size() != U.U.rows())
    throw std::invalid_argument("reaction_matrix: one phase per l and one cot(gamma) per channel");
  check_finite(cot_gamma);
  const Eigen::Index nl = delta.size();
  const Eigen::VectorXd t = tangents(delta);
  const Eigen::MatrixXd B = Eigen::MatrixXd::Identity(nl, nl) - weighted_gram(U.U, cot_gamma) * t.asDiagonal();
  check_resonance(reciprocal_condition(B), "reaction_matrix");
  // from B^T M^T = T
  return B.transpose().partialPivLu().solve(Eigen::MatrixXd(t.asDiagonal())).transpose();
}

}  // namespace

Eigen::VectorXd defect_phases(const LFTMatrix& U, const std::map<int, double>& defects) {
  Eigen::VectorXd delta(U.U.cols());
  for (int j = 0; j < delta.size(); ++j) {
    const int ell = U.ell_min() + j;
    const auto it = defects.find(ell);
    if (it == defects.end()) throw ConfigError("missing quantum defect for l=" + std::to_string(ell));
    delta(j) = std::numbers::pi * it->second;
  }
  return delta;
}

Eigen::VectorXd dipole_vector(const LFTMatrix& U, const std::map<int, double>& dipoles) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(U.U.cols());
  for (const auto& [ell, val] : dipoles)
    if (ell >= U.ell_min() && ell <= U.ell_max()) d(ell - U.ell_min()) = val;
  return d;
}

Eigen::MatrixXd k_matrix(const LFTMatrix& U, const Eigen::VectorXd& delta) {
  if (delta.size() != U.U.cols()) throw std::invalid_argument("k_matrix: one phase per l");
  const Eigen::VectorXd t = tangents(delta);
  Eigen::MatrixXd K = U.U * t.asDiagonal() * U.U.transpose();
  return 0.5 * (K + K.transpose());
}

Eigen::MatrixXd reaction_matrix(const Eigen::MatrixXd& K, const Eigen::VectorXd& cot_gamma,
                                double symmetry_tolerance) {
  check_channels(K, cot_gamma);
  const Eigen::Index n = K.rows();
  if (n == 0) return K;
  check_finite(cot_gamma);
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - cot_gamma.asDiagonal() * K;
  check_resonance(reciprocal_condition(A), "reaction_matrix");
  // R = K A^-1, solved as A^T R^T = K^T
  const Eigen::MatrixXd R = A.transpose().partialPivLu().solve(K.transpose()).transpose();
  const double asym = (R - R.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, R.cwiseAbs().maxCoeff());
  if (asym > symmetry_tolerance * scale)
    throw std::logic_error("reaction_matrix: R is not symmetric (" + std::to_string(asym) + ")");
  return 0.5 * (R + R.transpose());
}

Eigen::MatrixXd reaction_matrix(const LFTMatrix& U, const Eigen::VectorXd& delta, const Eigen::VectorXd& cot_gamma,
                                double symmetry_tolerance) {
  const Eigen::MatrixXd M = reaction_core(U, delta, cot_gamma);
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if (asym > symmetry_tolerance * scale)
    throw std::logic_error("reaction_matrix: R is not symmetric (" + std::to_string(asym) + ")");
  return U.U * (0.5 * (M + M.transpose())) * U.U.transpose();
}

Eigen::MatrixXcd s_matrix(const Eigen::MatrixXd& R) {
  const Eigen::Index n = R.rows();
  const Eigen::MatrixXcd iR = cplx(0, 1) * R.cast<cplx>();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
  // (I + iR)(I - iR)^-1; the factors commute
  return (I - iR).partialPivLu().solve(I + iR);
}

Eigen::MatrixXcd s_matrix_from_k(const Eigen::MatrixXd& K, const Eigen::VectorXd& cot_gamma) {
  check_channels(K, cot_gamma);
  const Eigen::Index n = K.rows();
  const Eigen::MatrixXcd Kc = K.cast<cplx>();
  const Eigen::VectorXcd c = cot_gamma.cast<cplx>();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::VectorXcd cm = c - Eigen::VectorXcd::Constant(n, cplx(0, 1));
  const Eigen::VectorXcd cp = c + Eigen::VectorXcd::Constant(n, cplx(0, 1));
  const Eigen::MatrixXcd num = I - cm.asDiagonal() * Kc;
  const Eigen::MatrixXcd den = I - cp.asDiagonal() * Kc;
  // num den^-1 = (den^T \ num^T)^T
  return den.transpose().partialPivLu().solve(num.transpose()).transpose();
}

Eigen::MatrixXcd s_matrix_from_k(const LFTMatrix& U, const Eigen::VectorXd& delta, const Eigen::VectorXd& cot_gamma) {
  if (delta.size() != U.U.cols() || cot_gamma.size() != U.U.rows())
    throw std::invalid_argument("s_matrix_from_k: one phase per l and one cot(gamma) per channel");
  check_finite(cot_gamma);
  const Eigen::Index n = U.U.rows(), nl = delta.size();
  const Eigen::VectorXcd t = tangents(delta).cast<cplx>();
  const Eigen::VectorXcd cp = cot_gamma.cast<cplx>() + Eigen::VectorXcd::Constant(n, cplx(0, 1));
  const Eigen::MatrixXcd B = Eigen::MatrixXcd::Identity(nl, nl) - weighted_gram(U.U, cp) * t.asDiagonal();
  check_resonance(reciprocal_condition(B), "s_matrix_from_k");
  const Eigen::MatrixXcd M = B.transpose().partialPivLu().solve(Eigen::MatrixXcd(t.asDiagonal())).transpose();
  const Eigen::MatrixXcd Uc = U.U.cast<cplx>();
  return Eigen::MatrixXcd::Identity(n, n) + cplx(0, 2) * Uc * M * Uc.transpose();
}

Eigen::VectorXd dipole_reaction(const Eigen::VectorXd& d, const LFTMatrix& U, const Eigen::VectorXd& delta,
                                const Eigen::VectorXd& cot_gamma) {
  if (d.size() != U.U.cols() || delta.size() != U.U.cols())
    throw std::invalid_argument("dipole_reaction: one dipole and one phase per l");
  Eigen::VectorXd w(d.size());
  for (int j = 0; j < d.size(); ++j) {
    const double c = std::cos(delta(j));
    if (std::abs(c) < 1e-12)
      throw ConfigError("dipole_reaction: quantum defect of l=" + std::to_string(U.ell_min() + j) +
                        " gives cos(delta) = 0");
    w(j) = d(j) / c;
  }
  if (cot_gamma.size() != U.U.rows()) throw std::invalid_argument("dipole_reaction: one cot(gamma) per channel");
  check_finite(cot_gamma);
  // (I - K c)^-1 U w = U (I - T U^T c U)^-1 w
  const Eigen::VectorXd t = tangents(delta);
  const Eigen::Index nl = d.size();
  const Eigen::MatrixXd B = Eigen::MatrixXd::Identity(nl, nl) - t.asDiagonal() * weighted_gram(U.U, cot_gamma);
  check_resonance(reciprocal_condition(B), "dipole_reaction");
  return U.U * B.partialPivLu().solve(w);
}

Eigen::VectorXcd dipole_incoming(const Eigen::VectorXd& D_R, const Eigen::MatrixXd& R) {
  const Eigen::Index n = R.rows();
  if (D_R.size() != n) throw std::invalid_argument("dipole_incoming: size mismatch");
  const Eigen::MatrixXcd B = Eigen::MatrixXcd::Identity(n, n) - cplx(0, 1) * R.cast<cplx>();
  // row D (I - iR)^-1 -> column (I - iR)^-T D
  return B.transpose().partialPivLu().solve(D_R.cast<cplx>());
}

ScatteringSet assemble_scattering(const LFTMatrix& U, const std::map<int, double>& defects,
                                  const std::map<int, double>& dipoles, const Eigen::VectorXd& cot_gamma,
                                  double tolerance) {
  ScatteringSet s;
  s.delta = defect_phases(U, defects);
  s.d_ell = dipole_vector(U, dipoles);
  s.cot_gamma = cot_gamma;
  s.K = k_matrix(U, s.delta);
  const Eigen::MatrixXd M = reaction_core(U, s.delta, cot_gamma);
  const Eigen::Index n = U.U.rows();
  s.symmetry_error = n ? (U.U * (M - M.transpose()) * U.U.transpose()).cwiseAbs().maxCoeff() : 0.0;
  s.R = reaction_matrix(U, s.delta, cot_gamma, tolerance);
  s.S = s_matrix(s.R);
  const Eigen::MatrixXcd S2 = s_matrix_from_k(U, s.delta, cot_gamma);
  s.unitarity_error = max_abs(s.S * s.S.adjoint() - Eigen::MatrixXcd::Identity(n, n));
  s.form_difference = max_abs(s.S - S2);
  if (s.form_difference > tolerance)
    throw std::logic_error("assemble_scattering: the two S-matrix forms differ by " +
                           std::to_string(s.form_difference));
  s.D_R = dipole_reaction(s.d_ell, U, s.delta, cot_gamma);
  s.D_minus = dipole_incoming(s.D_R, s.R);
  return s;
}

}  // namespace lft
