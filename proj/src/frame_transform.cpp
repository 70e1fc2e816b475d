#include "lft/frame_transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/spherical_harmonic.hpp>

#include "lft/field_free.hpp"
#include "lft/special_functions.hpp"

namespace lft {

namespace {

using std::numbers::pi;
using cplx = std::complex<double>;

double log_factorial(int n) { return std::lgamma(n + 1.0); }

void check_ell(int ell, int m) {
  if (ell < std::abs(m)) throw std::out_of_range("angular momentum l=" + std::to_string(ell) + " below |m|");
}

}  // namespace

Eigen::VectorXd LFTMatrix::column(int ell) const {
  if (ell < ell_min() || ell > ell_max()) throw std::out_of_range("LFTMatrix: l outside the computed range");
  return U.col(ell - ell_min());
}

cplx lft_nu(double energy) {
  if (energy == 0) throw DomainError("lft_nu: zero energy");
  if (energy < 0) return {1 / std::sqrt(-2 * energy), 0.0};
  return {0.0, 1 / std::sqrt(2 * energy)};
}

cplx lft_angular_factor(double beta, int ell, int m, cplx nu, double* scale) {
  m = std::abs(m);
  check_ell(ell, m);
  // extended precision: the terms cancel strongly at large l above threshold
  using lcplx = std::complex<long double>;
  const lcplx nul(nu.real(), nu.imag());
  const lcplx n = static_cast<long double>(beta) * nul - 0.5L - m / 2.0L;
  // Gamma(n+1)/Gamma(n+1-k) and Gamma(a)/Gamma(a-J) are finite products; they vanish exactly
  // at the integer poles of the denominators.
  const double log_pref = 0.5 * std::log(4.0 * ell + 2) + 2 * log_factorial(m) -
                          (log_factorial(2 * ell + 1) - ell * std::log(2.0) - log_factorial(ell)) -
                          0.5 * (log_factorial(ell + m) + log_factorial(ell - m));
  const double pref = (m % 2 ? -1.0 : 1.0) * std::exp(log_pref);
  const lcplx nu_pow = std::pow(nul, static_cast<long double>(m - ell));
  const lcplx a = nul - n - static_cast<long double>(m);
  lcplx sum = 0;
  long double abs_sum = 0;
  for (int k = 0; k <= ell - m; ++k) {
    lcplx falling = 1;
    for (int j = 0; j < k; ++j) falling *= n - static_cast<long double>(j);
    lcplx tail = 1;
    for (int j = 1; j <= ell - m - k; ++j) tail *= a - static_cast<long double>(j);
    const long double binom = boost::math::binomial_coefficient<long double>(ell - m, k) *
                              boost::math::binomial_coefficient<long double>(ell + m, ell - k);
    const lcplx term = (k % 2 ? -1.0L : 1.0L) * binom * nu_pow * falling * tail;
    sum += term;
    abs_sum += std::abs(term);
  }
  if (scale) *scale = std::abs(pref) * static_cast<double>(abs_sum);
  const lcplx out = static_cast<long double>(pref) * sum;
  return {static_cast<double>(out.real()), static_cast<double>(out.imag())};
}

LFTMatrix lft_matrix(const ProblemSpec& spec, std::span<const XiChannel> xi, std::span<const double> log_n_eta,
                     int ell_max, double imag_tolerance) {
  const int m = std::abs(spec.m);
  check_ell(ell_max, m);
  if (xi.size() != log_n_eta.size()) throw std::invalid_argument("lft_matrix: one N_eta per channel required");
  LFTMatrix out;
  out.m = m;
  out.energy = spec.energy;
  out.field = spec.field;
  out.nu = lft_nu(spec.energy);
  const int nl = ell_max - m + 1;
  out.U = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(xi.size()), nl);
  std::vector<double> log_nl(nl);
  for (int j = 0; j < nl; ++j) log_nl[j] = std::log(spherical_normalization(spec.energy, m + j));
  for (std::size_t i = 0; i < xi.size(); ++i) {
    out.n1.push_back(xi[i].n1);
    out.beta.push_back(xi[i].beta);
    if (!(xi[i].N_xi > 0)) throw std::invalid_argument("lft_matrix: N_xi must be positive");
    for (int j = 0; j < nl; ++j) {
      double scale = 0;
      const cplx K = lft_angular_factor(xi[i].beta, m + j, m, out.nu, &scale);
      if (std::abs(K) > 1e-12 * scale) {
        const double residue = std::abs(K.imag()) / std::abs(K);
        out.max_imag_residue = std::max(out.max_imag_residue, residue);
        if (residue > imag_tolerance)
          throw ContinuationFailure("lft_matrix: imaginary residue " + std::to_string(residue) + " at n1=" +
                                    std::to_string(xi[i].n1) + ", l=" + std::to_string(m + j));
      }
      const double amp = std::exp(std::log(xi[i].N_xi) + log_n_eta[i] - log_nl[j]);
      out.U(static_cast<Eigen::Index>(i), j) = amp * K.real();
    }
  }
  return out;
}

Eigen::MatrixXd inverse_transpose(const LFTMatrix& U, double max_condition, double* residual) {
  const Eigen::MatrixXd Ut = U.U.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ut, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0) throw IllConditionedMapping("inverse_transpose: U vanishes");
  const double cond = s(0) / s(s.size() - 1);
  if (!(cond <= max_condition))
    throw IllConditionedMapping("inverse_transpose: U is rank deficient (condition " + std::to_string(cond) + ")");
  const Eigen::MatrixXd X = svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
  if (residual) {
    const Eigen::MatrixXd id = Ut * X;
    *residual = (id - Eigen::MatrixXd::Identity(id.rows(), id.cols())).cwiseAbs().maxCoeff();
  }
  return X;
}

ParabolicExpansion map_regular_to_parabolic(const LFTMatrix& U, const Eigen::VectorXd& spherical,
                                            double max_condition) {
  if (spherical.size() != U.U.cols()) throw std::invalid_argument("map_regular_to_parabolic: one amplitude per l");
  ParabolicExpansion out;
  const Eigen::MatrixXd X = inverse_transpose(U, max_condition, &out.residual);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(U.U);
  const auto& s = svd.singularValues();
  out.condition = s(0) / s(s.size() - 1);
  out.coefficients = X * spherical;
  return out;
}

double CoulombPoint::xi() const { return r * (1 + std::cos(theta)); }
double CoulombPoint::eta() const { return r * (1 - std::cos(theta)); }

double parabolic_regular(const XiChannel& xi, const EtaSolutionPair& eta, const CoulombPoint& pt) {
  const double e = pt.eta();
  return xi.v(pt.xi()).f * eta.at(e).f / std::sqrt(e) / std::sqrt(2 * pi);
}

double parabolic_irregular(const XiChannel& xi, const EtaSolutionPair& eta, const CoulombPoint& pt) {
  const double e = pt.eta();
  return xi.v(pt.xi()).f * eta.at(e).g / std::sqrt(e) / std::sqrt(2 * pi);
}

std::vector<SphericalValue> spherical_pair_values(double energy, int ell, int m, std::span<const CoulombPoint> pts) {
  check_ell(ell, m);
  std::vector<double> rs;
  for (const auto& p : pts) rs.push_back(p.r);
  std::vector<std::size_t> idx(rs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return rs[a] < rs[b]; });
  std::vector<double> sorted;
  for (std::size_t i : idx) sorted.push_back(rs[i]);
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const CoulombPair pair = coulomb_pair_spherical(energy, ell, sorted);
  std::vector<SphericalValue> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto j = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), pts[i].r) - sorted.begin());
    const double Y = boost::math::spherical_harmonic_r(ell, std::abs(m), pts[i].theta, 0.0);
    out[i] = {pair.f_vals[j] * Y / pts[i].r, pair.g_vals[j] * Y / pts[i].r};
  }
  return out;
}

IrregularReconstruction reconstruct_irregular_spherical(const ProblemSpec& spec, std::span<const XiChannel> xi,
                                                        std::span<const EtaSolutionPair> eta, int ell,
                                                        std::span<const CoulombPoint> pts,
                                                        const ReconstructOptions& opt) {
  const int m = std::abs(spec.m);
  check_ell(ell, m);
  if (opt.source != ChiSource::field_free && eta.size() != xi.size())
    throw std::invalid_argument("reconstruct_irregular_spherical: one eta pair per xi channel required");
  IrregularReconstruction out;
  const std::size_t np = pts.size();
  out.g_lft.assign(np, 0.0);
  out.outside_zone.assign(np, false);
  for (std::size_t p = 0; p < np; ++p) out.outside_zone[p] = pts[p].r * std::sqrt(spec.field) > opt.coulomb_zone;

  std::vector<bool> use_numeric(np, false);
  for (std::size_t p = 0; p < np; ++p) {
    switch (opt.source) {
      case ChiSource::field_free: break;
      case ChiSource::numeric: use_numeric[p] = true; break;
      case ChiSource::automatic:
        use_numeric[p] = spec.field * pts[p].r * pts[p].r >= opt.field_free_threshold;
        break;
    }
  }
  std::vector<double> etas(np);
  for (std::size_t p = 0; p < np; ++p) etas[p] = pts[p].eta();

  const cplx nu = lft_nu(spec.energy);
  const double log_nl = std::log(spherical_normalization(spec.energy, ell));
  for (std::size_t c = 0; c < xi.size(); ++c) {
    const double beta = xi[c].beta;
    if (spec.energy < 0 && !(beta < 1)) continue;
    ++out.channels_used;
    const double K = lft_angular_factor(beta, ell, m, nu).real();
    if (K == 0) continue;
    std::optional<FieldFreeEtaPair> ff;
    std::vector<PairValue> ffv;
    const bool need_ff = std::any_of(use_numeric.begin(), use_numeric.end(), [](bool b) { return !b; }) ||
                         std::any_of(etas.begin(), etas.end(), [&](double e) { return !eta.empty() && e < eta[c].eta1; });
    if (need_ff || eta.empty()) {
      ff.emplace(spec.energy, beta, m);
      ffv = ff->evaluate(etas);
    }
    const double log_nf = eta.empty() ? ff->log_nf() : eta[c].log_nf;
    const double coef = std::exp(std::log(xi[c].N_xi) + log_nf - log_nl) * K;
    for (std::size_t p = 0; p < np; ++p) {
      const double e = etas[p];
      const bool numeric = use_numeric[p] && !eta.empty() && e >= eta[c].eta1;
      const double g_raw = numeric ? eta[c].raw_at(e).g : ffv[p].g;
      out.g_lft[p] += coef * xi[c].v(pts[p].xi()).f * g_raw / std::sqrt(e) / std::sqrt(2 * pi);
    }
  }

  const auto sph = spherical_pair_values(spec.energy, ell, m, pts);
  out.g_analytic.resize(np);
  out.rel_err.resize(np);
  for (std::size_t p = 0; p < np; ++p) {
    out.g_analytic[p] = sph[p].g;
    const double env = std::hypot(sph[p].f, sph[p].g);
    out.rel_err[p] = std::abs(out.g_lft[p] - sph[p].g) / env;
  }
  return out;
}

PhaseBound phase_uniformity_bound(double field, double r, double theta) {
  return {-(std::sqrt(2.0) / 5) * field * std::pow(r, 2.5) * std::cos(theta), field * r * r < 1e-2};
}

}  // namespace lft
