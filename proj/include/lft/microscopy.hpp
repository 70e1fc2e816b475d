#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "lft/eta_channels.hpp"
#include "lft/xi_channels.hpp"

namespace lft {

// A point requested outside the tabulated xi range of a channel.
class ExtrapolationError : public DomainError {
 public:
  using DomainError::DomainError;
};

struct OutgoingValue {
  std::complex<double> psi, dpsi_dxi, dpsi_deta;
};

// X+ = (-chi + i psi)/sqrt(2) beyond the barrier for a set of channels.  Far from the atom the eta
// factor is A e^{i theta} / sqrt(2 eta) with theta = Phi + delta; Phi is carried to a reference eta once
// per channel and from there by a short Gauss rule.
class OutgoingWave {
 public:
  // eta_ref <= 0 puts the reference at the outer box edge of each channel.
  OutgoingWave(std::span<const XiChannel> xi, std::span<const EtaSolutionPair> eta, double eta_ref = 0);

  std::size_t size() const { return xi_.size(); }
  int m() const { return m_; }
  // Largest xi at which every channel is tabulated.
  double xi_limit() const { return xi_limit_; }

  // Psi_out = sum_n D_n X+_n at phi = 0, with its parabolic derivatives.
  OutgoingValue evaluate(std::span<const std::complex<double>> D, double xi, double eta) const;
  // X+ of one channel.
  OutgoingValue channel(std::size_t n, double xi, double eta) const;

 private:
  struct EtaFactor {
    std::complex<double> G, dG;
  };
  EtaFactor eta_factor(std::size_t n, double eta) const;

  std::span<const XiChannel> xi_;
  std::span<const EtaSolutionPair> eta_;
  std::vector<double> eta_ref_, phase_ref_;
  double xi_limit_ = 0;
  int m_ = 0;
};

// (2 pi omega / c) Im[-Psi* dPsi/dz] at (rho, z), phi = 0.  Positive for flux toward -z.
double flux_density(const OutgoingWave& wave, std::span<const std::complex<double>> D, double rho, double z,
                    double omega);

struct DetectorMap {
  double z_det = 0, omega = 0;
  int m_final = 0;
  std::vector<double> rho_grid, flux_vals, dsigma_drho;
  bool coverage_warning = false;
  std::string warning;

  // Simpson rule over rho_grid (uniform grids) or trapezoid otherwise.
  double integrated() const;
};

// Uniform grid on (0, 1.2 rho_cl] with rho_cl^2 = eta xi_t of the widest channel at the detector.
std::vector<double> default_rho_grid(std::span<const XiChannel> xi, double z_det, int points = 2001);

// dsigma/drho = 2 pi rho R(rho, z_det).  Flags a coverage warning when the outer tail of the grid
// carries more than 0.1% of the integral.
DetectorMap differential_cross_section(const OutgoingWave& wave, std::span<const std::complex<double>> D,
                                       double z_det, std::span<const double> rho_grid, double omega);

// (2 omega / c) sum |D_n|^2, the flux of Psi_out through a far surface.
double total_cross_section(std::span<const std::complex<double>> D, double omega);

}  // namespace lft
