#pragma once

#include <array>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "lft/bspline.hpp"
#include "lft/special_functions.hpp"

namespace lft {

struct EtaChannelParams {
  double energy = 0, field = 0, beta = 0;
  int m = 0;
};

enum class BarrierClass { above_barrier, below_barrier, no_barrier };
const char* to_string(BarrierClass c);

class ClosedChannelSingular : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateSolution : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Langer-corrected k^2 = eps/2 - m^2/(4 eta^2) + (1-beta)/eta + F eta/4.
double local_momentum_sq(double eta, const EtaChannelParams& p);
// d(k^2)/d eta
double local_momentum_sq_slope(double eta, const EtaChannelParams& p);

struct LocalMomentum {
  double k;        // sqrt(|k^2|)
  bool forbidden;  // k^2 < 0
};
LocalMomentum local_momentum(double eta, const EtaChannelParams& p);

// Positive zeros of k^2, ascending.
std::vector<double> turning_points(const EtaChannelParams& p);
// Outermost zero of k^2, or 0 when there is none.
double outer_turning_point(const EtaChannelParams& p);
BarrierClass classify_barrier(const EtaChannelParams& p);

// Phase integral of k between a and b (both in allowed regions or at turning points).
double phase_integral(const EtaChannelParams& p, double a, double b);

struct EtaOptions {
  double eta1 = 0.05;
  double eta2 = 0;  // 0: automatic
  int order = 8;
  int quad_points = 12;
  double wkb_smoothness = 1e-3;  // |k'/k^2| required at eta2
  double sector_action = 2.5;    // max tunnelling integral per sector
  int sector_intervals = 400;
  int max_retries = 3;
};

// Two-surface variational problem on [eta1, eta2]:
//   Gamma_ij = int [ (eps/2 - 2V) B_i B_j - B_i' B_j' ],  Lambda_ij = d_iI d_Ij + d_iO d_Oj,
//   2V = (m^2-1)/(4 eta^2) - (1-beta)/eta - F eta/4.
struct RMatrixWorkspace {
  double eta1 = 0, eta2 = 0;
  EtaChannelParams channel;
  std::shared_ptr<const BSplineBasis> basis;
  int kd = 0;                       // superdiagonals of Gamma
  std::vector<double> gamma_band;   // upper symmetric band storage, column major

  int size() const { return basis->size(); }
  int inner_index() const { return 0; }
  int outer_index() const { return size() - 1; }
  double gamma(int i, int j) const;
  double lambda(int i, int j) const;
};

RMatrixWorkspace build_workspace(const EtaChannelParams& p, std::shared_ptr<const BSplineBasis> basis,
                                 int quad_points = 12);
// Knots from the local-wavelength rule on [eta1, eta2].
std::vector<double> eta_breakpoints(const EtaChannelParams& p, double eta1, double eta2);
RMatrixWorkspace build_workspace(const EtaChannelParams& p, double eta1, double eta2, const EtaOptions& opt = {});

// Solution with psi'(eta1) = b psi(eta1) and psi'(eta2) = -b psi(eta2).
struct SurfaceSolution {
  double b = 0;
  std::vector<double> coef;
  double inner = 0, outer = 0;  // psi(eta1), psi(eta2)
};
std::array<SurfaceSolution, 2> solve_surface_eigenproblem(const RMatrixWorkspace& ws);

// One propagation sector.  Raw regular solution = exp(log_reg) sum reg_i B_i; raw irregular =
// exp(log_irr) sum irr_i B_i + sign_c exp(log_c) * (raw regular), which keeps the part of the
// irregular solution independent of the regular one resolved through tunnelling regions.
struct EtaSector {
  std::shared_ptr<const BSplineBasis> basis;
  std::vector<double> reg, irr;
  double log_reg = 0, log_irr = 0;
  double log_c = -std::numeric_limits<double>::infinity();
  int sign_c = 0;
};

// Regular/irregular pair matched to the field-free boundary pair at eta1.  The raw pair keeps
// W = 2/pi; the renormalized pair Upsilon = raw/alpha_reg, Upsilon_bar = raw/alpha_irr has equal
// post-barrier amplitudes and W = (2/pi) sin(gamma).
struct EtaSolutionPair {
  int n1 = 0;
  EtaChannelParams channel;
  double eta1 = 0, eta2 = 0;
  std::vector<EtaSector> sectors;
  PairValue boundary;  // field-free f, f', g, g' at eta1
  PairValue end_scaled;  // last-sector regular and independent irregular parts at eta2, unscaled
  double log_nf = 0;   // ln of the field-free regular amplitude N_f

  double eta0 = 0;
  BarrierClass barrier = BarrierClass::above_barrier;
  double phase_eta2 = 0;       // int_{eta0}^{eta2} k + pi/4
  double phase_tail = 0;       // int_{eta2}^{inf} (q - k), q the second-order local momentum
  double log_alpha_reg = 0, log_alpha_irr = 0;
  double theta_reg = 0, theta_irr = 0;
  double delta = 0, gamma = 0;
  double sin_gamma = 1;

  std::vector<double> eta_grid;
  std::vector<double> Upsilon_vals, Upsilon_deriv, Upsilon_bar_vals, Upsilon_bar_deriv;

  // ln N_eta with Upsilon -> N_eta eta^((m+1)/2)
  double log_n_eta() const { return log_nf - log_alpha_reg; }

  // Raw (boundary-normalized) values: f, f', g, g' of the matched solutions.
  PairValue raw_at(double eta) const;
  // Renormalized pair: Upsilon, Upsilon', Upsilon_bar, Upsilon_bar'.
  PairValue at(double eta) const;
  // Wronskian of the raw pair; the stored multiple of the regular solution drops out exactly.
  double raw_wronskian_at(double eta) const;
  // Wronskian of the renormalized pair, evaluated without forming underflowing products.
  double wronskian_at(double eta) const;
};

// Match the two surface solutions to the boundary pair at eta1 and carry the pair across the sectors.
EtaSolutionPair construct_regular_irregular(const EtaChannelParams& p, std::span<const RMatrixWorkspace> sectors,
                                            const PairValue& boundary);

// Fit both solutions at eta2 to alpha sqrt(2/(pi k)) sin(Phi + phase) and fill delta, gamma and
// the amplitudes.
void extract_phases(EtaSolutionPair& pair, double smoothness_tolerance = 1e-2);

// Full channel solve: choose eta2, build sectors (with retries on closed-block singularities),
// match, extract phases, tabulate on the breakpoints.
EtaSolutionPair solve_eta_channel(const EtaChannelParams& p, int n1 = 0, const EtaOptions& opt = {});

struct WkbValue {
  double k = 0, amplitude = 0;
  double phase = 0;  // Phi(eta) = int_{eta0}^{eta} k + pi/4
  double dk = 0;
};
WkbValue wkb_propagate(const EtaSolutionPair& pair, double eta_target);
// Continue from an already-known phase at eta_from.
WkbValue wkb_propagate(const EtaChannelParams& p, double eta_from, double phase_from, double eta_target);

}  // namespace lft
