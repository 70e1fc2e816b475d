#include "lft/microscopy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "lft/units.hpp"

namespace lft {

namespace {

using std::numbers::pi;
using cplx = std::complex<double>;

constexpr double local_rule_span = 0.05;  // Gauss rule from eta_ref while (eta - eta_ref) < this * eta_ref

void check_sizes(const OutgoingWave& w, std::span<const cplx> D) {
  if (D.size() != w.size()) throw std::invalid_argument("outgoing wave: one amplitude per channel required");
}

}  // namespace

OutgoingWave::OutgoingWave(std::span<const XiChannel> xi, std::span<const EtaSolutionPair> eta, double eta_ref)
    : xi_(xi), eta_(eta) {
  if (xi.size() != eta.size()) throw std::invalid_argument("OutgoingWave: one eta pair per xi channel required");
  if (xi.empty()) throw std::invalid_argument("OutgoingWave: no channels");
  m_ = std::abs(xi.front().m);
  xi_limit_ = xi.front().xi_max();
  for (std::size_t n = 0; n < xi.size(); ++n) {
    if (std::abs(xi[n].m) != m_ || std::abs(eta[n].channel.m) != m_)
      throw std::invalid_argument("OutgoingWave: channels must share m");
    xi_limit_ = std::min(xi_limit_, xi[n].xi_max());
    const double ref = std::max(eta_ref, eta[n].eta2);
    eta_ref_.push_back(ref);
    phase_ref_.push_back(wkb_propagate(eta[n], ref).phase);
  }
}

OutgoingWave::EtaFactor OutgoingWave::eta_factor(std::size_t n, double eta) const {
  const EtaSolutionPair& pair = eta_[n];
  if (eta < pair.eta2) {
    if (eta < pair.eta0) throw DomainError("outgoing wave: eta lies before the outer turning point");
    if (pair.sin_gamma < 1e-8)
      throw DomainError("outgoing wave: numeric irregular solution unresolved inside the box (sin gamma " +
                        std::to_string(pair.sin_gamma) + ")");
    const PairValue v = pair.at(eta);
    const double cg = std::cos(pair.gamma), sg = pair.sin_gamma;
    const double chi = (v.g - cg * v.f) / sg;
    const double chip = (v.gp - cg * v.fp) / sg;
    const double s = 1 / std::sqrt(2 * eta);
    const cplx G = cplx(-chi, v.f) * s;
    return {G, cplx(-chip, v.fp) * s - G / (2 * eta)};
  }
  WkbValue w;
  const double ref = eta_ref_[n];
  if (eta >= ref && eta - ref < local_rule_span * ref) {
    const auto& p = pair.channel;
    w.k = std::sqrt(local_momentum_sq(eta, p));
    w.dk = local_momentum_sq_slope(eta, p) / (2 * w.k);
    w.amplitude = std::sqrt(2 / (pi * w.k));
    auto k = [&p](double x) { return std::sqrt(local_momentum_sq(x, p)); };
    w.phase = phase_ref_[n] + (eta > ref ? boost::math::quadrature::gauss<double, 20>::integrate(k, ref, eta) : 0.0);
  } else if (eta >= ref) {
    w = wkb_propagate(pair.channel, ref, phase_ref_[n], eta);
  } else {
    w = wkb_propagate(pair, eta);
  }
  const double theta = w.phase + pair.delta;
  const cplx G = std::polar(w.amplitude / std::sqrt(2 * eta), theta);
  return {G, G * cplx(-w.dk / (2 * w.k) - 1 / (2 * eta), w.k)};
}

OutgoingValue OutgoingWave::channel(std::size_t n, double xi, double eta) const {
  if (n >= size()) throw std::out_of_range("OutgoingWave::channel");
  if (xi < 0 || xi > xi_limit_)
    throw ExtrapolationError("outgoing wave: xi = " + std::to_string(xi) + " outside the tabulated range [0, " +
                             std::to_string(xi_limit_) + "]");
  const auto v = xi_[n].v(xi);
  const auto e = eta_factor(n, eta);
  const double norm = 1 / std::sqrt(2 * pi);
  return {norm * v.f * e.G, norm * v.fp * e.G, norm * v.f * e.dG};
}

OutgoingValue OutgoingWave::evaluate(std::span<const cplx> D, double xi, double eta) const {
  check_sizes(*this, D);
  OutgoingValue out;
  for (std::size_t n = 0; n < size(); ++n) {
    if (D[n] == cplx{}) continue;
    const OutgoingValue c = channel(n, xi, eta);
    out.psi += D[n] * c.psi;
    out.dpsi_dxi += D[n] * c.dpsi_dxi;
    out.dpsi_deta += D[n] * c.dpsi_deta;
  }
  return out;
}

double flux_density(const OutgoingWave& wave, std::span<const cplx> D, double rho, double z, double omega) {
  const double r = std::hypot(rho, z);
  // the small coordinate without cancellation
  const double xi = z < 0 ? rho * rho / (r - z) : r + z;
  const double eta = z < 0 ? r - z : rho * rho / (r + z);
  if (eta <= 0) throw DomainError("flux_density: point on the up-field axis");
  const OutgoingValue v = wave.evaluate(D, xi, eta);
  const cplx dz = (2 / (xi + eta)) * (xi * v.dpsi_dxi - eta * v.dpsi_deta);
  return (2 * pi * omega / units::speed_of_light) * std::imag(-std::conj(v.psi) * dz);
}

double DetectorMap::integrated() const {
  const std::size_t n = rho_grid.size();
  if (n < 2) return 0;
  const double h = rho_grid[1] - rho_grid[0];
  bool uniform = n % 2 == 1;
  for (std::size_t i = 1; uniform && i < n; ++i)
    uniform = std::abs(rho_grid[i] - rho_grid[i - 1] - h) <= 1e-9 * std::abs(h);
  double sum = 0;
  if (uniform) {
    for (std::size_t i = 0; i < n; ++i) sum += (i == 0 || i == n - 1 ? 1 : (i % 2 ? 4 : 2)) * dsigma_drho[i];
    return sum * h / 3;
  }
  for (std::size_t i = 1; i < n; ++i)
    sum += 0.5 * (rho_grid[i] - rho_grid[i - 1]) * (dsigma_drho[i] + dsigma_drho[i - 1]);
  return sum;
}

std::vector<double> default_rho_grid(std::span<const XiChannel> xi, double z_det, int points) {
  if (xi.empty()) throw std::invalid_argument("default_rho_grid: no channels");
  if (!(z_det < 0)) throw DomainError("default_rho_grid: detector must lie down-field (z < 0)");
  if (points < 3) throw std::invalid_argument("default_rho_grid: at least 3 points");
  double xt = 0;
  for (const auto& c : xi) xt = std::max(xt, xi_turning_point(c.energy, c.field, c.beta));
  const double rho_max = 1.2 * std::sqrt(2 * std::abs(z_det) * xt);
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = rho_max * i / (points - 1);
  return grid;
}

DetectorMap differential_cross_section(const OutgoingWave& wave, std::span<const cplx> D, double z_det,
                                       std::span<const double> rho_grid, double omega) {
  if (!(z_det < 0)) throw DomainError("differential_cross_section: detector must lie down-field (z < 0)");
  DetectorMap map;
  map.z_det = z_det;
  map.omega = omega;
  map.m_final = wave.m();
  map.rho_grid.assign(rho_grid.begin(), rho_grid.end());
  for (double rho : rho_grid) {
    const double R = rho == 0 ? 0.0 : flux_density(wave, D, rho, z_det, omega);
    map.flux_vals.push_back(R);
    map.dsigma_drho.push_back(2 * pi * rho * R);
  }
  const double total = map.integrated();
  const std::size_t n = map.rho_grid.size();
  if (n > 20 && total > 0) {
    DetectorMap tail;
    const std::size_t start = n - n / 20 - (n / 20) % 2;
    tail.rho_grid.assign(map.rho_grid.begin() + static_cast<std::ptrdiff_t>(start), map.rho_grid.end());
    tail.dsigma_drho.assign(map.dsigma_drho.begin() + static_cast<std::ptrdiff_t>(start), map.dsigma_drho.end());
    const double lost = tail.integrated() / total;
    if (lost > 1e-3) {
      map.coverage_warning = true;
      map.warning = "rho grid truncation: outer 5% of the grid carries " + std::to_string(100 * lost) +
                    "% of the flux";
    }
  }
  return map;
}

double total_cross_section(std::span<const cplx> D, double omega) {
  double s = 0;
  for (const auto& d : D) s += std::norm(d);
  return 2 * omega / units::speed_of_light * s;
}

}  // namespace lft
