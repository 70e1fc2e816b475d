#include "lft/field_free.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/numeric/odeint.hpp>

namespace lft {

namespace {

using std::numbers::pi;
using ode_state = std::array<double, 2>;

struct Sample {
  double u, up, log_scale;
};

// Integrate u'' = -q(x) u from x0 through targets (already ordered along the direction of travel),
// renormalizing whenever the solution grows so that exponential ranges stay representable.
template <class Q>
std::vector<Sample> sweep(const Q& q, double x0, ode_state y0, double log0, std::span<const double> targets) {
  namespace ode = boost::numeric::odeint;
  std::vector<Sample> out;
  out.reserve(targets.size());
  if (targets.empty()) return out;
  const double dir = targets.back() >= x0 ? 1.0 : -1.0;
  auto rhs = [&q](const ode_state& y, ode_state& dy, double x) {
    dy[0] = y[1];
    dy[1] = -q(x) * y[0];
  };
  auto stepper = ode::make_dense_output(1e-14, 1e-13, ode::runge_kutta_dopri5<ode_state>());
  double log_scale = log0;
  if (const double mag0 = std::abs(y0[0]) + std::abs(y0[1]); mag0 > 0) {
    y0 = {y0[0] / mag0, y0[1] / mag0};
    log_scale += std::log(mag0);
  }
  const double h0 = dir * std::min(1e-3, std::max(1e-6, 1e-2 * std::abs(x0)));
  stepper.initialize(y0, x0, h0);
  std::size_t next = 0;
  auto emit = [&](const ode_state& y) { out.push_back({y[0], y[1], log_scale}); };
  while (next < targets.size() && (targets[next] - x0) * dir <= 0) {
    emit(y0);
    ++next;
  }
  while (next < targets.size()) {
    stepper.do_step(rhs);
    const double t_now = stepper.current_time();
    while (next < targets.size() && (targets[next] - t_now) * dir <= 0) {
      ode_state y;
      stepper.calc_state(targets[next], y);
      emit(y);
      ++next;
    }
    const ode_state& cur = stepper.current_state();
    const double mag = std::abs(cur[0]) + std::abs(cur[1]);
    if (mag > 1e80 || mag < 1e-80) {
      ode_state y{cur[0] / mag, cur[1] / mag};
      log_scale += std::log(mag);
      stepper.initialize(y, t_now, stepper.current_time_step());
    }
  }
  return out;
}

double to_value(double v, double log_scale) {
  if (v == 0) return 0;
  const double l = std::log(std::abs(v)) + log_scale;
  if (l > 709) throw ScaledOverflow(l, v < 0 ? -1 : 1);
  return std::copysign(std::exp(l), v);
}

}  // namespace

StandingCoulomb::StandingCoulomb(double energy, double charge, double lambda)
    : energy_(energy), charge_(charge), lambda_(lambda) {
  if (!(energy > 0)) throw DomainError("StandingCoulomb requires positive energy");
  if (!(lambda > -1)) throw DomainError("StandingCoulomb requires lambda > -1");
  k_ = std::sqrt(2 * energy);
  const double lp = (lambda + 0.5) * (lambda + 0.5);
  const double x_turn = (-2 * charge + std::sqrt(4 * charge * charge + 8 * energy * lp)) / (4 * energy);
  const double wkb_tol = 1e-5;
  x_match_ = std::max({3 * x_turn, std::sqrt(std::abs(charge) / (wkb_tol * k_ * k_ * k_)), 60 / k_, 60.0});

  auto q = [this](double x) { return 2 * energy_ + 2 * charge_ / x - lambda_ * (lambda_ + 1) / (x * x); };
  double u, up;
  series(x_series_, u, up);
  const std::array<double, 1> target{x_match_};
  const auto s = sweep(q, x_series_, {u, up}, 0.0, target);

  // amplitude/phase fit with the second-order (Milne-iterated) local momentum
  const double x = x_match_;
  const double L = lambda_ * (lambda_ + 1);
  const double Q = q(x);
  const double Q1 = -2 * charge_ / (x * x) + 2 * L / (x * x * x);
  const double Q2 = 4 * charge_ / (x * x * x) - 6 * L / (x * x * x * x);
  const double kk = std::sqrt(Q - Q2 / (4 * Q) + 5 * Q1 * Q1 / (16 * Q * Q));
  const double kp = Q1 / (2 * std::sqrt(Q));
  const double amp = std::sqrt(2 / (pi * kk));
  const double sn = s[0].u / amp;
  const double cs = (s[0].up / amp + kp / (2 * kk) * s[0].u / amp) / kk;
  const double alpha = std::hypot(sn, cs);
  const double theta = std::atan2(sn, cs);
  log_norm_ = -(std::log(alpha) + s[0].log_scale);
  const State g_match{-amp * std::cos(theta), amp * (kk * std::sin(theta) + kp / (2 * kk) * std::cos(theta))};

  // park the irregular member just outside the turning point, where later sweeps start
  x_anchor_ = std::min(x_match_, std::max(2 * x_turn, 2.0));
  const std::array<double, 1> anchor{x_anchor_};
  const auto ga = sweep(q, x_match_, {g_match.u, g_match.up}, 0.0, anchor);
  g_anchor_ = {ga[0].u, ga[0].up};
  g_anchor_log_ = ga[0].log_scale;
}

void StandingCoulomb::series(double x, double& u, double& up) const {
  // u = x^(lambda+1) sum a_j x^j,  j (j + 2 lambda + 1) a_j = -2 Z a_{j-1} - 2 E a_{j-2}
  double am2 = 0, am1 = 1;
  double s = 1, ds = 0, xp = 1;
  for (int j = 1; j < 400; ++j) {
    const double aj = (-2 * charge_ * am1 - 2 * energy_ * am2) / (j * (j + 2 * lambda_ + 1));
    xp *= x;
    s += aj * xp;
    ds += j * aj * xp / x;
    am2 = am1;
    am1 = aj;
    if (std::abs(aj * xp) < 1e-18 * std::abs(s) && j > 4) break;
  }
  const double xl = std::pow(x, lambda_ + 1);
  u = xl * s;
  up = (lambda_ + 1) * xl / x * s + xl * ds;
}

std::vector<PairValue> StandingCoulomb::evaluate(std::span<const double> xs) const {
  std::vector<PairValue> out(xs.size());
  std::vector<std::size_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  for (double x : xs)
    if (!(x > 0)) throw DomainError("StandingCoulomb: nonpositive evaluation point");
  auto q = [this](double x) { return 2 * energy_ + 2 * charge_ / x - lambda_ * (lambda_ + 1) / (x * x); };

  // regular member: series below x_series_, outward sweep beyond
  std::vector<double> out_targets;
  std::vector<std::size_t> out_ids;
  for (std::size_t i : idx) {
    if (xs[i] <= x_series_) {
      double u, up;
      series(xs[i], u, up);
      out[i].f = to_value(u, log_norm_);
      out[i].fp = to_value(up, log_norm_);
    } else {
      out_targets.push_back(xs[i]);
      out_ids.push_back(i);
    }
  }
  if (!out_targets.empty()) {
    double u, up;
    series(x_series_, u, up);
    const auto s = sweep(q, x_series_, {u, up}, log_norm_, out_targets);
    for (std::size_t j = 0; j < s.size(); ++j) {
      out[out_ids[j]].f = to_value(s[j].u, s[j].log_scale);
      out[out_ids[j]].fp = to_value(s[j].up, s[j].log_scale);
    }
  }

  // irregular member: inward from the anchor, outward beyond it
  std::vector<double> in_targets, far_targets;
  std::vector<std::size_t> in_ids, far_ids;
  for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
    if (xs[*it] <= x_anchor_) {
      in_targets.push_back(xs[*it]);
      in_ids.push_back(*it);
    }
  }
  for (std::size_t i : idx) {
    if (xs[i] > x_anchor_) {
      far_targets.push_back(xs[i]);
      far_ids.push_back(i);
    }
  }
  const ode_state g0{g_anchor_.u, g_anchor_.up};
  const auto gi = sweep(q, x_anchor_, g0, g_anchor_log_, in_targets);
  for (std::size_t j = 0; j < gi.size(); ++j) {
    out[in_ids[j]].g = to_value(gi[j].u, gi[j].log_scale);
    out[in_ids[j]].gp = to_value(gi[j].up, gi[j].log_scale);
  }
  const auto go = sweep(q, x_anchor_, g0, g_anchor_log_, far_targets);
  for (std::size_t j = 0; j < go.size(); ++j) {
    out[far_ids[j]].g = to_value(go[j].u, go[j].log_scale);
    out[far_ids[j]].gp = to_value(go[j].up, go[j].log_scale);
  }
  return out;
}

PairValue StandingCoulomb::at(double x) const {
  const std::array<double, 1> xs{x};
  return evaluate(xs)[0];
}

FieldFreeEtaPair::FieldFreeEtaPair(double energy, double beta, int m)
    : energy_(energy), beta_(beta), lambda_((std::abs(m) - 1) / 2.0), charge_(1 - beta) {
  if (energy == 0) throw DomainError("FieldFreeEtaPair: zero energy");
  if (energy < 0) {
    if (!(charge_ > 0))
      throw DomainError("FieldFreeEtaPair: beta >= 1 at negative energy has no real smooth pair");
    const double ebar = 2 * energy / (charge_ * charge_);
    const double nubar = 1 / std::sqrt(-ebar);
    scale_ = 2 / std::sqrt(charge_);
    log_nf_ = std::log(scale_) + 0.5 * std::log(smooth_amplitude(nubar, lambda_)) +
              (lambda_ + 0.5) * std::log(2.0) + (lambda_ + 1) * std::log(charge_ / 2) -
              std::lgamma(2 * lambda_ + 2);
  } else {
    standing_.emplace(energy, charge_, lambda_);
    log_nf_ = 0.5 * std::log(2.0) + standing_->log_norm() - (lambda_ + 1) * std::log(2.0);
  }
}

double FieldFreeEtaPair::wronskian() const { return 2 / pi; }

std::vector<PairValue> FieldFreeEtaPair::evaluate(std::span<const double> etas) const {
  std::vector<PairValue> out;
  out.reserve(etas.size());
  if (energy_ < 0) {
    const double ebar = 2 * energy_ / (charge_ * charge_);
    for (double eta : etas) {
      const PairValue v = smooth_pair_value(ebar, lambda_, charge_ * eta / 2);
      const double d = charge_ / 2;
      out.push_back({scale_ * v.f, scale_ * d * v.fp, scale_ * v.g, scale_ * d * v.gp});
    }
    return out;
  }
  std::vector<double> xs(etas.begin(), etas.end());
  for (double& x : xs) x /= 2;
  const double s = std::sqrt(2.0);
  for (const PairValue& v : standing_->evaluate(xs)) out.push_back({s * v.f, s * v.fp / 2, s * v.g, s * v.gp / 2});
  return out;
}

PairValue FieldFreeEtaPair::at(double eta) const {
  const std::array<double, 1> e{eta};
  return evaluate(e)[0];
}

}  // namespace lft
