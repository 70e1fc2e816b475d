#include "lft/xi_channels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <lapacke.h>

#include "lft/special_functions.hpp"

namespace lft {

namespace {

constexpr int spline_order = 8;
constexpr int quad_points = 12;

struct Banded {
  // LAPACK upper symmetric band storage, column major, kd superdiagonals
  int n, kd;
  std::vector<double> ab;
  Banded(int n_, int kd_) : n(n_), kd(kd_), ab(static_cast<std::size_t>(n_) * (kd_ + 1), 0.0) {}
  void add(int i, int j, double v) {
    if (i > j) std::swap(i, j);
    if (j - i > kd) return;
    ab[static_cast<std::size_t>(j) * (kd + 1) + (kd + i - j)] += v;
  }
};

struct Eigensystem {
  std::vector<double> beta;
  std::vector<std::vector<double>> coef;  // full-basis coefficients
  std::shared_ptr<const BSplineBasis> basis;
};

Eigensystem solve(const ProblemSpec& spec, int n1_max, double s_max, int intervals) {
  const int m = std::abs(spec.m);
  std::vector<double> br(intervals + 1);
  for (int i = 0; i <= intervals; ++i) br[i] = s_max * i / intervals;
  auto basis = std::make_shared<const BSplineBasis>(std::move(br), spline_order);
  const int nb = basis->size();
  // drop the last function (v(s_max) = 0) and, for m >= 1, the first (v(0) = 0)
  const int lo = m >= 1 ? 1 : 0;
  const int hi = nb - 1;
  const int n = hi - lo;
  const int kd = spline_order - 1;
  if (n1_max + 1 > n) throw std::invalid_argument("solve_xi_channels: basis smaller than channel count");

  Banded A(n, kd), M(n, kd);
  const GaussRule& g = gauss_legendre_rule(quad_points);
  std::vector<double> buf(2 * spline_order);
  const double eps = spec.energy, F = spec.field;
  for (int iv = 0; iv < basis->intervals(); ++iv) {
    const double a = basis->breakpoints()[iv], b = basis->breakpoints()[iv + 1];
    const double half = (b - a) / 2, mid = (a + b) / 2;
    for (std::size_t q = 0; q < g.x.size(); ++q) {
      const double s = mid + half * g.x[q];
      const double w = half * g.w[q];
      const int first = basis->evaluate(s, 1, buf);
      const double pot = double(m * m) / (s * s) - 2 * eps * s * s + F * s * s * s * s;
      for (int i = 0; i < spline_order; ++i) {
        const int gi = first + i - lo;
        if (gi < 0 || gi >= n) continue;
        for (int j = i; j < spline_order; ++j) {
          const int gj = first + j - lo;
          if (gj < 0 || gj >= n) continue;
          const double bb = buf[i] * buf[j];
          A.add(gi, gj, w * s * (buf[spline_order + i] * buf[spline_order + j] + pot * bb));
          M.add(gi, gj, w * s * bb);
        }
      }
    }
  }

  std::vector<double> w(n), z(static_cast<std::size_t>(n) * (n1_max + 1)), q(static_cast<std::size_t>(n) * n);
  std::vector<lapack_int> ifail(n);
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsbgvx(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, kd, kd, A.ab.data(), kd + 1,
                                         M.ab.data(), kd + 1, q.data(), n, 0.0, 0.0, 1, n1_max + 1, 0.0, &found,
                                         w.data(), z.data(), n, ifail.data());
  if (info != 0 || found != n1_max + 1)
    throw std::runtime_error("solve_xi_channels: banded eigensolver failed (info " + std::to_string(info) + ")");

  Eigensystem es;
  es.basis = basis;
  for (int c = 0; c <= n1_max; ++c) {
    es.beta.push_back(w[c] / 4);
    std::vector<double> full(nb, 0.0);
    for (int i = 0; i < n; ++i) full[i + lo] = z[static_cast<std::size_t>(c) * n + i];
    es.coef.push_back(std::move(full));
  }
  return es;
}

// Basis values on a fixed point set, shared by all channels of one eigensystem.
struct Sampled {
  std::vector<double> s, w;
  std::vector<int> first;
  std::vector<double> vals;
  int order = 0;
  double dot(std::span<const double> c, std::size_t i) const {
    double acc = 0;
    for (int j = 0; j < order; ++j) acc += c[first[i] + j] * vals[i * order + j];
    return acc;
  }
};

Sampled sample(const BSplineBasis& basis, std::vector<double> s, std::vector<double> w) {
  Sampled out;
  out.order = basis.order();
  out.s = std::move(s);
  out.w = std::move(w);
  out.first.resize(out.s.size());
  out.vals.resize(out.s.size() * out.order);
  for (std::size_t i = 0; i < out.s.size(); ++i)
    out.first[i] = basis.evaluate(out.s[i], 0, std::span<double>(out.vals).subspan(i * out.order, out.order));
  return out;
}

Sampled quadrature_samples(const BSplineBasis& basis) {
  const GaussRule& g = gauss_legendre_rule(quad_points);
  std::vector<double> s, w;
  for (int iv = 0; iv < basis.intervals(); ++iv) {
    const double a = basis.breakpoints()[iv], b = basis.breakpoints()[iv + 1];
    for (std::size_t q = 0; q < g.x.size(); ++q) {
      s.push_back((a + b) / 2 + (b - a) / 2 * g.x[q]);
      w.push_back((b - a) / 2 * g.w[q]);
    }
  }
  return sample(basis, std::move(s), std::move(w));
}

Sampled uniform_samples(const BSplineBasis& basis, int per_interval) {
  const int n = per_interval * basis.intervals();
  std::vector<double> s(n - 1);
  for (int i = 1; i < n; ++i) s[i - 1] = basis.right() * i / n;
  return sample(basis, std::move(s), {});
}

double norm_integral(const Sampled& q, std::span<const double> c) {
  // 2 int s v^2 ds = int Xi^2 / xi dxi
  double acc = 0;
  for (std::size_t i = 0; i < q.s.size(); ++i) {
    const double v = q.dot(c, i);
    acc += q.w[i] * 2 * q.s[i] * v * v;
  }
  return acc;
}

double tail_ratio(const Sampled& u, double s_max, std::span<const double> c) {
  double peak = 0, tail = 0;
  for (std::size_t i = 0; i < u.s.size(); ++i) {
    const double v = std::abs(u.dot(c, i)) * std::sqrt(u.s[i]);
    peak = std::max(peak, v);
    if (u.s[i] > 0.9 * s_max) tail = std::max(tail, v);
  }
  return peak > 0 ? tail / peak : 0;
}

double fit_small_amplitude(const BSplineBasis& basis, std::span<const double> c, int m, double beta) {
  // v / s^m = N (1 + c1 s^2 + c2 s^4) on ten points well inside the first local wavelength
  const double q = std::sqrt(std::abs(4 * beta) + m * m + 1.0);
  const double s_fit = std::min(basis.breakpoints()[1], 0.3 / q);
  constexpr int npts = 10;
  Eigen::MatrixXd X(npts, 3);
  Eigen::VectorXd y(npts);
  for (int i = 0; i < npts; ++i) {
    const double s = s_fit * (i + 1) / npts;
    X(i, 0) = 1;
    X(i, 1) = s * s;
    X(i, 2) = s * s * s * s;
    y(i) = basis.combine(c, s).f / std::pow(s, m);
  }
  const Eigen::VectorXd p = X.colPivHouseholderQr().solve(y);
  return p(0);
}

int count_nodes(const Sampled& u, std::span<const double> c) {
  std::vector<double> vals(u.s.size());
  double peak = 0;
  for (std::size_t i = 0; i < u.s.size(); ++i) {
    vals[i] = u.dot(c, i) * std::sqrt(u.s[i]);
    peak = std::max(peak, std::abs(vals[i]));
  }
  int nodes = 0, sign = 0;
  for (double v : vals) {
    if (std::abs(v) < 1e-7 * peak) continue;
    const int sg = v > 0 ? 1 : -1;
    if (sign != 0 && sg != sign) ++nodes;
    sign = sg;
  }
  return nodes;
}

}  // namespace

double xi_turning_point(double energy, double field, double beta) {
  if (field > 0) {
    const double disc = energy * energy / 4 + field * beta;
    if (disc <= 0) return std::max(0.0, energy / field);
    return (energy / 2 + std::sqrt(disc)) / (field / 2);
  }
  if (energy < 0 && beta > 0) return 2 * beta / -energy;
  throw DomainError("xi_turning_point: unbounded xi motion");
}

BSplineBasis::Value XiChannel::v(double xi) const {
  const double s = std::sqrt(xi);
  const auto r = basis->combine(coef, s);
  if (xi == 0) return {r.f, 0};
  return {r.f, r.fp / (2 * s)};
}

BSplineBasis::Value XiChannel::Xi(double xi) const {
  const double s = std::sqrt(xi);
  const auto r = basis->combine(coef, s);
  if (xi == 0) return {0, 0};
  return {s * r.f, (r.f + s * r.fp) / (2 * s)};
}

std::vector<XiChannel> solve_xi_channels(const ProblemSpec& spec, int n1_max, double xi_max, const XiOptions& opt) {
  if (spec.field < 0) throw DomainError("solve_xi_channels: negative field");
  if (n1_max < 0) throw std::invalid_argument("solve_xi_channels: n1_max < 0");
  const bool automatic = xi_max <= 0;
  auto margin = [&](double xt) {
    if (spec.field > 0) return 1.5 * xt;
    return 1.5 * xt + 40 * spec.nu();
  };
  if (automatic) {
    const double b0 = spec.field > 0 ? 1.0 : (2.0 * n1_max + std::abs(spec.m) + 1) / (2 * spec.nu());
    xi_max = margin(xi_turning_point(spec.energy, spec.field, b0));
  }
  const int intervals = opt.intervals > 0 ? opt.intervals : 4 * (n1_max + 1) + 150;

  Eigensystem es;
  for (int attempt = 0;; ++attempt) {
    es = solve(spec, n1_max, std::sqrt(xi_max), intervals);
    const Sampled coarse = uniform_samples(*es.basis, 2);
    int bad = -1;
    for (int c = 0; c <= n1_max && bad < 0; ++c)
      if (tail_ratio(coarse, es.basis->right(), es.coef[c]) > opt.tail_tolerance) bad = c;
    const double wanted = margin(xi_turning_point(spec.energy, spec.field, std::max(es.beta.back(), 1e-3)));
    if (bad < 0 && (!automatic || wanted <= xi_max * 1.0001)) break;
    if (!automatic || attempt >= 8) {
      if (bad < 0) break;
      throw DomainTruncation("solve_xi_channels: xi_max " + std::to_string(xi_max) +
                                 " truncates the tail of channel n1=" + std::to_string(bad),
                             bad);
    }
    xi_max = std::max(wanted, 1.3 * xi_max);
  }

  const int m = std::abs(spec.m);
  const Sampled quad = quadrature_samples(*es.basis);
  const Sampled fine = uniform_samples(*es.basis, 6);
  std::vector<XiChannel> out;
  out.reserve(n1_max + 1);
  for (int c = 0; c <= n1_max; ++c) {
    XiChannel ch;
    ch.n1 = c;
    ch.beta = es.beta[c];
    ch.energy = spec.energy;
    ch.field = spec.field;
    ch.m = spec.m;
    ch.basis = es.basis;
    ch.coef = es.coef[c];
    const double scale = 1 / std::sqrt(norm_integral(quad, ch.coef));
    double nf = fit_small_amplitude(*es.basis, ch.coef, m, ch.beta) * scale;
    const double sg = nf < 0 ? -1 : 1;
    for (double& x : ch.coef) x *= scale * sg;
    ch.N_xi = nf * sg;
    if (count_nodes(fine, ch.coef) != c)
      throw std::runtime_error("solve_xi_channels: node count mismatch at n1=" + std::to_string(c));
    const auto br = es.basis->breakpoints();
    const int npts = opt.grid_points > 0 ? opt.grid_points : static_cast<int>(br.size());
    for (int i = 0; i < npts; ++i) {
      const double s = opt.grid_points > 0 ? br.back() * i / (npts - 1) : br[i];
      ch.xi_grid.push_back(s * s);
      ch.Xi_vals.push_back(s * es.basis->combine(ch.coef, s).f);
    }
    out.push_back(std::move(ch));
  }
  return out;
}

AmplitudeEstimate amplitude_estimate(double beta, double energy) {
  if (!(energy > 0)) throw DomainError("amplitude_estimate: requires positive energy");
  const double k = std::sqrt(2 * energy);
  auto gamow = [k](double z) {
    if (std::abs(z) < 1e-14) return k / (2 * M_PI);
    return z / (-std::expm1(-2 * M_PI * z / k));
  };
  return {gamow(beta), gamow(1 - beta)};
}

}  // namespace lft
