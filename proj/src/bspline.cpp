#include "lft/bspline.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace lft {

namespace {
constexpr int max_order = 16;
}

BSplineBasis::BSplineBasis(std::vector<double> breakpoints, int order)
    : breaks_(std::move(breakpoints)), order_(order) {
  if (order_ < 1 || order_ > max_order) throw std::invalid_argument("BSplineBasis: order out of range");
  if (breaks_.size() < 2) throw std::invalid_argument("BSplineBasis: need at least two breakpoints");
  for (std::size_t i = 1; i < breaks_.size(); ++i)
    if (!(breaks_[i] > breaks_[i - 1])) throw std::invalid_argument("BSplineBasis: breakpoints must increase");
  knots_.reserve(breaks_.size() + 2 * (order_ - 1));
  knots_.insert(knots_.end(), order_ - 1, breaks_.front());
  knots_.insert(knots_.end(), breaks_.begin(), breaks_.end());
  knots_.insert(knots_.end(), order_ - 1, breaks_.back());
}

int BSplineBasis::interval(double x) const {
  if (x <= breaks_.front()) return 0;
  if (x >= breaks_.back()) return intervals() - 1;
  return static_cast<int>(std::upper_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin()) - 1;
}

int BSplineBasis::evaluate(double x, int nderiv, std::span<double> out) const {
  // derivative-enabled Cox-de Boor recursion on the knot span [t_s, t_{s+1})
  const int p = order_ - 1;
  const int s = interval(x) + p;
  const int nd = std::min(nderiv, p);
  const auto& t = knots_;

  std::array<double, max_order * max_order> ndu;
  std::array<double, max_order> left, right;
  ndu[0] = 1;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - t[s + 1 - j];
    right[j] = t[s + j] - x;
    double saved = 0;
    for (int r = 0; r < j; ++r) {
      ndu[j * order_ + r] = right[r + 1] + left[j - r];
      const double tmp = ndu[r * order_ + j - 1] / ndu[j * order_ + r];
      ndu[r * order_ + j] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    ndu[j * order_ + j] = saved;
  }
  std::fill(out.begin(), out.begin() + (nderiv + 1) * order_, 0.0);
  for (int j = 0; j <= p; ++j) out[j] = ndu[j * order_ + p];

  std::array<double, 2 * max_order> a;
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    std::fill(a.begin(), a.end(), 0.0);
    a[0] = 1;
    for (int k = 1; k <= nd; ++k) {
      double d = 0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a[s2 * order_] = a[s1 * order_] / ndu[(pk + 1) * order_ + rk];
        d = a[s2 * order_] * ndu[rk * order_ + pk];
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2 * order_ + j] = (a[s1 * order_ + j] - a[s1 * order_ + j - 1]) / ndu[(pk + 1) * order_ + rk + j];
        d += a[s2 * order_ + j] * ndu[(rk + j) * order_ + pk];
      }
      if (r <= pk) {
        a[s2 * order_ + k] = -a[s1 * order_ + k - 1] / ndu[(pk + 1) * order_ + r];
        d += a[s2 * order_ + k] * ndu[r * order_ + pk];
      }
      out[k * order_ + r] = d;
      std::swap(s1, s2);
    }
  }
  int fac = p;
  for (int k = 1; k <= nd; ++k) {
    for (int j = 0; j <= p; ++j) out[k * order_ + j] *= fac;
    fac *= (p - k);
  }
  return s - p;
}

BSplineBasis::Value BSplineBasis::combine(std::span<const double> c, double x) const {
  std::array<double, 2 * max_order> buf;
  const int first = evaluate(x, 1, std::span<double>(buf.data(), 2 * order_));
  Value v{0, 0};
  for (int j = 0; j < order_; ++j) {
    v.f += c[first + j] * buf[j];
    v.fp += c[first + j] * buf[order_ + j];
  }
  return v;
}

namespace {

template <int N>
GaussRule make_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  GaussRule r;
  const auto& xs = G::abscissa();
  const auto& ws = G::weights();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] == 0) {
      r.x.push_back(0);
      r.w.push_back(ws[i]);
    } else {
      r.x.push_back(-xs[i]);
      r.w.push_back(ws[i]);
      r.x.push_back(xs[i]);
      r.w.push_back(ws[i]);
    }
  }
  std::vector<std::size_t> idx(r.x.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return r.x[a] < r.x[b]; });
  GaussRule sorted;
  for (auto i : idx) {
    sorted.x.push_back(r.x[i]);
    sorted.w.push_back(r.w[i]);
  }
  return sorted;
}

}  // namespace

const GaussRule& gauss_legendre_rule(int points) {
  static const GaussRule r8 = make_rule<8>();
  static const GaussRule r12 = make_rule<12>();
  static const GaussRule r16 = make_rule<16>();
  static const GaussRule r20 = make_rule<20>();
  switch (points) {
    case 8: return r8;
    case 12: return r12;
    case 16: return r16;
    case 20: return r20;
    default: throw std::invalid_argument("gauss_legendre_rule: supported sizes are 8, 12, 16, 20");
  }
}

}  // namespace lft
