#pragma once

#include <memory>
#include <vector>

#include "lft/bspline.hpp"
#include "lft/problem.hpp"

namespace lft {

class DomainTruncation : public std::runtime_error {
 public:
  DomainTruncation(const std::string& what, int n1) : std::runtime_error(what), n1_(n1) {}
  int n1() const { return n1_; }

 private:
  int n1_;
};

// Bound solution of Xi'' + (eps/2 + (1-m^2)/(4 xi^2) + beta/xi - F xi/4) Xi = 0, normalized to
// int Xi^2/xi dxi = 1.  Internally Xi = sqrt(xi) v(s) with s = sqrt(xi), v a spline in s.
struct XiChannel {
  int n1 = 0;
  double beta = 0;
  double N_xi = 0;  // Xi -> N_xi xi^((m+1)/2)
  double energy = 0, field = 0;
  int m = 0;
  std::vector<double> xi_grid, Xi_vals;

  std::shared_ptr<const BSplineBasis> basis;
  std::vector<double> coef;  // v(s) = sum coef_j B_j(s)

  double xi_max() const { return basis->right() * basis->right(); }
  // Xi, dXi/dxi
  BSplineBasis::Value Xi(double xi) const;
  // v = Xi / sqrt(xi), dv/dxi
  BSplineBasis::Value v(double xi) const;
};

struct XiOptions {
  int intervals = 0;          // 0: automatic
  double tail_tolerance = 1e-9;  // allowed |v| near xi_max relative to its maximum
  int grid_points = 0;        // points in xi_grid (0: knot sequence)
};

// Channels n1 = 0..n1_max.  xi_max <= 0 selects it automatically from the turning point of the
// largest beta.
std::vector<XiChannel> solve_xi_channels(const ProblemSpec& spec, int n1_max, double xi_max = 0,
                                         const XiOptions& opt = {});

// Outer turning point of the xi motion for effective charge beta.
double xi_turning_point(double energy, double field, double beta);

// Gamow-type estimates for eps > 0, proportional to the squared small-coordinate amplitudes:
// N_xi ~ beta/(1 - e^{-2 pi beta/k}), N_eta ~ (1-beta)/(1 - e^{-2 pi (1-beta)/k}), k = sqrt(2 eps).
struct AmplitudeEstimate {
  double N_xi, N_eta;
};
AmplitudeEstimate amplitude_estimate(double beta, double energy);

}  // namespace lft
