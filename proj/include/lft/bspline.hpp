#pragma once

#include <span>
#include <vector>

namespace lft {

// B-spline basis of given order (degree + 1) on a strictly increasing breakpoint sequence,
// with full knot multiplicity at both ends.
class BSplineBasis {
 public:
  BSplineBasis(std::vector<double> breakpoints, int order);

  int order() const { return order_; }
  int size() const { return static_cast<int>(knots_.size()) - order_; }
  int intervals() const { return static_cast<int>(breaks_.size()) - 1; }
  double left() const { return breaks_.front(); }
  double right() const { return breaks_.back(); }
  std::span<const double> knots() const { return knots_; }
  std::span<const double> breakpoints() const { return breaks_; }

  // Index of the breakpoint interval holding x (clamped to the ends).
  int interval(double x) const;

  // Values and derivatives of the `order` basis functions that are nonzero on the interval of x.
  // out[d * order + j] holds the d-th derivative of basis function first + j; returns first.
  int evaluate(double x, int nderiv, std::span<double> out) const;

  // Spline value and first derivative for coefficient vector c (length size()).
  struct Value {
    double f, fp;
  };
  Value combine(std::span<const double> c, double x) const;

 private:
  std::vector<double> breaks_;
  std::vector<double> knots_;
  int order_;
};

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x, w;
};
const GaussRule& gauss_legendre_rule(int points);

}  // namespace lft
