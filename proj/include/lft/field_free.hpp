#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lft/special_functions.hpp"

namespace lft {

// Positive-energy pair of u'' + (2E + 2Z/x - lambda(lambda+1)/x^2) u = 0, lambda > -1.
// f is regular at the origin; both members are normalized to amplitude sqrt(2/(pi k)) far out
// and g lags f by pi/2 there, so W[f,g] = 2/pi.  Works for either sign of Z.
class StandingCoulomb {
 public:
  StandingCoulomb(double energy, double charge, double lambda);

  // Points may come in any order; each must be positive.
  std::vector<PairValue> evaluate(std::span<const double> xs) const;
  PairValue at(double x) const;

  // ln N with f = N x^(lambda+1) [1 + O(x)]
  double log_norm() const { return log_norm_; }
  double momentum() const { return k_; }
  double match_point() const { return x_match_; }

 private:
  struct State {
    double u, up;
  };
  void series(double x, double& u, double& up) const;

  double energy_, charge_, lambda_, k_;
  double x_series_ = 0.02;
  double x_match_ = 0;
  double x_anchor_ = 0;
  double log_norm_ = 0;  // normalized f = exp(log_norm_) * series
  State g_anchor_{};
  double g_anchor_log_ = 0;
};

// Field-free eta pair f'' + (eps/2 + (1-m^2)/(4 eta^2) + (1-beta)/eta) f = 0 in the eta variable,
// normalized to W = 2/pi.  eps < 0 uses the smooth pair (requires beta < 1); eps > 0 the
// standing-wave pair.
class FieldFreeEtaPair {
 public:
  FieldFreeEtaPair(double energy, double beta, int m);

  std::vector<PairValue> evaluate(std::span<const double> etas) const;
  PairValue at(double eta) const;

  double log_nf() const { return log_nf_; }
  double wronskian() const;
  bool smooth() const { return energy_ < 0; }

 private:
  double energy_, beta_, lambda_, charge_;
  double scale_ = 1;  // eps < 0: multiplier mapping the zeta pair onto W = 2/pi
  double log_nf_ = 0;
  std::optional<StandingCoulomb> standing_;  // eps > 0 only
};

}  // namespace lft
