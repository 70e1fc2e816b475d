#pragma once

#include <cmath>
#include <map>
#include <stdexcept>

namespace lft {

// Invalid or incomplete user input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Physical inputs in atomic units.  Defects are quantum defects mu_l (delta_l = pi mu_l).
struct ProblemSpec {
  double energy = 0;
  double field = 0;
  int m = 0;
  std::map<int, double> defects;
  std::map<int, double> dipoles;

  // Effective principal number 1/sqrt(-2 eps); meaningful for eps < 0.
  double nu() const { return 1 / std::sqrt(-2 * energy); }
};

}  // namespace lft
