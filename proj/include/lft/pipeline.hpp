#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lft/config.hpp"
#include "lft/eta_channels.hpp"
#include "lft/frame_transform.hpp"
#include "lft/microscopy.hpp"
#include "lft/problem.hpp"
#include "lft/scattering.hpp"
#include "lft/xi_channels.hpp"

namespace lft {

// Error raised inside one pipeline stage, tagged with that stage.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(const std::string& stage, const std::exception& e)
      : std::runtime_error(stage + ": " + e.what()), config_(dynamic_cast<const ConfigError*>(&e) != nullptr) {}
  // The underlying error was invalid input.
  bool config() const { return config_; }

 private:
  bool config_;
};

// Which n1 channels enter U and the scattering matrices.
struct ChannelPolicy {
  int n1_total = 0;          // > 0: exactly n1 = 0..n1_total-1 (beta >= 1 still dropped below threshold)
  double beta_low = -0.2;    // automatic retention window above threshold
  double beta_high = 1.2;    // below threshold the window ends at beta = 1
  int ell_max = 6;
  bool solve_eta = true;     // false: U from field-free eta amplitudes (eps > 0 only)
  XiOptions xi;
  EtaOptions eta;
};

struct ChannelSet {
  ProblemSpec spec;
  std::vector<XiChannel> xi;
  std::vector<EtaSolutionPair> eta;
  LFTMatrix U;
  Eigen::VectorXd cot_gamma;
};

// Run fn(i) for i in [0, n) on up to `threads` workers; the first exception is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

ChannelSet build_channels(const ProblemSpec& spec, const ChannelPolicy& policy, int threads = 1);

struct MicroscopyResult {
  ScatteringSet scattering;
  DetectorMap map;
  double sigma_total = 0;
};
// Psi_out from the scattering amplitudes of `set` and the detector map on `rho_grid` (empty: default).
MicroscopyResult run_microscopy(const ChannelSet& set, double omega, double z_det, std::vector<double> rho_grid = {},
                                int grid_points = 2001);

// The same map composed directly from D_n = sum_l d_l U_nl, bypassing K, R and S.
DetectorMap parabolic_composition(const ChannelSet& set, double omega, double z_det, std::span<const double> rho_grid);

struct ValidationCheck {
  std::string name;
  bool pass = false;
  double value = 0, limit = 0;
};
// Invariant suite on the first configured energy for every m block.
std::vector<ValidationCheck> validate_invariants(const RunConfig& config);

struct RunReport {
  int exit_code = 0;
  std::vector<std::string> files;
};
// Runs the configured mode and writes its CSV (or JSON for validate) into out_dir (empty: config.output).
RunReport run(const RunConfig& config, const std::string& out_dir = "");

}  // namespace lft
