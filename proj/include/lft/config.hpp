#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lft/frame_transform.hpp"

namespace lft {

enum class Mode { lft_map, reconstruct, spectrum, microscopy, validate };
const char* to_string(Mode m);
Mode parse_mode(std::string_view s);

struct Tolerances {
  double wronskian = 1e-6;
  double symmetry = 1e-10;      // R symmetry, S unitarity, two-form agreement
  double gamma = 1e-3;          // |gamma - pi/2| above the barrier
  double imag_residue = 1e-10;  // continuation of U
  double bound = 0.02;          // reconstruction regression bound
};

// Validated run description in atomic units; the *_cm / *_vcm / *_mm fields keep the inputs.
struct RunConfig {
  Mode mode = Mode::validate;
  std::vector<double> energies_cm, energies;
  double field_vcm = 0, field = 0;
  std::vector<int> ms{1};
  int ell_max = 6;
  int n1_total = 0;  // 0: retention window
  double beta_low = -0.2, beta_high = 1.2;
  bool numeric_eta = true;  // lft-map: N_eta from solved channels or field-free amplitudes
  std::map<int, double> defects;  // l >= 4 up to ell_max default to 0 when absent
  std::map<int, std::map<int, double>> dipoles;  // per m block
  double z_det_mm = -1, z_det = 0;
  int rho_points = 2001;
  double omega = 0;             // > 0: fixed photon frequency (a.u.)
  double omega_offset_cm = 0;   // otherwise omega = (offset + eps) in cm^-1
  std::vector<int> reconstruct_ells{1, 2, 3, 6};
  double r_min = 10, r_max = 80, theta = 0;  // default_config sets 5 pi / 6
  int r_points = 71;
  ChiSource chi_source = ChiSource::field_free;
  Tolerances tol;
  std::string output = ".";
  int threads = 1;
  std::string canonical;  // normalized document, hashed into output headers

  double omega_at(double energy_au) const;
  const std::map<int, double>& dipoles_for(int m) const;
  std::string hash() const;
};

// Parses a JSON document.  Unknown keys and missing mode requirements raise ConfigError.
RunConfig parse_config(std::string_view text);
// Sodium defaults at eps = +135.8231 cm^-1, F = 640 V/cm, m = 1.
RunConfig default_config();

}  // namespace lft
