#include "lft/config.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include <json.hpp>

#include "lft/problem.hpp"
#include "lft/units.hpp"

namespace lft {

namespace {

using json = nlohmann::json;

const std::map<std::string, Mode>& mode_names() {
  static const std::map<std::string, Mode> names{{"lft-map", Mode::lft_map},
                                                {"reconstruct", Mode::reconstruct},
                                                {"spectrum", Mode::spectrum},
                                                {"microscopy", Mode::microscopy},
                                                {"validate", Mode::validate}};
  return names;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  std::string unknown;
  for (const auto& [key, val] : obj.items())
    if (!allowed.contains(key)) unknown += (unknown.empty() ? "" : ", ") + key;
  if (!unknown.empty()) throw ConfigError("unknown key(s) in " + where + ": " + unknown);
}

// A finite number, given as a JSON number or a numeric string.
double number(const json& v, const std::string& key) {
  double x = 0;
  if (v.is_number()) {
    x = v.get<double>();
  } else if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.empty()) throw ConfigError(key + ": empty value");
    std::size_t used = 0;
    try {
      x = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ConfigError(key + ": not a number: '" + s + "'");
    }
    if (used != s.size()) throw ConfigError(key + ": not a number: '" + s + "'");
  } else {
    throw ConfigError(key + ": expected a number");
  }
  if (!std::isfinite(x)) throw ConfigError(key + ": not finite");
  return x;
}

int integer(const json& v, const std::string& key) {
  const double x = number(v, key);
  if (x != std::round(x)) throw ConfigError(key + ": expected an integer");
  return static_cast<int>(x);
}

std::vector<double> number_list(const json& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(number(x, key));
  } else {
    out.push_back(number(v, key));
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::map<int, double> ell_table(const json& v, const std::string& key) {
  if (!v.is_object()) throw ConfigError(key + ": expected an object keyed by l");
  std::map<int, double> out;
  for (const auto& [k, x] : v.items()) {
    int ell = 0;
    try {
      std::size_t used = 0;
      ell = std::stoi(k, &used);
      if (used != k.size()) throw std::invalid_argument(k);
    } catch (const std::exception&) {
      throw ConfigError(key + ": key '" + k + "' is not an angular momentum");
    }
    if (ell < 0) throw ConfigError(key + ": negative l");
    out[ell] = number(x, key + "." + k);
  }
  return out;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

const char* to_string(Mode m) {
  for (const auto& [name, mode] : mode_names())
    if (mode == m) return name.c_str();
  return "?";
}

Mode parse_mode(std::string_view s) {
  const auto it = mode_names().find(std::string(s));
  if (it == mode_names().end()) throw ConfigError("unknown mode '" + std::string(s) + "'");
  return it->second;
}

double RunConfig::omega_at(double energy_au) const {
  if (omega > 0) return omega;
  if (omega_offset_cm > 0) return energy_au + units::cm_to_hartree(omega_offset_cm);
  throw ConfigError("photon frequency not configured (omega_au or omega_offset_cm)");
}

const std::map<int, double>& RunConfig::dipoles_for(int m) const {
  const auto it = dipoles.find(m);
  if (it == dipoles.end()) throw ConfigError("no dipoles for m=" + std::to_string(m));
  return it->second;
}

std::string RunConfig::hash() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical)));
  return buf;
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc,
                 {"mode", "energy_cm", "field_v_per_cm", "m", "ell_max", "n1", "defects", "dipoles", "detector_z_mm",
                  "rho_grid", "omega_au", "omega_offset_cm", "reconstruct", "output", "threads", "tolerances",
                  "eta_amplitudes"},
                 "config");
  RunConfig c = default_config();
  c.canonical = doc.dump();
  if (!doc.contains("mode")) throw ConfigError("missing required key 'mode'");
  if (!doc["mode"].is_string()) throw ConfigError("mode: expected a string");
  c.mode = parse_mode(doc["mode"].get<std::string>());
  const std::string mode = to_string(c.mode);

  auto require = [&](const char* key) {
    if (!doc.contains(key)) throw ConfigError("mode " + mode + " requires '" + key + "'");
  };
  if (c.mode != Mode::validate) {
    require("energy_cm");
    require("field_v_per_cm");
    require("m");
  }
  if (c.mode == Mode::spectrum || c.mode == Mode::microscopy) {
    require("defects");
    require("dipoles");
    if (!doc.contains("omega_au") && !doc.contains("omega_offset_cm"))
      throw ConfigError("mode " + mode + " requires 'omega_au' or 'omega_offset_cm'");
  }

  if (doc.contains("energy_cm")) c.energies_cm = number_list(doc["energy_cm"], "energy_cm");
  c.energies.clear();
  for (double e : c.energies_cm) {
    if (e == 0) throw ConfigError("energy_cm: zero energy is not supported");
    c.energies.push_back(units::cm_to_hartree(e));
  }
  if (doc.contains("field_v_per_cm")) c.field_vcm = number(doc["field_v_per_cm"], "field_v_per_cm");
  if (c.field_vcm < 0) throw ConfigError("field_v_per_cm: must be >= 0");
  c.field = units::vcm_to_au(c.field_vcm);
  if (doc.contains("m")) {
    c.ms.clear();
    if (doc["m"].is_array()) {
      for (const auto& x : doc["m"]) c.ms.push_back(integer(x, "m"));
    } else {
      c.ms.push_back(integer(doc["m"], "m"));
    }
    if (c.ms.empty()) throw ConfigError("m: empty list");
    for (int& m : c.ms) m = std::abs(m);
  }
  if (doc.contains("ell_max")) c.ell_max = integer(doc["ell_max"], "ell_max");
  for (int m : c.ms)
    if (c.ell_max < m) throw ConfigError("ell_max below |m|");
  if (doc.contains("n1")) {
    const json& n1 = doc["n1"];
    if (!n1.is_object()) throw ConfigError("n1: expected an object");
    reject_unknown(n1, {"total", "beta_low", "beta_high"}, "n1");
    if (n1.contains("total")) c.n1_total = integer(n1["total"], "n1.total");
    if (n1.contains("beta_low")) c.beta_low = number(n1["beta_low"], "n1.beta_low");
    if (n1.contains("beta_high")) c.beta_high = number(n1["beta_high"], "n1.beta_high");
    if (c.n1_total < 0 || !(c.beta_low < c.beta_high)) throw ConfigError("n1: invalid policy");
  }
  if (doc.contains("eta_amplitudes")) {
    const std::string s = doc["eta_amplitudes"].is_string() ? doc["eta_amplitudes"].get<std::string>() : "";
    if (s == "numeric") c.numeric_eta = true;
    else if (s == "field-free") c.numeric_eta = false;
    else throw ConfigError("eta_amplitudes: expected 'numeric' or 'field-free'");
  }
  if (doc.contains("defects")) c.defects = ell_table(doc["defects"], "defects");
  for (int ell = 4; ell <= c.ell_max; ++ell) c.defects.try_emplace(ell, 0.0);
  if (doc.contains("dipoles")) {
    const json& d = doc["dipoles"];
    if (!d.is_object()) throw ConfigError("dipoles: expected an object");
    bool per_m = false;
    for (const auto& [k, v] : d.items()) per_m = per_m || v.is_object();
    c.dipoles.clear();
    if (per_m) {
      for (const auto& [k, v] : d.items()) {
        if (k.size() < 2 || k[0] != 'm') throw ConfigError("dipoles: per-m blocks are keyed 'm0', 'm1', ...");
        c.dipoles[integer(json(k.substr(1)), "dipoles." + k)] = ell_table(v, "dipoles." + k);
      }
    } else {
      const auto table = ell_table(d, "dipoles");
      for (int m : c.ms) c.dipoles[m] = table;
    }
    for (int m : c.ms)
      if (!c.dipoles.contains(m)) throw ConfigError("dipoles: no block for m=" + std::to_string(m));
  }
  if (doc.contains("detector_z_mm")) c.z_det_mm = number(doc["detector_z_mm"], "detector_z_mm");
  if (!(c.z_det_mm < 0)) throw ConfigError("detector_z_mm: the detector must lie down-field (negative z)");
  c.z_det = units::mm_to_au(c.z_det_mm);
  if (doc.contains("rho_grid")) {
    const json& g = doc["rho_grid"];
    if (!g.is_object()) throw ConfigError("rho_grid: expected an object");
    reject_unknown(g, {"points"}, "rho_grid");
    if (g.contains("points")) c.rho_points = integer(g["points"], "rho_grid.points");
    if (c.rho_points < 3) throw ConfigError("rho_grid.points: at least 3");
  }
  if (doc.contains("omega_au")) {
    c.omega = number(doc["omega_au"], "omega_au");
    if (!(c.omega > 0)) throw ConfigError("omega_au: must be positive");
  }
  if (doc.contains("omega_offset_cm")) {
    c.omega_offset_cm = number(doc["omega_offset_cm"], "omega_offset_cm");
    if (!(c.omega_offset_cm > 0)) throw ConfigError("omega_offset_cm: must be positive");
  }
  if (doc.contains("reconstruct")) {
    const json& r = doc["reconstruct"];
    if (!r.is_object()) throw ConfigError("reconstruct: expected an object");
    reject_unknown(r, {"ell", "r_min", "r_max", "points", "theta", "chi"}, "reconstruct");
    if (r.contains("ell")) {
      c.reconstruct_ells.clear();
      for (double x : number_list(r["ell"], "reconstruct.ell")) c.reconstruct_ells.push_back(static_cast<int>(x));
    }
    if (r.contains("r_min")) c.r_min = number(r["r_min"], "reconstruct.r_min");
    if (r.contains("r_max")) c.r_max = number(r["r_max"], "reconstruct.r_max");
    if (r.contains("points")) c.r_points = integer(r["points"], "reconstruct.points");
    if (r.contains("theta")) c.theta = number(r["theta"], "reconstruct.theta");
    if (r.contains("chi")) {
      const std::string s = r["chi"].is_string() ? r["chi"].get<std::string>() : "";
      if (s == "field-free") c.chi_source = ChiSource::field_free;
      else if (s == "numeric") c.chi_source = ChiSource::numeric;
      else if (s == "automatic") c.chi_source = ChiSource::automatic;
      else throw ConfigError("reconstruct.chi: expected 'field-free', 'numeric' or 'automatic'");
    }
    if (!(c.r_min > 0 && c.r_max > c.r_min && c.r_points >= 2)) throw ConfigError("reconstruct: invalid r grid");
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string() || doc["output"].get<std::string>().empty())
      throw ConfigError("output: expected a path");
    c.output = doc["output"].get<std::string>();
  }
  if (doc.contains("threads")) c.threads = std::max(1, integer(doc["threads"], "threads"));
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (!t.is_object()) throw ConfigError("tolerances: expected an object");
    reject_unknown(t, {"wronskian", "symmetry", "gamma", "imag_residue", "bound"}, "tolerances");
    if (t.contains("wronskian")) c.tol.wronskian = number(t["wronskian"], "tolerances.wronskian");
    if (t.contains("symmetry")) c.tol.symmetry = number(t["symmetry"], "tolerances.symmetry");
    if (t.contains("gamma")) c.tol.gamma = number(t["gamma"], "tolerances.gamma");
    if (t.contains("imag_residue")) c.tol.imag_residue = number(t["imag_residue"], "tolerances.imag_residue");
    if (t.contains("bound")) c.tol.bound = number(t["bound"], "tolerances.bound");
  }
  if (c.mode != Mode::validate && c.field == 0)
    for (double e : c.energies)
      if (e < 0) throw ConfigError("negative energy without a field has no continuum");
  return c;
}

RunConfig default_config() {
  RunConfig c;
  c.mode = Mode::validate;
  c.energies_cm = {135.8231};
  c.energies = {units::cm_to_hartree(135.8231)};
  c.field_vcm = 640;
  c.field = units::vcm_to_au(640);
  c.ms = {1};
  c.defects = {{0, 1.348}, {1, 0.855}, {2, 0.0159}, {3, 0.0016}};
  for (int ell = 4; ell <= c.ell_max; ++ell) c.defects[ell] = 0;
  c.dipoles = {{0, {{0, std::sqrt(1.0 / 3)}, {2, std::sqrt(4.0 / 15)}}}, {1, {{2, std::sqrt(3.0 / 15)}}}};
  c.z_det = units::mm_to_au(c.z_det_mm);
  c.omega_offset_cm = 24476.09;
  c.theta = 5 * std::numbers::pi / 6;
  c.canonical = "{}";
  return c;
}

}  // namespace lft
