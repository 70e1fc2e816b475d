#include "lft/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <thread>

#include <json.hpp>

#include "lft/field_free.hpp"
#include "lft/oracles.hpp"
#include "lft/units.hpp"

namespace lft {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = n;
          }
        }
      });
  }
  if (error) std::rethrow_exception(error);
}

namespace {

std::vector<XiChannel> select_xi(const ProblemSpec& spec, const ChannelPolicy& policy) {
  const bool bound = spec.energy < 0;
  if (policy.n1_total > 0) {
    auto all = solve_xi_channels(spec, policy.n1_total - 1, 0, policy.xi);
    if (bound) std::erase_if(all, [](const XiChannel& c) { return !(c.beta < 1); });
    return all;
  }
  const double high = bound ? 1.0 : policy.beta_high;
  const double low = bound ? -std::numeric_limits<double>::infinity() : policy.beta_low;
  for (int n1_max = 40;; n1_max *= 2) {
    auto all = solve_xi_channels(spec, n1_max, 0, policy.xi);
    if (all.back().beta >= high) {
      std::erase_if(all, [&](const XiChannel& c) { return !(c.beta > low && c.beta < high); });
      return all;
    }
    if (n1_max > 5000) throw std::runtime_error("build_channels: retention window not reached by n1 = 5000");
  }
}

}  // namespace

ChannelSet build_channels(const ProblemSpec& spec, const ChannelPolicy& policy, int threads) {
  ChannelSet set;
  set.spec = spec;
  set.xi = select_xi(spec, policy);
  if (set.xi.empty()) throw std::runtime_error("build_channels: no channel retained");
  const std::size_t n = set.xi.size();
  std::vector<double> log_n_eta(n);
  set.cot_gamma.resize(static_cast<Eigen::Index>(n));
  if (policy.solve_eta) {
    set.eta.resize(n);
    parallel_for(n, threads, [&](std::size_t i) {
      const EtaChannelParams p{spec.energy, spec.field, set.xi[i].beta, spec.m};
      set.eta[i] = solve_eta_channel(p, set.xi[i].n1, policy.eta);
    });
    for (std::size_t i = 0; i < n; ++i) {
      log_n_eta[i] = set.eta[i].log_n_eta();
      set.cot_gamma(static_cast<Eigen::Index>(i)) = std::cos(set.eta[i].gamma) / set.eta[i].sin_gamma;
    }
  } else {
    if (spec.energy < 0) throw ConfigError("field-free eta amplitudes need a positive energy");
    for (std::size_t i = 0; i < n; ++i) {
      log_n_eta[i] = FieldFreeEtaPair(spec.energy, set.xi[i].beta, spec.m).log_nf();
      set.cot_gamma(static_cast<Eigen::Index>(i)) = 0;
    }
  }
  set.U = lft_matrix(spec, set.xi, log_n_eta, policy.ell_max);
  return set;
}

namespace {

std::vector<std::complex<double>> to_std(const Eigen::VectorXcd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

MicroscopyResult run_microscopy(const ChannelSet& set, double omega, double z_det, std::vector<double> rho_grid,
                                int grid_points) {
  if (set.eta.size() != set.xi.size()) throw ConfigError("microscopy needs solved eta channels");
  MicroscopyResult out;
  out.scattering = assemble_scattering(set.U, set.spec.defects, set.spec.dipoles, set.cot_gamma);
  if (rho_grid.empty()) rho_grid = default_rho_grid(set.xi, z_det, grid_points);
  const OutgoingWave wave(set.xi, set.eta, 2 * std::abs(z_det));
  const auto D = to_std(out.scattering.D_minus);
  out.map = differential_cross_section(wave, D, z_det, rho_grid, omega);
  out.sigma_total = total_cross_section(D, omega);
  return out;
}

DetectorMap parabolic_composition(const ChannelSet& set, double omega, double z_det, std::span<const double> rho_grid) {
  const Eigen::VectorXd d = dipole_vector(set.U, set.spec.dipoles);
  const Eigen::VectorXd Dn = set.U.U * d;
  std::vector<std::complex<double>> D(Dn.data(), Dn.data() + Dn.size());
  const OutgoingWave wave(set.xi, set.eta, 2 * std::abs(z_det));
  return differential_cross_section(wave, D, z_det, rho_grid, omega);
}

namespace {

#ifndef LFT_VERSION
#define LFT_VERSION "dev"
#endif

template <class F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(name, e);
  }
}

ChannelPolicy policy_of(const RunConfig& c) {
  ChannelPolicy p;
  p.n1_total = c.n1_total;
  p.beta_low = c.beta_low;
  p.beta_high = c.beta_high;
  p.ell_max = c.ell_max;
  p.solve_eta = c.numeric_eta;
  return p;
}

ProblemSpec spec_of(const RunConfig& c, double energy, int m) {
  ProblemSpec s;
  s.energy = energy;
  s.field = c.field;
  s.m = m;
  s.defects = c.defects;
  if (c.dipoles.contains(m)) s.dipoles = c.dipoles.at(m);
  return s;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const RunConfig& c, int m, const std::string& columns) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << "# lftstark " << LFT_VERSION << "\n";
    out_ << "# config_hash " << c.hash() << "\n";
    out_ << "# mode " << to_string(c.mode) << " m=" << m << " field_v_per_cm=" << fmt(c.field_vcm) << "\n";
    header_ = columns;
  }
  void comment(const std::string& line) { out_ << "# " << line << "\n"; }
  void row(const std::vector<std::string>& cells) {
    if (!header_.empty()) {
      out_ << header_ << "\n";
      header_.clear();
    }
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
  std::string header_;
};

std::filesystem::path output_file(const std::filesystem::path& dir, Mode mode, int m) {
  return dir / (std::string(to_string(mode)) + "_m" + std::to_string(m) + ".csv");
}

// Per-energy results, computed in parallel and emitted in input order.
template <class T, class F>
std::vector<T> per_energy(const RunConfig& c, bool parallel, F&& fn) {
  std::vector<T> out(c.energies.size());
  parallel_for(c.energies.size(), parallel ? c.threads : 1, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace

std::vector<ValidationCheck> validate_invariants(const RunConfig& c) {
  if (c.energies.empty()) throw ConfigError("validate needs an energy");
  std::vector<ValidationCheck> checks;
  auto add = [&](std::string name, double value, double limit) {
    checks.push_back({std::move(name), value <= limit, value, limit});
  };
  for (int m : c.ms) {
    const ProblemSpec spec = spec_of(c, c.energies.front(), m);
    ChannelPolicy policy = policy_of(c);
    policy.solve_eta = true;
    const ChannelSet set = stage("channels", [&] { return build_channels(spec, policy, c.threads); });
    const std::string tag = " (m=" + std::to_string(m) + ")";
    double w_raw = 0, w_ren = 0, gamma_dev = 0;
    for (const auto& pair : set.eta) {
      const double w_expect = (2 / std::numbers::pi) * pair.sin_gamma;
      for (double x : pair.eta_grid) {
        w_raw = std::max(w_raw, std::abs(pair.raw_wronskian_at(x) / (2 / std::numbers::pi) - 1));
        w_ren = std::max(w_ren, std::abs(pair.wronskian_at(x) / w_expect - 1));
      }
      if (spec.energy > 0 && pair.barrier == BarrierClass::above_barrier)
        gamma_dev = std::max(gamma_dev, std::abs(pair.gamma - std::numbers::pi / 2));
    }
    add("wronskian_raw" + tag, w_raw, c.tol.wronskian);
    add("wronskian_renormalized" + tag, w_ren, c.tol.wronskian);
    if (spec.energy > 0) add("gamma_above_barrier" + tag, gamma_dev, c.tol.gamma);
    add("lft_imaginary_residue" + tag, set.U.max_imag_residue, c.tol.imag_residue);
    const ScatteringSet sc = stage("scattering", [&] {
      return assemble_scattering(set.U, spec.defects, spec.dipoles, set.cot_gamma, c.tol.symmetry);
    });
    add("r_symmetry" + tag, sc.symmetry_error, c.tol.symmetry);
    add("s_unitarity" + tag, sc.unitarity_error, c.tol.symmetry);
    add("s_two_forms" + tag, sc.form_difference, c.tol.symmetry);
  }
  std::vector<oracle::RydbergLevel> levels;
  for (const auto& lv : oracle::sodium_levels())
    if (c.defects.contains(lv.ell)) levels.push_back(lv);
  if (!levels.empty()) add("rydberg_self_check", oracle::rydberg_self_check(c.defects, levels), 0.01);
  return checks;
}

RunReport run(const RunConfig& c, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir = out_dir.empty() ? fs::path(c.output) : fs::path(out_dir);
  fs::create_directories(dir);
  RunReport report;
  const bool many = c.energies.size() > 1;
  // parallelize across energies when there are several, otherwise inside the channel solve
  const int inner = many ? 1 : c.threads;

  if (c.mode == Mode::validate) {
    const auto checks = validate_invariants(c);
    nlohmann::ordered_json doc;
    doc["version"] = LFT_VERSION;
    doc["config_hash"] = c.hash();
    bool all = true;
    for (const auto& ch : checks) {
      doc["checks"].push_back({{"name", ch.name}, {"pass", ch.pass}, {"value", ch.value}, {"limit", ch.limit}});
      all = all && ch.pass;
    }
    doc["pass"] = all;
    const fs::path path = dir / "validate.json";
    std::ofstream(path) << doc.dump(2) << "\n";
    std::cout << doc.dump(2) << "\n";
    report.files.push_back(path.string());
    report.exit_code = all ? 0 : 1;
    return report;
  }

  for (int m : c.ms) {
    const fs::path path = output_file(dir, c.mode, m);
    switch (c.mode) {
      case Mode::lft_map: {
        const auto sets = per_energy<ChannelSet>(c, many, [&](std::size_t i) {
          return stage("channels", [&] { return build_channels(spec_of(c, c.energies[i], m), policy_of(c), inner); });
        });
        CsvFile csv(path, c, m, "energy_cm,n1,beta,ell,U");
        for (std::size_t i = 0; i < sets.size(); ++i)
          for (Eigen::Index r = 0; r < sets[i].U.U.rows(); ++r)
            for (Eigen::Index j = 0; j < sets[i].U.U.cols(); ++j)
              csv.row({fmt(c.energies_cm[i]), std::to_string(sets[i].U.n1[r]), fmt(sets[i].U.beta[r]),
                       std::to_string(sets[i].U.ell_min() + j), fmt(sets[i].U.U(r, j))});
        break;
      }
      case Mode::reconstruct: {
        std::vector<CoulombPoint> pts;
        for (int i = 0; i < c.r_points; ++i)
          pts.push_back({c.r_min + (c.r_max - c.r_min) * i / (c.r_points - 1), c.theta});
        using Rows = std::vector<std::vector<std::string>>;
        const auto rows = per_energy<Rows>(c, many, [&](std::size_t i) {
          const ProblemSpec spec = spec_of(c, c.energies[i], m);
          ChannelPolicy policy = policy_of(c);
          std::vector<XiChannel> xi;
          std::vector<EtaSolutionPair> eta;
          if (c.chi_source == ChiSource::field_free) {
            xi = stage("xi_channels", [&] {
              auto all = policy.n1_total > 0 ? solve_xi_channels(spec, policy.n1_total - 1)
                                             : build_channels(spec, [&] {
                                                 auto p = policy;
                                                 p.solve_eta = false;
                                                 return p;
                                               }(), inner).xi;
              if (spec.energy < 0) std::erase_if(all, [](const XiChannel& x) { return !(x.beta < 1); });
              return all;
            });
          } else {
            ChannelSet set = stage("channels", [&] { return build_channels(spec, policy, inner); });
            xi = std::move(set.xi);
            eta = std::move(set.eta);
          }
          ReconstructOptions opt;
          opt.source = c.chi_source;
          Rows out;
          for (int ell : c.reconstruct_ells) {
            const auto rec = stage("frame_transform", [&] {
              return reconstruct_irregular_spherical(spec, xi, eta, ell, pts, opt);
            });
            for (std::size_t p = 0; p < pts.size(); ++p)
              out.push_back({fmt(c.energies_cm[i]), std::to_string(ell), fmt(pts[p].r), fmt(rec.g_analytic[p]),
                             fmt(rec.g_lft[p]), fmt(rec.rel_err[p])});
          }
          return out;
        });
        CsvFile csv(path, c, m, "energy_cm,ell,r,g_analytic,g_lft,rel_err");
        csv.comment("theta=" + fmt(c.theta));
        for (const auto& block : rows)
          for (const auto& r : block) csv.row(r);
        break;
      }
      case Mode::spectrum: {
        struct Point {
          double sigma = 0;
          std::vector<int> n1;
          std::vector<double> beta, d2;
        };
        const auto pts = per_energy<Point>(c, many, [&](std::size_t i) {
          const ProblemSpec spec = spec_of(c, c.energies[i], m);
          const ChannelSet set = stage("channels", [&] { return build_channels(spec, policy_of(c), inner); });
          const ScatteringSet sc = stage("scattering", [&] {
            return assemble_scattering(set.U, spec.defects, spec.dipoles, set.cot_gamma, c.tol.symmetry);
          });
          Point p;
          const std::vector<std::complex<double>> D(sc.D_minus.data(), sc.D_minus.data() + sc.D_minus.size());
          p.sigma = total_cross_section(D, c.omega_at(spec.energy));
          for (std::size_t k = 0; k < D.size(); ++k) {
            p.n1.push_back(set.U.n1[k]);
            p.beta.push_back(set.U.beta[k]);
            p.d2.push_back(std::norm(D[k]));
          }
          return p;
        });
        CsvFile csv(path, c, m, "energy_cm,sigma_total,n1,beta,abs_D_minus_sq");
        for (std::size_t i = 0; i < pts.size(); ++i)
          for (std::size_t k = 0; k < pts[i].n1.size(); ++k)
            csv.row({fmt(c.energies_cm[i]), fmt(pts[i].sigma), std::to_string(pts[i].n1[k]), fmt(pts[i].beta[k]),
                     fmt(pts[i].d2[k])});
        break;
      }
      case Mode::microscopy: {
        const auto res = per_energy<MicroscopyResult>(c, many, [&](std::size_t i) {
          const ProblemSpec spec = spec_of(c, c.energies[i], m);
          const ChannelSet set = stage("channels", [&] { return build_channels(spec, policy_of(c), inner); });
          return stage("microscopy", [&] {
            return run_microscopy(set, c.omega_at(spec.energy), c.z_det, {}, c.rho_points);
          });
        });
        CsvFile csv(path, c, m, "energy_cm,rho_au,dsigma_drho");
        csv.comment("z_det_mm=" + fmt(c.z_det_mm));
        for (std::size_t i = 0; i < res.size(); ++i) {
          csv.comment("energy_cm=" + fmt(c.energies_cm[i]) + " sigma_total=" + fmt(res[i].sigma_total) +
                      " integrated=" + fmt(res[i].map.integrated()));
          if (res[i].map.coverage_warning)
            std::cerr << "warning: energy " << fmt(c.energies_cm[i]) << " cm-1: " << res[i].map.warning << "\n";
        }
        for (std::size_t i = 0; i < res.size(); ++i)
          for (std::size_t k = 0; k < res[i].map.rho_grid.size(); ++k)
            csv.row({fmt(c.energies_cm[i]), fmt(res[i].map.rho_grid[k]), fmt(res[i].map.dsigma_drho[k])});
        break;
      }
      case Mode::validate: break;
    }
    report.files.push_back(path.string());
  }
  return report;
}

}  // namespace lft
