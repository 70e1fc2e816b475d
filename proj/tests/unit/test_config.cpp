#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lft/config.hpp"
#include "lft/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

std::string message_of(const std::string& text) {
  try {
    lft::parse_config(text);
  } catch (const lft::ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("lftstark_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("unit conversions of the sodium defaults") {
  const auto c = lft::parse_config(R"({"mode": "lft-map", "energy_cm": 135.8231, "field_v_per_cm": 640, "m": 1})");
  REQUIRE(c.energies.size() == 1);
  CHECK(c.energies[0] == doctest::Approx(6.18857e-4).epsilon(1e-5));
  CHECK(c.field == doctest::Approx(1.24460e-7).epsilon(1e-5));
  CHECK(c.mode == lft::Mode::lft_map);
}

TEST_CASE("unknown keys are listed") {
  const auto msg = message_of(R"({"mode": "validate", "feild": 1, "colour": 2})");
  CHECK(msg.find("feild") != std::string::npos);
  CHECK(msg.find("colour") != std::string::npos);
}

TEST_CASE("missing keys name the mode") {
  auto msg = message_of(R"({"mode": "spectrum", "energy_cm": 100, "field_v_per_cm": 640, "m": 1})");
  CHECK(msg.find("spectrum") != std::string::npos);
  CHECK(msg.find("defects") != std::string::npos);
  msg = message_of(R"({"mode": "reconstruct", "field_v_per_cm": 640, "m": 1})");
  CHECK(msg.find("reconstruct") != std::string::npos);
  CHECK(msg.find("energy_cm") != std::string::npos);
  CHECK(!message_of(R"({"energy_cm": 100})").empty());
}

TEST_CASE("malformed values") {
  CHECK(message_of(R"({"mode": "lft-map", "energy_cm": 100, "field_v_per_cm": "", "m": 1})").find("empty") !=
        std::string::npos);
  CHECK(!message_of(R"({"mode": "lft-map", "energy_cm": 100, "field_v_per_cm": "6x", "m": 1})").empty());
  CHECK(!message_of(R"({"mode": "lft-map", "energy_cm": 0, "field_v_per_cm": 640, "m": 1})").empty());
  CHECK(!message_of(R"({"mode": "lft-map", "energy_cm": 100, "field_v_per_cm": -1, "m": 1})").empty());
  CHECK(!message_of(R"({"mode": "fly", "energy_cm": 100})").empty());
  CHECK(!message_of("{mode").empty());
  CHECK(!message_of(R"({"mode": "microscopy", "energy_cm": 100, "field_v_per_cm": 640, "m": 1, "defects": {},
                        "dipoles": {"m1": {"2": 1}}, "omega_au": 0.1, "detector_z_mm": 1})")
             .empty());
}

TEST_CASE("numeric strings are accepted") {
  const auto c = lft::parse_config(R"({"mode": "lft-map", "energy_cm": "135.8231", "field_v_per_cm": "640", "m": 1})");
  CHECK(c.field == doctest::Approx(1.24460e-7).epsilon(1e-5));
}

TEST_CASE("validate on the defaults exits 0") {
  const auto dir = scratch("validate");
  const auto report = lft::run(lft::default_config(), dir.string());
  CHECK(report.exit_code == 0);
  CHECK(fs::exists(dir / "validate.json"));
}

TEST_CASE("repeated runs write identical CSV") {
  const auto cfg = lft::parse_config(
      R"({"mode": "lft-map", "energy_cm": 135.8231, "field_v_per_cm": 640, "m": 1, "eta_amplitudes": "field-free"})");
  const auto a = scratch("csv_a"), b = scratch("csv_b");
  const auto ra = lft::run(cfg, a.string());
  const auto rb = lft::run(cfg, b.string());
  REQUIRE(ra.files.size() == 1);
  REQUIRE(rb.files.size() == 1);
  const auto ta = slurp(ra.files[0]);
  CHECK(!ta.empty());
  CHECK(ta == slurp(rb.files[0]));
}

}  // TEST_SUITE
