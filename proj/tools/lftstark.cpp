#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lft/config.hpp"
#include "lft/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Local-frame-transformation Stark calculations"};
  std::string config_path, mode, out;
  int threads = 0;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--mode", mode, "lft-map, reconstruct, spectrum, microscopy or validate (overrides the config)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "output directory");
  CLI11_PARSE(app, argc, argv);

  try {
    lft::RunConfig config;
    if (config_path.empty()) {
      if (!mode.empty() && mode != "validate") {
        std::cerr << "error: mode " << mode << " needs --config\n";
        return 2;
      }
      config = lft::default_config();
    } else {
      std::ifstream in(config_path);
      std::stringstream text;
      text << in.rdbuf();
      if (!mode.empty()) {
        // re-validate with the requested mode, so mode-specific requirements apply
        auto doc = nlohmann::json::parse(text.str(), nullptr, true, true);
        doc["mode"] = mode;
        config = lft::parse_config(doc.dump());
      } else {
        config = lft::parse_config(text.str());
      }
    }
    if (threads > 0) config.threads = threads;
    const auto report = lft::run(config, out);
    for (const auto& f : report.files) std::cerr << "wrote " << f << "\n";
    return report.exit_code;
  } catch (const lft::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const lft::PipelineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.config() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
