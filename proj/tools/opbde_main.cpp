// Command-line driver: run, compare and sweep.
//
// Exit codes: 0 success, 1 configuration error, 2 solver failure.

#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "opbde/config.hpp"
#include "opbde/errors.hpp"
#include "opbde/experiment.hpp"

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) {
      if (item == "inf") {
        out.push_back(HUGE_VAL);
      } else {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(item, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != item.size()) throw opbde::ConfigError("not a number in list: '" + item + "'");
        out.push_back(v);
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Embedded-domain Cahn-Hilliard solver"};
  app.require_subcommand(1);

  std::string run_config;
  auto* run = app.add_subcommand("run", "Run one configuration");
  run->add_option("config", run_config, "Configuration file")->required();

  std::string ref_config, ext_config, times_text;
  double mask_threshold = 0.5;
  auto* compare = app.add_subcommand("compare", "L2 error between a reference and an extended run");
  compare->add_option("ref", ref_config, "Reference configuration")->required();
  compare->add_option("ext", ext_config, "Extended configuration")->required();
  compare->add_option("--times", times_text, "Comma-separated comparison times")->required();
  compare->add_option("--mask-threshold", mask_threshold, "Compare cells with psi at or above this value");

  std::string sweep_config, sweep_key, values_text, sweep_reference;
  auto* sweep = app.add_subcommand("sweep", "Run one configuration over a list of parameter values");
  sweep->add_option("config", sweep_config, "Configuration file")->required();
  sweep->add_option("--key", sweep_key, "Swept parameter")->required()->check(CLI::IsMember({"eps", "gamma", "dt"}));
  sweep->add_option("--values", values_text, "Comma-separated values")->required();
  sweep->add_option("--reference", sweep_reference, "Reference configuration for L2 errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return opbde::cmd_run(opbde::parse_config(run_config), std::cerr);
    if (*compare) {
      const auto ref = opbde::parse_config(ref_config);
      const auto ext = opbde::parse_config(ext_config);
      return opbde::cmd_compare(ref, ext, parse_list(times_text), std::cerr, mask_threshold);
    }
    if (*sweep) {
      const auto config = opbde::parse_config(sweep_config);
      std::optional<opbde::RunConfig> reference;
      if (!sweep_reference.empty()) reference = opbde::parse_config(sweep_reference);
      const opbde::SweepKey key = sweep_key == "eps"     ? opbde::SweepKey::eps
                                  : sweep_key == "gamma" ? opbde::SweepKey::gamma
                                                         : opbde::SweepKey::dt;
      return opbde::cmd_sweep(config, key, parse_list(values_text), reference, std::cerr);
    }
  } catch (const opbde::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
