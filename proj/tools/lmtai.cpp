#include <iostream>

#include "CLI11.hpp"
#include "lmtai/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"LMT Raman atom-interferometer loss and error simulator"};
  app.require_subcommand(1, 1);
  lmtai::CliRequest req;
  std::uint64_t seed = 0;
  int samples = 0;
  std::string q_mode, pulse_mode;

  for (const auto& name : lmtai::commands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", req.config_path, "key = value configuration file")->required();
    sub->add_option("--out", req.out_path, "output table path")->required();
    sub->add_option("--seed", seed, "base RNG seed");
    sub->add_option("--samples", samples, "atoms per ensemble")->check(CLI::Range(2, 100000000));
    sub->add_option("--q-mode", q_mode, "loss model in the statistics")
        ->check(CLI::IsMember({"zero", "constant", "random"}));
    sub->add_option("--pulse-mode", pulse_mode, "pulse length rule")
        ->check(CLI::IsMember({"table", "calibrated"}));
    sub->final_callback([&, sub, name] {
      req.command = name;
      if (sub->count("--seed")) req.seed = seed;
      if (sub->count("--samples")) req.samples = samples;
      if (sub->count("--q-mode")) req.q_mode = q_mode;
      if (sub->count("--pulse-mode")) req.pulse_mode = pulse_mode;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : lmtai::kExitUsage;
  }
  return lmtai::dispatch(req, std::cerr);
}
