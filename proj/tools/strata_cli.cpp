#include <iostream>

#include "CLI11.hpp"
#include "strata/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"strata: numerical checks of logarithmic inequalities on stratified groups"};
  app.require_subcommand(1);
  strata::CliOptions opt;
  std::string out = "out";
  std::uint64_t seed = 0;
  std::string profile;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--tolerance-profile", profile, "slack tolerance profile")
        ->check(CLI::IsMember({"strict", "grid"}));
  };
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  auto* constants = app.add_subcommand("constants", "estimate constants and write constants.csv");
  auto* heat = app.add_subcommand("heat", "simulate the heat flow and check the decay bound");
  for (auto* s : {verify, constants, heat}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : strata::kExitConfig;
  }
  opt.out = out;
  for (auto* s : {verify, constants, heat}) {
    if (s->count("--seed")) opt.seed = seed;
    if (s->count("--tolerance-profile")) opt.tolerance_profile = profile;
  }
  if (*verify) return strata::cmd_verify(opt);
  if (*constants) return strata::cmd_constants(opt);
  return strata::cmd_heat(opt);
}
