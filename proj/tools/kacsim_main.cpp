#include <CLI11.hpp>
#include <iostream>

#include "kacsim/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"System/reservoir Kac model simulator and verification toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kac::kVersion);

  kac::RunOptions opts;
  std::string config, out;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::size_t k = 0, n = 0, K = 0, L = 0;

  for (const auto& name : kac::subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--workers", workers, "Worker threads (default: KACSIM_WORKERS or config)")
        ->check(CLI::PositiveNumber);
    if (name == "verify-sum-rule") {
      sub->add_option("--k", k, "Word length");
      sub->add_option("--n", n, "Number of sampled words")->check(CLI::PositiveNumber);
    }
    if (name == "discretize-angle" || name == "discretize-sphere") sub->add_option("--K", K, "Angular order");
    if (name == "discretize-sphere") sub->add_option("--L", L, "Legendre order");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kac::kExitConfigError;
  }

  CLI::App* sub = app.get_subcommands().front();
  opts.subcommand = sub->get_name();
  auto given = [&](const char* flag) { return sub->count(flag) > 0; };
  if (given("--config")) opts.config_path = config;
  if (given("--out")) opts.out_dir = out;
  if (given("--seed")) opts.seed = seed;
  if (given("--workers")) opts.workers = workers;
  if (opts.subcommand == "verify-sum-rule") {
    if (given("--k")) opts.k = k;
    if (given("--n")) opts.n = n;
  }
  if (opts.subcommand.starts_with("discretize") && given("--K")) opts.K = K;
  if (opts.subcommand == "discretize-sphere" && given("--L")) opts.L = L;

  return kac::run(opts, std::cout, std::cerr);
}
