// Experiment runner: ftrl-experts <quantile|semiadv|lowerbound|custom> --config FILE

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ftrl/errors.hpp"
#include "ftrl/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Overrides {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config_path, "JSON experiment configuration")->required();
  sub->add_option("--out-dir", o.out_dir, "output directory (overrides output_dir)");
  sub->add_option("--seed", o.seed, "random seed (overrides environment.seed)");
  sub->add_option("--threads", o.threads, "worker threads (overrides threads)")
      ->check(CLI::PositiveNumber);
}

int run(ftrl::ExperimentKind kind, const Overrides& o) {
  ftrl::ExperimentConfig config = ftrl::load_config_for(o.config_path, kind);
  if (o.out_dir) config.output_dir = *o.out_dir;
  if (o.seed) config.environment.seed = *o.seed;
  if (o.threads) config.threads = *o.threads;
  for (const auto& path : ftrl::run_experiment(config)) std::cout << path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FTRL prediction-with-experts experiments"};
  app.require_subcommand(1);
  Overrides o;
  struct Entry {
    const char* name;
    const char* help;
    ftrl::ExperimentKind kind;
  };
  const Entry entries[] = {
      {"quantile", "quantile regret on replicated Hadamard experts", ftrl::ExperimentKind::quantile},
      {"semiadv", "best-expert regret on semi-adversarial sequences", ftrl::ExperimentKind::semiadv},
      {"lowerbound", "Monte-Carlo check of the quantile lower bound", ftrl::ExperimentKind::lowerbound},
      {"custom", "any algorithm on losses read from CSV", ftrl::ExperimentKind::custom},
  };
  for (const auto& e : entries) add_common(app.add_subcommand(e.name, e.help), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    for (const auto& e : entries) {
      if (app.got_subcommand(e.name)) return run(e.kind, o);
    }
  } catch (const ftrl::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ftrl::ContractError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitConfig;
}
