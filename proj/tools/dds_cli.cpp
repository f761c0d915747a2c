// Command-line front end: train / validate / simulate / export.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dds/dds.hpp"

namespace {

dds::RunConfig resolve_config(const std::string& config_path, bool seed_given,
                              std::int64_t seed) {
  dds::RunConfig cfg;
  if (!config_path.empty()) cfg = dds::parse_config_file(config_path);
  if (seed_given) cfg.seed = static_cast<std::uint64_t>(seed);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"data-driven network performance simulation toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::int64_t seed = 0;
  bool seed_given = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value configuration file");
    cmd->add_option("--seed", seed, "global seed; overrides the config value")
        ->each([&](const std::string&) { seed_given = true; });
    cmd->add_option("--out", out_path, "output path")->required();
  };

  std::string dataset_path, model_path, trace_path;

  CLI::App* train = app.add_subcommand("train", "train a model bundle from a dataset CSV");
  train->add_option("dataset", dataset_path, "dataset CSV")->required();
  add_common(train);

  CLI::App* validate =
      app.add_subcommand("validate", "compare model resampling against a measured dataset");
  validate->add_option("model", model_path, "model bundle directory")->required();
  validate->add_option("dataset", dataset_path, "dataset CSV")->required();
  add_common(validate);

  CLI::App* simulate =
      app.add_subcommand("simulate", "replay transmission schemes over a trace CSV");
  simulate->add_option("model", model_path, "model bundle directory")->required();
  simulate->add_option("trace", trace_path, "trace CSV")->required();
  add_common(simulate);

  CLI::App* exp = app.add_subcommand("export", "export the forest as conditional source text");
  exp->add_option("model", model_path, "model bundle directory")->required();
  add_common(exp);

  CLI11_PARSE(app, argc, argv);

  try {
    const dds::RunConfig cfg = resolve_config(config_path, seed_given, seed);
    if (train->parsed()) {
      dds::cmd_train(dataset_path, cfg, out_path, std::cout);
    } else if (validate->parsed()) {
      dds::cmd_validate(model_path, dataset_path, cfg, out_path, std::cout);
    } else if (simulate->parsed()) {
      dds::cmd_simulate(model_path, trace_path, cfg, out_path, std::cout);
    } else if (exp->parsed()) {
      dds::cmd_export(model_path, cfg, out_path, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
