// Writes the synthetic benchmark inputs: a labeled dataset with a smooth
// data-rate surface plus heteroscedastic noise, and an oscillating-channel
// replay trace.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dds/synthetic.hpp"
#include "dds/trace.hpp"

int main(int argc, char** argv) {
  CLI::App app{"synthetic benchmark generator"};
  std::string out_dir;
  std::size_t samples = 2000;
  std::size_t ticks = 900;
  std::int64_t seed = 1;
  app.add_option("--out", out_dir, "output directory")->required();
  app.add_option("--samples", samples, "dataset rows");
  app.add_option("--ticks", ticks, "trace ticks (1 Hz)");
  app.add_option("--seed", seed, "generator seed");
  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::create_directories(out_dir);
    const auto dataset_path = (std::filesystem::path(out_dir) / "dataset.csv").string();
    const auto trace_path = (std::filesystem::path(out_dir) / "trace.csv").string();
    const auto seed_u = static_cast<std::uint64_t>(seed);
    dds::save_dataset(dataset_path, dds::make_benchmark_dataset(samples, seed_u));
    dds::save_trace(trace_path, dds::make_oscillating_trace(ticks, dds::derive_seed(seed_u, 1)));
    std::cout << "dataset_csv=" << dataset_path << "\n";
    std::cout << "trace_csv=" << trace_path << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
