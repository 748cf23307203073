#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "fmab/harness.hpp"

namespace {

struct Overrides {
  std::optional<std::int64_t> seed;
  std::optional<std::int64_t> repeats;
  std::optional<std::string> out;
};

void add_overrides(CLI::App* cmd, std::string& path, Overrides& o) {
  cmd->add_option("config", path, "flat key = value config file")->required();
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--repeats", o.repeats, "number of repeats");
  cmd->add_option("--out", o.out, "output directory");
}

fmab::ExperimentConfig load(const std::string& path, const Overrides& o) {
  auto config = fmab::ExperimentConfig::load(path);
  if (o.seed) config.set("seed", std::to_string(*o.seed));
  if (o.repeats) config.set("repeats", std::to_string(*o.repeats));
  if (o.out) config.set("out", *o.out);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional multi-armed bandit experiments and bound calculators"};
  app.require_subcommand(1);

  std::string run_path, bounds_path, compare_path;
  Overrides run_o, bounds_o, compare_o;
  auto* run = app.add_subcommand("run", "run the configured experiment; prints summary JSON");
  add_overrides(run, run_path, run_o);
  auto* bounds = app.add_subcommand("bounds", "evaluate bound calculators; prints JSON");
  add_overrides(bounds, bounds_path, bounds_o);
  auto* compare = app.add_subcommand("compare", "allocator rank table; prints JSON");
  add_overrides(compare, compare_path, compare_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto config = load(run_path, run_o);
      const auto result = fmab::run_experiment(config);
      nlohmann::json doc = result.summary.to_json();
      doc["manifest"] = result.manifest;
      std::cout << doc.dump(2) << "\n";
    } else if (bounds->parsed()) {
      const auto config = load(bounds_path, bounds_o);
      const auto report = fmab::emit_bounds_report(config);
      if (!config.out_dir().empty()) {
        std::vector<fmab::Artifact> artifacts;
        fmab::write_artifact(config.out_dir(), "bounds.json", report.dump(2) + "\n", artifacts);
      }
      std::cout << report.dump(2) << "\n";
    } else if (compare->parsed()) {
      auto config = load(compare_path, compare_o);
      if (!config.has("experiment")) config.set("experiment", "baseline_compare");
      if (config.experiment() != "baseline_compare") {
        throw fmab::Error(fmab::ErrorCode::kConfiguration, "compare needs experiment = baseline_compare");
      }
      const auto result = fmab::run_experiment(config);
      std::cout << result.summary.extra.at("rank_table").dump(2) << "\n";
    }
  } catch (const fmab::Error& e) {
    std::fprintf(stderr, "fmab: error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fmab: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
