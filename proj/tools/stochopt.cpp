// Command-line front end: run, compare, gen-data, validate-config.
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "stochopt/config.hpp"
#include "stochopt/errors.hpp"
#include "stochopt/experiment.hpp"
#include "stochopt/io.hpp"
#include "stochopt/synthetic.hpp"

namespace fs = std::filesystem;
using namespace stochopt;

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> cadence;

  void apply(ExperimentConfig& c) const {
    if (seed) c.seed = *seed;
    if (out) c.output = *out;
    if (cadence) c.cadence = *cadence;
  }
};

void print_problems(const ValidationError& e) {
  std::cerr << "configuration error:\n";
  for (const auto& p : e.problems()) std::cerr << "  " << p << '\n';
}

int cmd_run(const std::string& config_path, const Overrides& o) {
  ExperimentConfig c = load_config(config_path);
  o.apply(c);
  c.validate();
  const auto outcome = run_experiment(c);
  const auto row = summarize("run", c, outcome);
  std::cout << "metrics:  " << outcome.metrics_path.string() << '\n'
            << "manifest: " << outcome.manifest_path.string() << '\n'
            << "status:   " << to_string(outcome.run.status) << '\n'
            << "samples:  " << outcome.run.samples << '\n';
  if (row.final_loss) std::cout << "loss:     " << format_double(*row.final_loss) << '\n';
  if (!outcome.run.message.empty()) std::cout << "note:     " << outcome.run.message << '\n';
  return 0;
}

int cmd_compare(const std::vector<std::string>& paths, const std::string& out_dir, const Overrides& o) {
  std::vector<ExperimentConfig> configs;
  for (const auto& p : paths) {
    ExperimentConfig c = load_config(p);
    if (o.seed) c.seed = *o.seed;
    if (o.cadence) c.cadence = *o.cadence;
    configs.push_back(std::move(c));
  }
  const auto rows = compare(configs, out_dir);
  std::cout << format_summary(rows);
  std::ofstream summary(fs::path(out_dir) / "summary.csv", std::ios::binary | std::ios::trunc);
  write_summary_csv(summary, rows);
  return 0;
}

int cmd_gen_data(const std::string& config_path, const std::string& out, const Overrides& o,
                 const std::string& format) {
  ExperimentConfig c = load_config(config_path);
  SyntheticSpec spec = c.problem.synthetic;
  if (o.seed) spec.seed = *o.seed;
  spec.validate();
  auto [train, test] = generate_synthetic_split(spec, c.problem.synthetic_test_samples);
  const fs::path path(out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto write = [&](const fs::path& p, const Dataset& d) {
    if (format == "csv") write_csv(p, d, 0, true);
    else write_libsvm(p, d);
    std::cout << p.string() << ": " << d.size() << " samples, " << d.dim() << " features\n";
  };
  write(path, train.data);
  if (test) {
    fs::path tp = path;
    tp.replace_extension(".test" + path.extension().string());
    write(tp, *test);
  }
  return 0;
}

int cmd_validate(const std::string& config_path) {
  const ExperimentConfig c = load_config(config_path);
  std::cout << "ok: " << c.algorithm << " on " << to_string(c.problem.kind) << " ("
            << to_string(c.problem.source) << " data)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic optimization experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> config_paths;
  std::string out;
  std::string format = "libsvm";
  Overrides overrides;
  std::uint64_t seed = 0;
  std::size_t cadence = 0;

  auto* run = app.add_subcommand("run", "Run one experiment and write metrics CSV plus manifest");
  run->add_option("--config", config_path, "Experiment INI file")->required();
  auto* run_seed = run->add_option("--seed", seed, "Override run.seed");
  auto* run_out = run->add_option("--out", out, "Override run.output");
  auto* run_cad = run->add_option("--cadence", cadence, "Override run.cadence");

  auto* cmp = app.add_subcommand("compare", "Run several experiments on one problem and tabulate");
  cmp->add_option("--config", config_paths, "Experiment INI file (repeat)")->required();
  cmp->add_option("--out", out, "Output directory")->required();
  auto* cmp_seed = cmp->add_option("--seed", seed, "Override run.seed in every config");
  auto* cmp_cad = cmp->add_option("--cadence", cadence, "Override run.cadence in every config");

  auto* gen = app.add_subcommand("gen-data", "Write the synthetic data set described by a config");
  gen->add_option("--config", config_path, "INI file with a [synthetic] section")->required();
  gen->add_option("--out", out, "Output data file")->required();
  auto* gen_seed = gen->add_option("--seed", seed, "Override synthetic.seed");
  gen->add_option("--format", format, "libsvm or csv")->check(CLI::IsMember({"libsvm", "csv"}));

  auto* val = app.add_subcommand("validate-config", "Check a config and list every problem");
  val->add_option("--config", config_path, "Experiment INI file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  for (auto* opt : {run_seed, cmp_seed, gen_seed}) {
    if (opt->count()) overrides.seed = seed;
  }
  for (auto* opt : {run_cad, cmp_cad}) {
    if (opt->count()) overrides.cadence = cadence;
  }
  if (run_out->count()) overrides.out = out;

  try {
    if (*run) return cmd_run(config_path, overrides);
    if (*cmp) return cmd_compare(config_paths, out, overrides);
    if (*gen) return cmd_gen_data(config_path, out, overrides, format);
    if (*val) return cmd_validate(config_path);
  } catch (const ValidationError& e) {
    print_problems(e);
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kConfigError;
}
