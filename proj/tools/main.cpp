// artnav: simulate, estimate and evaluate articulated-vehicle state from four
// GNSS antennas.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 evaluation
// failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "artnav/pipeline.hpp"

namespace {

namespace pl = artnav::pipeline;

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitEvaluation = 4;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool config_required) {
  auto* c = cmd->add_option("--config", opts.config_path, "Run configuration (JSON)");
  if (config_required) c->required();
  cmd->add_option("--seed", opts.seed, "Override the configured RNG seed");
  cmd->add_option("--mode", opts.mode, "proposed | clas_only");
  cmd->add_option("--out-dir", opts.out_dir, "Output directory");
}

pl::RunConfig resolve(const CommonOptions& opts) {
  auto cfg = pl::load_config(opts.config_path);
  if (opts.seed) cfg.noise.rng_seed = *opts.seed;
  if (opts.mode) cfg.mode = pl::parse_mode(*opts.mode);
  if (opts.out_dir) cfg.out_dir = *opts.out_dir;
  cfg.validate();
  return cfg;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << content)) throw artnav::DataError("cannot write " + path);
}

pl::LabeledFile parse_labeled(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) {
    return {std::filesystem::path(spec).stem().string(), spec};
  }
  return {spec.substr(0, eq), spec.substr(eq + 1)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Articulated vehicle state estimation from four GNSS antennas"};
  app.require_subcommand(1);

  CommonOptions sim_opts;
  auto* simulate = app.add_subcommand("simulate", "Write truth.jsonl and measurements.jsonl");
  add_common(simulate, sim_opts, true);

  CommonOptions est_opts;
  std::optional<std::string> measurements_path;
  std::optional<std::string> estimates_path;
  auto* estimate = app.add_subcommand("estimate", "Solve every epoch of a measurement file");
  add_common(estimate, est_opts, true);
  estimate->add_option("--measurements", measurements_path,
                       "Measurement JSONL (default: <out-dir>/measurements.jsonl)");
  estimate->add_option("--output", estimates_path,
                       "Estimate JSONL (default: <out-dir>/estimates_<mode>.jsonl)");

  std::vector<std::string> eval_inputs;
  std::optional<std::string> reference_path;
  std::string kind_text = "kinematic";
  std::string format = "all";
  std::string eval_out_dir = ".";
  auto* evaluate = app.add_subcommand("evaluate", "Static or kinematic accuracy report");
  evaluate->add_option("--estimates", eval_inputs, "Estimate file, optionally label=path")
      ->required();
  evaluate->add_option("--reference", reference_path, "Reference (truth) JSONL");
  evaluate->add_option("--kind", kind_text, "static | kinematic")
      ->check(CLI::IsMember({"static", "kinematic"}));
  evaluate->add_option("--format", format, "Report files to write: json | text | all")
      ->check(CLI::IsMember({"json", "text", "all"}));
  evaluate->add_option("--out-dir", eval_out_dir, "Directory for report files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (simulate->parsed()) {
      const auto cfg = resolve(sim_opts);
      const auto summary = pl::simulate(cfg, cfg.out_dir);
      std::cout << "wrote " << summary.epochs << " records to " << summary.truth_path << '\n'
                << "wrote " << summary.epochs << " records to " << summary.measurements_path
                << '\n';
      return 0;
    }
    if (estimate->parsed()) {
      const auto cfg = resolve(est_opts);
      const auto in = measurements_path.value_or(
          (std::filesystem::path(cfg.out_dir) / "measurements.jsonl").string());
      const auto out = estimates_path.value_or(
          (std::filesystem::path(cfg.out_dir) /
           ("estimates_" + std::string(pl::to_string(cfg.mode)) + ".jsonl"))
              .string());
      const auto summary = pl::estimate_file(in, out, cfg);
      std::cout << "wrote " << summary.epochs << " records to " << out << '\n'
                << summary.describe() << '\n';
      return 0;
    }
    if (evaluate->parsed()) {
      std::vector<pl::LabeledFile> files;
      for (const auto& spec : eval_inputs) files.push_back(parse_labeled(spec));
      const auto kind =
          kind_text == "static" ? pl::EvaluationKind::kStatic : pl::EvaluationKind::kKinematic;
      const auto result = pl::evaluate(files, reference_path, kind);
      std::filesystem::create_directories(eval_out_dir);
      const std::filesystem::path dir(eval_out_dir);
      if (format != "text") write_file((dir / "report.json").string(), result.json.content);
      if (format != "json") write_file((dir / "report.txt").string(), result.text.content);
      write_file((dir / "errors.csv").string(), result.csv);
      std::cout << result.text.content;
      if (!result.complete) {
        std::cerr << "evaluation incomplete: at least one method has no data\n";
        return kExitEvaluation;
      }
      return 0;
    }
  } catch (const artnav::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const artnav::EvaluationError& e) {
    std::cerr << "evaluation failed: " << e.what() << '\n';
    return kExitEvaluation;
  } catch (const artnav::Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
