// Experiment driver: sample, sweep, verify, contraction, threshold.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "prs/experiment.hpp"

namespace {

void add_model_flags(CLI::App* cmd, prs::ExperimentConfig& cfg, std::string& boundary,
                     std::string& format) {
  cmd->add_option("--lambda", cfg.lambda, "Activity lambda (intensity lambda/(pi r^2))");
  cmd->add_option("--r", cfg.r, "Disk radius");
  cmd->add_option("--trials", cfg.trials, "Independent runs per grid value");
  cmd->add_option("--seed", cfg.seed, "Master seed; per-trial seeds are split from it");
  cmd->add_option("--max-rounds", cfg.max_rounds, "Resampling round cap per run");
  cmd->add_option("--samples", cfg.samples, "Monte Carlo budget per estimate");
  cmd->add_option("--boundary", boundary, "square or torus")
      ->check(CLI::IsMember({"square", "torus"}));
  cmd->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  cmd->add_option("--out", cfg.output_path, "Write records here instead of stdout");
  cmd->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial rejection sampling for hard disks in the unit square"};
  app.require_subcommand(1);

  prs::ExperimentConfig cfg;
  std::string boundary = "square";
  std::string format = "jsonl";

  auto* sample = app.add_subcommand("sample", "Run PRS (or the rejection oracle) per trial");
  add_model_flags(sample, cfg, boundary, format);
  sample->add_flag("--rejection", cfg.use_rejection_oracle, "Use the naive rejection sampler");
  sample->add_option("--points", cfg.points_path, "CSV file for the final configurations");

  auto* sweep = app.add_subcommand("sweep", "Mean rounds over an r-list or lambda-list");
  add_model_flags(sweep, cfg, boundary, format);
  sweep->add_option("--r-list", cfg.r_list, "Radii to sweep")->delimiter(',');
  sweep->add_option("--lambda-list", cfg.lambda_list, "Activities to sweep")->delimiter(',');

  auto* verify = app.add_subcommand("verify", "Constants, pair probability, geometric checks");
  add_model_flags(verify, cfg, boundary, format);
  verify->add_option("--suite-size", cfg.suite_size, "Random configurations per suite");

  auto* contraction = app.add_subcommand("contraction", "Measure E[k_{t+1}] against the bound");
  add_model_flags(contraction, cfg, boundary, format);
  contraction->add_option("--states", cfg.states, "Number of bad states to sample");
  contraction->add_option("--replications", cfg.replications, "Resamples per state");
  contraction->add_flag("--fixed-state", cfg.fixed_state,
                        "Keep the points outside S_t instead of redrawing them");

  auto* threshold = app.add_subcommand("threshold", "Bisect the empirical convergence threshold");
  add_model_flags(threshold, cfg, boundary, format);
  threshold->add_option("--lo", cfg.bracket_lo, "Lower bracket end (must converge)");
  threshold->add_option("--hi", cfg.bracket_hi, "Upper bracket end (must not converge)");
  threshold->add_option("--width", cfg.bracket_width, "Stop when the bracket is this narrow");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? prs::kExitOk : prs::kExitUsage;
  }

  if (*sample) cfg.command = prs::Command::sample;
  if (*sweep) cfg.command = prs::Command::sweep;
  if (*verify) cfg.command = prs::Command::verify;
  if (*contraction) cfg.command = prs::Command::contraction;
  if (*threshold) cfg.command = prs::Command::threshold;
  cfg.format = format == "csv" ? prs::OutputFormat::csv : prs::OutputFormat::jsonl;

  prs::CommandResult result;
  try {
    cfg.boundary = prs::boundary_from_string(boundary);
    result = prs::run_command(cfg);
  } catch (const prs::InvalidParameter& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return prs::kExitUsage;
  } catch (const prs::Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return prs::kExitInfeasible;
  }

  for (const auto& notice : result.notices) std::cerr << notice << '\n';
  if (cfg.output_path) {
    std::ofstream out(*cfg.output_path);
    if (!out) {
      std::cerr << "cannot open " << *cfg.output_path << '\n';
      return prs::kExitUsage;
    }
    prs::write_records(result.records, cfg.format, out);
  } else {
    prs::write_records(result.records, cfg.format, std::cout);
  }
  return result.exit_code;
}
