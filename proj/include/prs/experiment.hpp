#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "prs/sampler.hpp"

namespace prs {

enum class Command { sample, sweep, verify, contraction, threshold };
enum class OutputFormat { csv, jsonl };

/// Exit codes of the experiment driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitVerificationFailure = 2,
  kExitInfeasible = 3,
};

struct ExperimentConfig {
  Command command = Command::sample;
  double lambda = 0.15;
  double r = 0.1;
  std::vector<double> r_list;
  std::vector<double> lambda_list;
  std::uint64_t seed = 1;
  std::uint64_t trials = 10;
  std::uint64_t max_rounds = kDefaultMaxRounds;
  Boundary boundary = Boundary::clipped_square;
  OutputFormat format = OutputFormat::jsonl;
  std::optional<std::string> output_path;
  /// Monte Carlo budget for area and pair-probability estimates.
  std::uint64_t samples = 200'000;

  // sample
  bool use_rejection_oracle = false;
  std::optional<std::string> points_path;

  // verify
  std::size_t suite_size = 100;

  // contraction
  std::size_t states = 20;
  std::uint64_t replications = 500;
  bool fixed_state = false;

  // threshold
  double bracket_lo = 0.2;
  double bracket_hi = 0.8;
  double bracket_width = 0.01;
  double converge_fraction = 0.9;

  unsigned threads = 0;  // 0: hardware concurrency

  ModelParams model() const;
  /// Throws InvalidParameter when the config cannot run.
  void validate() const;
};

using Record = nlohmann::ordered_json;

struct CommandResult {
  std::vector<Record> records;
  std::vector<std::string> notices;
  int exit_code = kExitOk;
};

CommandResult cmd_sample(const ExperimentConfig& config);
CommandResult cmd_sweep(const ExperimentConfig& config);
CommandResult cmd_verify(const ExperimentConfig& config);
CommandResult cmd_contraction(const ExperimentConfig& config);
CommandResult cmd_threshold(const ExperimentConfig& config);

CommandResult run_command(const ExperimentConfig& config);

/// One JSON object per line, or CSV with a header line that is re-emitted
/// whenever the record shape changes.
void write_records(const std::vector<Record>& records, OutputFormat format, std::ostream& out);

/// Inverse of the CSV projection for flat records: numbers, booleans and
/// strings are recovered from their text.
std::vector<Record> read_csv_records(std::istream& in);

/// Runs task(i) for i in [0, count) on a small worker pool; results are
/// returned in index order regardless of completion order.
std::vector<Record> parallel_records(std::size_t count, unsigned threads,
                                     const std::function<Record(std::size_t)>& task);

}  // namespace prs
