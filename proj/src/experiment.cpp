#include "prs/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "prs/constants.hpp"
#include "prs/geometry.hpp"
#include "prs/stats.hpp"
#include "prs/verify.hpp"

namespace prs {

ModelParams ExperimentConfig::model() const {
  ModelParams p;
  p.lambda = lambda;
  p.r = r;
  p.max_rounds = max_rounds;
  p.boundary = boundary;
  return p;
}

void ExperimentConfig::validate() const {
  model().validate();
  if (trials == 0) throw InvalidParameter("trials must be at least 1");
  if (samples == 0) throw InvalidParameter("samples must be at least 1");
  for (double v : r_list) {
    if (!std::isfinite(v) || v <= 0.0) throw InvalidParameter("r-list values must be positive");
  }
  for (double v : lambda_list) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw InvalidParameter("lambda-list values must be positive");
    }
  }
}

std::vector<Record> parallel_records(std::size_t count, unsigned threads,
                                     const std::function<Record(std::size_t)>& task) {
  std::vector<Record> out(count);
  unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = task(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            out[i] = task(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

namespace {

Record check_record(const InequalityCheck& c) {
  Record rec;
  rec["record"] = "check";
  rec["name"] = c.name;
  rec["lhs"] = c.lhs;
  rec["rhs"] = c.rhs;
  rec["sigma"] = c.sigma;
  rec["margin_sigmas"] = std::isfinite(c.margin_sigmas) ? c.margin_sigmas
                                                          : (c.margin_sigmas > 0 ? 1e300 : -1e300);
  rec["passed"] = c.passed;
  rec["hard_failure"] = c.hard_failure();
  return rec;
}

Record exact_record(const std::string& name, double value, double expected, bool passed) {
  Record rec;
  rec["record"] = "check";
  rec["name"] = name;
  rec["lhs"] = value;
  rec["rhs"] = expected;
  rec["sigma"] = 0.0;
  rec["margin_sigmas"] = 0.0;
  rec["passed"] = passed;
  rec["hard_failure"] = !passed;
  return rec;
}

Record summary_record(const std::string& name, const std::vector<InequalityCheck>& checks) {
  const auto passed = std::count_if(checks.begin(), checks.end(),
                                    [](const auto& c) { return c.passed; });
  const auto hard = std::count_if(checks.begin(), checks.end(),
                                  [](const auto& c) { return c.hard_failure(); });
  const auto suspicious = std::count_if(checks.begin(), checks.end(),
                                        [](const auto& c) { return c.suspicious(); });
  Record rec;
  rec["record"] = "summary";
  rec["name"] = name;
  rec["total"] = checks.size();
  rec["passed"] = passed;
  rec["suspicious"] = suspicious;
  rec["hard_failures"] = hard;
  return rec;
}

struct RoundsSummary {
  MeanStat rounds;
  double convergence_rate = 0.0;
};

RoundsSummary run_trials(const ModelParams& params, std::uint64_t trials,
                         std::uint64_t master, unsigned threads) {
  const auto rows = parallel_records(trials, threads, [&](std::size_t t) {
    const PrsResult res = prs_sample_seeded(params, split_seed(master, t));
    Record rec;
    rec["rounds"] = res.stats.rounds;
    rec["converged"] = res.stats.converged;
    return rec;
  });
  std::vector<double> rounds;
  std::size_t converged = 0;
  for (const auto& row : rows) {
    rounds.push_back(row["rounds"].get<double>());
    if (row["converged"].get<bool>()) ++converged;
  }
  return {mean_stat(rounds), static_cast<double>(converged) / static_cast<double>(trials)};
}

}  // namespace

CommandResult cmd_sample(const ExperimentConfig& config) {
  config.validate();
  const ModelParams params = config.model();
  CommandResult result;
  if (params.radius_is_large()) {
    result.notices.push_back("warning: r >= 1/4, the neighbor grid has a single cell");
  }

  std::vector<PointSet> finals(config.trials);
  try {
    result.records = parallel_records(config.trials, config.threads, [&](std::size_t t) {
      const std::uint64_t seed = split_seed(config.seed, t);
      Record rec;
      rec["record"] = "run";
      rec["lambda"] = params.lambda;
      rec["r"] = params.r;
      rec["seed"] = seed;
      rec["trial"] = t;
      if (config.use_rejection_oracle) {
        Rng rng(seed);
        RejectionResult rej = rejection_sample_counted(params, rng);
        rec["sampler"] = "rejection";
        rec["rounds"] = rej.attempts;
        rec["final_n"] = rej.points.size();
        rec["converged"] = true;
        finals[t] = std::move(rej.points);
      } else {
        PrsResult res = prs_sample_seeded(params, seed);
        rec["sampler"] = "prs";
        rec["rounds"] = res.stats.rounds;
        rec["final_n"] = res.points.size();
        rec["converged"] = res.stats.converged;
        finals[t] = std::move(res.points);
      }
      return rec;
    });
  } catch (const Infeasible& e) {
    result.notices.push_back(e.what());
    result.exit_code = kExitInfeasible;
    return result;
  }

  if (config.points_path) {
    std::ofstream out(*config.points_path);
    if (!out) throw InvalidParameter("cannot open " + *config.points_path);
    out << "trial,x,y\n";
    for (std::size_t t = 0; t < finals.size(); ++t) {
      for (const Point& p : finals[t].points) {
        out << t << ',' << format_double(p.x) << ',' << format_double(p.y) << '\n';
      }
    }
  }

  const bool any_converged = std::any_of(result.records.begin(), result.records.end(),
                                         [](const Record& r) { return r["converged"].get<bool>(); });
  if (!any_converged) {
    result.notices.push_back("no run converged within max_rounds");
    result.exit_code = kExitVerificationFailure;
  }
  return result;
}

CommandResult cmd_sweep(const ExperimentConfig& config) {
  config.validate();
  const bool by_r = !config.r_list.empty();
  if (by_r == !config.lambda_list.empty()) {
    throw InvalidParameter("sweep needs exactly one nonempty --r-list or --lambda-list");
  }
  const std::vector<double>& values = by_r ? config.r_list : config.lambda_list;
  CommandResult result;
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    ModelParams params = config.model();
    (by_r ? params.r : params.lambda) = values[vi];
    params.validate();
    const RoundsSummary s =
        run_trials(params, config.trials, split_seed(config.seed, vi), config.threads);
    Record rec;
    rec["record"] = "sweep";
    rec["parameter"] = by_r ? "r" : "lambda";
    rec["value"] = values[vi];
    rec["lambda"] = params.lambda;
    rec["r"] = params.r;
    rec["trials"] = config.trials;
    rec["mean_rounds"] = s.rounds.mean;
    rec["stderr"] = s.rounds.std_error;
    rec["convergence_rate"] = s.convergence_rate;
    result.records.push_back(std::move(rec));
  }
  return result;
}

CommandResult cmd_verify(const ExperimentConfig& config) {
  if (config.samples == 0) throw InvalidParameter("samples must be at least 1");
  CommandResult result;
  auto& out = result.records;

  const ContractionConstants c = compute_constants();
  constexpr double pi = std::numbers::pi;
  constexpr double sqrt3 = std::numbers::sqrt3;
  out.push_back(exact_record("lambda_bar", c.lambda_bar, 0.2344,
                             c.lambda_bar >= 0.2344 && c.lambda_bar < 0.2345));
  out.push_back(exact_record("lambda_bar_exceeds_reference", c.lambda_bar, c.gj_lambda_bar,
                             c.lambda_bar > c.gj_lambda_bar));
  const double kprime = (4.0 * pi + 3.0 * sqrt3) / (2.0 * pi * pi);
  out.push_back(exact_record("kprime_coeff", c.kprime_coeff, kprime,
                             std::abs(c.kprime_coeff - kprime) <= 1e-12));
  const double pair_union = 16.0 * pi / 3.0 + 2.0 * sqrt3;
  out.push_back(exact_record("pair_union_coeff", c.pair_union_coeff, pair_union,
                             std::abs(c.pair_union_coeff - pair_union) <= 1e-12));
  out.push_back(exact_record("contraction_bound_at_lambda_bar", contraction_bound(c.lambda_bar),
                             1.0, std::abs(contraction_bound(c.lambda_bar) - 1.0) <= 1e-12));

  std::vector<InequalityCheck> two_sided;
  {
    Rng rng = make_rng(config.seed, 0);
    two_sided.push_back(verify_pair_probability(0.05, config.samples, rng));
  }
  {
    Rng rng = make_rng(config.seed, 1);
    const double r = 0.05;
    const DiskUnion pair({{0.0, 0.0}, {0.0, 2.0 * r}}, 2.0 * r);
    const AreaEstimate est = union_area_mc(pair, config.samples, rng);
    two_sided.push_back(make_check("two_disk_area", est.value, est.std_error,
                                   pair_union * r * r, 0.0, est.std_error));
  }
  {
    Rng rng = make_rng(config.seed, 2);
    const double r = 0.05;
    two_sided.push_back(
        check_lemma_inequality(DiskUnion({{0.0, 0.0}}, 2.0 * r), config.samples, config.samples, rng));
    two_sided.back().name = "lemma_equality_single";
    two_sided.push_back(check_lemma_inequality(
        DiskUnion({{0.0, 0.0}, {9.0 * r, 0.0}}, 2.0 * r), config.samples, config.samples, rng));
    two_sided.back().name = "lemma_equality_far";
  }
  for (const auto& check : two_sided) {
    Record rec = check_record(check);
    // Equalities: both tails count.
    rec["passed"] = check.agrees_within(kPassSigmas);
    rec["hard_failure"] = !check.agrees_within(kHardFailSigmas);
    out.push_back(std::move(rec));
  }

  const auto fact = run_fact_suite(config.suite_size, config.samples, split_seed(config.seed, 3));
  const auto lemma = run_lemma_suite(config.suite_size, 0.05, config.samples, config.samples,
                                     split_seed(config.seed, 4));
  for (const auto& check : fact) out.push_back(check_record(check));
  for (const auto& check : lemma) out.push_back(check_record(check));
  out.push_back(summary_record("fact_suite", fact));
  out.push_back(summary_record("lemma_suite", lemma));
  bool failed = false;

  {
    Rng rng = make_rng(config.seed, 5);
    const double r = 0.05;
    const DiskUnion u = random_lemma_configuration(r, rng);
    const double top = 4.0 * pi * r * r;
    const LevelSetReport ls =
        check_level_sets(u, {0.0, 0.25 * top, 0.5 * top, 0.75 * top}, 200, rng);
    for (std::size_t i = 0; i < ls.t_values.size(); ++i) {
      Record rec;
      rec["record"] = "level_set";
      rec["name"] = "level_set";
      rec["t"] = ls.t_values[i];
      rec["alpha"] = ls.alpha[i];
      rec["pass_fraction"] = ls.pass_fraction[i];
      rec["passed"] = ls.pass_fraction[i] >= 0.99;
      out.push_back(std::move(rec));
    }
    failed = !ls.passed;
  }

  for (const auto& rec : out) {
    if (rec.contains("hard_failure") && rec["hard_failure"].get<bool>()) failed = true;
  }
  if (failed) result.exit_code = kExitVerificationFailure;
  return result;
}

CommandResult cmd_contraction(const ExperimentConfig& config) {
  config.validate();
  if (config.replications == 0) throw InvalidParameter("replications must be at least 1");
  const ModelParams params = config.model();
  const auto states = collect_bad_states(params, config.states, config.seed);
  CommandResult result;
  result.records = parallel_records(states.size(), config.threads, [&](std::size_t i) {
    Rng rng = make_rng(split_seed(config.seed, 0xC0FFEE), i);
    const ContractionEstimate est = measure_contraction(
        states[i], params, config.replications, rng,
        config.fixed_state ? ContractionMode::given_state : ContractionMode::given_bad_points);
    Record rec;
    rec["record"] = "contraction";
    rec["lambda"] = params.lambda;
    rec["r"] = params.r;
    rec["state"] = i;
    rec["k_t"] = est.k_t;
    rec["mean_k_next"] = est.mean_k_next;
    rec["sigma"] = est.k_next_std_error;
    rec["bound"] = est.bound;
    rec["j_mean"] = est.j_mean;
    rec["l_mean"] = est.l_mean;
    rec["replications"] = est.replications;
    rec["mode"] = config.fixed_state ? "given_state" : "given_bad_points";
    rec["passed"] = est.within_bound();
    return rec;
  });
  const bool hard = std::any_of(result.records.begin(), result.records.end(), [](const Record& r) {
    return r["mean_k_next"].get<double>() >
           r["bound"].get<double>() + kHardFailSigmas * r["sigma"].get<double>();
  });
  if (hard) result.exit_code = kExitVerificationFailure;
  return result;
}

CommandResult cmd_threshold(const ExperimentConfig& config) {
  config.validate();
  if (!(config.bracket_lo > 0.0) || !(config.bracket_hi > config.bracket_lo)) {
    throw InvalidParameter("bracket must satisfy 0 < lo < hi");
  }
  CommandResult result;
  auto converges = [&](double lambda) {
    ModelParams params = config.model();
    params.lambda = lambda;
    // Same seeds at every lambda, so reruns and neighboring values share noise.
    return run_trials(params, config.trials, config.seed, config.threads).convergence_rate >=
           config.converge_fraction;
  };

  double lo = config.bracket_lo;
  double hi = config.bracket_hi;
  const bool lo_ok = converges(lo);
  const bool hi_ok = converges(hi);
  if (!lo_ok || hi_ok) {
    result.notices.push_back(
        hi_ok ? "upper bracket end still converges; widen the bracket upward"
              : "lower bracket end does not converge; widen the bracket downward");
    result.exit_code = kExitUsage;
    Record rec;
    rec["record"] = "threshold";
    rec["r"] = config.r;
    rec["lo"] = lo;
    rec["hi"] = hi;
    rec["lo_converges"] = lo_ok;
    rec["hi_converges"] = hi_ok;
    rec["valid_bracket"] = false;
    result.records.push_back(std::move(rec));
    return result;
  }
  while (hi - lo > config.bracket_width) {
    const double mid = 0.5 * (lo + hi);
    (converges(mid) ? lo : hi) = mid;
  }
  Record rec;
  rec["record"] = "threshold";
  rec["r"] = config.r;
  rec["lo"] = lo;
  rec["hi"] = hi;
  rec["estimate"] = 0.5 * (lo + hi);
  rec["trials"] = config.trials;
  rec["max_rounds"] = config.max_rounds;
  rec["converge_fraction"] = config.converge_fraction;
  rec["valid_bracket"] = true;
  rec["informational"] = true;
  result.records.push_back(std::move(rec));
  return result;
}

CommandResult run_command(const ExperimentConfig& config) {
  switch (config.command) {
    case Command::sample:
      return cmd_sample(config);
    case Command::sweep:
      return cmd_sweep(config);
    case Command::verify:
      return cmd_verify(config);
    case Command::contraction:
      return cmd_contraction(config);
    case Command::threshold:
      return cmd_threshold(config);
  }
  throw InvalidParameter("unknown command");
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::string csv_field(const Record& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_double(v.get<double>());
  return v.dump();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

Record parse_csv_field(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  const Record parsed = Record::parse(text, nullptr, false);
  if (!parsed.is_discarded() && parsed.is_number()) return parsed;
  return text;
}

}  // namespace

void write_records(const std::vector<Record>& records, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::jsonl) {
    for (const auto& rec : records) out << rec.dump() << '\n';
    return;
  }
  std::vector<std::string> header;
  for (const auto& rec : records) {
    std::vector<std::string> keys;
    for (const auto& item : rec.items()) keys.push_back(item.key());
    if (keys != header) {
      header = keys;
      for (std::size_t i = 0; i < keys.size(); ++i) out << (i ? "," : "") << keys[i];
      out << '\n';
    }
    std::size_t i = 0;
    for (const auto& item : rec.items()) out << (i++ ? "," : "") << csv_field(item.value());
    out << '\n';
  }
}

std::vector<Record> read_csv_records(std::istream& in) {
  std::vector<Record> records;
  std::vector<std::string> header;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    // A header row starts with the "record" key.
    if (!fields.empty() && fields.front() == "record") {
      header = fields;
      continue;
    }
    if (fields.size() != header.size()) throw InvalidParameter("CSV row width mismatch");
    Record rec;
    for (std::size_t i = 0; i < fields.size(); ++i) rec[header[i]] = parse_csv_field(fields[i]);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace prs
