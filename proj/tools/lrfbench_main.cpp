#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lrfbench/calibration.hpp"
#include "lrfbench/harness.hpp"
#include "lrfbench/io.hpp"
#include "lrfbench/optimizer.hpp"
#include "lrfbench/scoring.hpp"
#include "lrfbench/workload.hpp"

namespace {

using namespace lrfbench;

std::string join_command(int argc, char** argv) {
  std::string cmd;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) cmd += ' ';
    cmd += argv[i];
  }
  return cmd;
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::filesystem::path resolve_out(const std::string& opt) {
  return opt.empty() ? default_output_dir() : std::filesystem::path(opt);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  nlohmann::json j = manifest_json(m, true);
  j["digest"] = manifest_digest(m);
  write_text_atomic(dir / "manifest.json", j.dump(2) + "\n");
}

nlohmann::json record_line(const TrialRecord& rec, const std::string& digest) {
  nlohmann::json j = to_json(rec);
  j["manifest_digest"] = digest;
  return j;
}

struct RunOptions {
  std::string algo;
  std::string workload;
  double horizon = 1.0;
  bool constant = false;
  double warmup = 0.05;
  std::uint64_t seed = 1;
  double lr = 0.0;
  double wd = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double dropout = 0.0;
  double label_smoothing = 0.0;
  double target = std::nan("");
  std::string label;
  std::string out;
};

int cmd_run(const RunOptions& opt, const CLI::App& sub, const std::string& command) {
  Suite suite = Suite::desk();
  const Workload& wl = suite.at(opt.workload);

  TrialSpec spec;
  spec.config = opt.constant ? naive_defaults(opt.algo) : search_base_config(opt.algo);
  if (sub.count("--lr")) spec.config.lr = opt.lr;
  if (sub.count("--weight-decay")) spec.config.weight_decay = opt.wd;
  if (sub.count("--beta1")) spec.config.beta1 = opt.beta1;
  if (sub.count("--beta2")) spec.config.beta2 = opt.beta2;
  spec.schedule = opt.constant ? ScheduleSpec::constant()
                               : ScheduleSpec::warmup_cosine(opt.warmup, opt.horizon);
  spec.knobs.dropout = opt.dropout;
  spec.knobs.label_smoothing = opt.label_smoothing;
  spec.workload = opt.workload;
  spec.seed = opt.seed;
  spec.label = opt.label.empty() ? opt.algo + "@" + opt.workload : opt.label;

  TrialRecord rec = run_trial(wl, spec, opt.target);

  std::filesystem::path out = resolve_out(opt.out);
  RunManifest manifest;
  manifest.command = command;
  manifest.stream_seed = opt.seed;
  manifest.suite_digest = suite_digest(suite);
  manifest.timestamp = utc_timestamp();
  std::string digest = manifest_digest(manifest);

  write_manifest(out, manifest);
  write_text_atomic(out / "record.json", record_line(rec, digest).dump(2) + "\n");

  std::cout << spec.label << ": final " << rec.final_metric << " after " << rec.steps_run
            << " steps";
  if (rec.aborted) std::cout << " (aborted)";
  if (!std::isnan(opt.target)) {
    if (rec.steps_to_target)
      std::cout << ", target " << opt.target << " met at step " << *rec.steps_to_target;
    else
      std::cout << ", target " << opt.target << " not reached";
  }
  std::cout << "\nwrote " << (out / "record.json").string() << "\n";
  return 0;
}

struct SearchOptions {
  std::string algos = "adamw,nadamw,prodigy,mechanic_adam";
  std::string horizons = "0.33,0.5,0.66";
  int points = 32;
  int shortlist = 3;
  int seeds = 5;
  std::uint64_t stream_seed = 2026;
  double tau_max = 4.0;
  int jobs = 1;
  std::string refs;
  std::string targets_file;
  std::string out;
};

nlohmann::json candidate_json(const CandidateResult& cand) {
  std::size_t reached = 0;
  for (double f : cand.median_fractions)
    if (std::isfinite(f)) ++reached;
  return {
      {"algorithm", cand.algorithm},
      {"alpha", cand.alpha},
      {"halton_index", cand.point.halton_index},
      {"shortlist_rank", cand.shortlist_rank},
      {"config", to_json(cand.point.config)},
      {"warmup_fraction", cand.point.warmup_fraction},
      {"knobs", to_json(cand.point.knobs)},
      {"sweep_gm_cost", cand.sweep_gm_cost},
      {"median_fractions", cand.median_fractions},
      {"reached", reached},
      {"score", cand.score},
  };
}

int cmd_search(const SearchOptions& opt, const std::string& command) {
  Suite suite = Suite::desk();
  std::filesystem::path out = resolve_out(opt.out);

  CalibrationConfig cfg;
  cfg.algorithms = split_list(opt.algos);
  cfg.horizons.clear();
  for (const std::string& h : split_list(opt.horizons)) cfg.horizons.push_back(std::stod(h));
  cfg.points_per_horizon = opt.points;
  cfg.shortlist = opt.shortlist;
  cfg.final_seeds = opt.seeds;
  cfg.stream_seed = opt.stream_seed;
  cfg.tau_max = opt.tau_max;
  cfg.jobs = opt.jobs;

  RunManifest manifest;
  manifest.command = command;
  manifest.stream_seed = opt.stream_seed;
  manifest.suite_digest = suite_digest(suite);
  manifest.timestamp = utc_timestamp();
  std::string digest = manifest_digest(manifest);
  write_manifest(out, manifest);

  SuiteTargets targets;
  if (!opt.targets_file.empty()) {
    targets = suite_targets_from_json(nlohmann::json::parse(read_file(opt.targets_file)));
    std::cout << "loaded targets from " << opt.targets_file << "\n";
  } else {
    std::cout << "deriving targets (reference grid, 3 seeds per step size)...\n";
    targets = derive_targets(suite, opt.jobs);
  }
  {
    nlohmann::json j = to_json(targets);
    j["manifest_digest"] = digest;
    write_text_atomic(out / "targets.json", j.dump(2) + "\n");
  }
  for (const WorkloadTarget& t : targets.entries)
    std::cout << "  " << t.workload << ": target " << t.target << "\n";

  CalibrationOutcome outcome = calibrate(suite, targets, cfg);

  std::vector<CandidateResult> refs;
  for (const std::string& algo : split_list(opt.refs))
    refs.push_back(run_reference(suite, targets, algo, cfg));

  TimeTable pool = outcome.pool;
  for (const CandidateResult& ref : refs) {
    pool.rows.push_back(ref.algorithm + "_naive");
    pool.times.push_back(ref.median_fractions);
  }
  std::vector<double> scores(pool.rows.size());
  for (std::size_t i = 0; i < pool.rows.size(); ++i)
    scores[i] = benchmark_score(pool, i, cfg.tau_max);

  nlohmann::json summary;
  summary["manifest_digest"] = digest;
  summary["config"] = {
      {"algorithms", cfg.algorithms},   {"horizons", cfg.horizons},
      {"points_per_horizon", cfg.points_per_horizon}, {"shortlist", cfg.shortlist},
      {"final_seeds", cfg.final_seeds}, {"stream_seed", cfg.stream_seed},
      {"tau_max", cfg.tau_max},
  };
  summary["sweeps"] = nlohmann::json::array();
  for (const AlgoSweep& sweep : outcome.sweeps) {
    nlohmann::json horizons = nlohmann::json::array();
    for (std::size_t h = 0; h < cfg.horizons.size(); ++h) {
      nlohmann::json points = nlohmann::json::array();
      for (std::size_t p = 0; p < sweep.points[h].size(); ++p) {
        const SearchPoint& sp = sweep.points[h][p];
        points.push_back({
            {"halton_index", sp.halton_index},
            {"config", to_json(sp.config)},
            {"warmup_fraction", sp.warmup_fraction},
            {"knobs", to_json(sp.knobs)},
            {"gm_cost", sweep.gm_costs[h][p]},
        });
      }
      horizons.push_back({{"alpha", cfg.horizons[h]},
                          {"points", std::move(points)},
                          {"shortlist", sweep.shortlist[h]}});
    }
    summary["sweeps"].push_back(
        {{"algorithm", sweep.algorithm}, {"horizons", std::move(horizons)}});
  }
  summary["candidates"] = nlohmann::json::array();
  for (const CandidateResult& cand : outcome.candidates)
    summary["candidates"].push_back(candidate_json(cand));
  summary["references"] = nlohmann::json::array();
  for (std::size_t i = 0; i < refs.size(); ++i) {
    nlohmann::json j = candidate_json(refs[i]);
    j["score"] = scores[outcome.candidates.size() + i];
    summary["references"].push_back(std::move(j));
  }
  summary["pool_scores"] = nlohmann::json::array();
  for (std::size_t i = 0; i < pool.rows.size(); ++i)
    summary["pool_scores"].push_back({{"row", pool.rows[i]},
                                      {"score", scores[i]},
                                      {"reached", reached_count(pool, i)}});
  summary["best"] = nlohmann::json::array();
  for (const BestPick& pick : outcome.best)
    summary["best"].push_back({
        {"algorithm", pick.algorithm},
        {"alpha", pick.alpha},
        {"halton_index", outcome.candidates[pick.candidate_index].point.halton_index},
        {"score", outcome.scores[pick.candidate_index]},
    });
  write_text_atomic(out / "summary.json", summary.dump(2) + "\n");

  write_text_atomic(out / "pool.csv", time_table_csv(pool, digest));
  for (std::size_t i = 0; i < pool.rows.size(); ++i) {
    PerformanceProfile prof = performance_profile(pool, i);
    write_text_atomic(out / "profiles" / (pool.rows[i] + ".csv"),
                      profile_csv(prof, cfg.tau_max, digest));
  }

  std::string lines;
  for (const AlgoSweep& sweep : outcome.sweeps)
    for (const TrialRecord& rec : sweep.records)
      lines += record_line(rec, digest).dump() + "\n";
  for (const CandidateResult& cand : outcome.candidates)
    for (const TrialRecord& rec : cand.records) lines += record_line(rec, digest).dump() + "\n";
  for (const CandidateResult& ref : refs)
    for (const TrialRecord& rec : ref.records) lines += record_line(rec, digest).dump() + "\n";
  write_text_atomic(out / "records.jsonl", lines);

  std::cout << "\npool scores (tau_max " << cfg.tau_max << "):\n";
  for (std::size_t i = 0; i < pool.rows.size(); ++i)
    std::cout << "  " << pool.rows[i] << ": " << scores[i] << " (reached "
              << reached_count(pool, i) << "/" << pool.cols.size() << ")\n";
  std::cout << "best per algorithm and horizon:\n";
  for (const BestPick& pick : outcome.best)
    std::cout << "  " << pick.algorithm << " @ " << pick.alpha << " -> point "
              << outcome.candidates[pick.candidate_index].point.halton_index << " (score "
              << outcome.scores[pick.candidate_index] << ")\n";
  std::cout << "wrote " << (out / "summary.json").string() << "\n";
  return 0;
}

struct ScoreOptions {
  std::string table;
  double tau_max = 4.0;
  std::string out;
};

int cmd_score(const ScoreOptions& opt, const std::string& command) {
  std::string text = read_file(opt.table);
  TimeTable table = time_table_from_csv(text);

  RunManifest manifest;
  manifest.command = command;
  manifest.stream_seed = 0;
  manifest.suite_digest = fnv1a_hex(text);
  manifest.timestamp = utc_timestamp();
  std::string digest = manifest_digest(manifest);

  std::filesystem::path out = resolve_out(opt.out);
  write_manifest(out, manifest);

  nlohmann::json rows = nlohmann::json::array();
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    double s = benchmark_score(table, i, opt.tau_max);
    order.emplace_back(s, i);
    rows.push_back({{"label", table.rows[i]},
                    {"score", s},
                    {"reached", reached_count(table, i)}});
    PerformanceProfile prof = performance_profile(table, i);
    write_text_atomic(out / "profiles" / (table.rows[i] + ".csv"),
                      profile_csv(prof, opt.tau_max, digest));
  }
  nlohmann::json j{{"manifest_digest", digest},
                   {"tau_max", opt.tau_max},
                   {"table", to_json(table)},
                   {"rows", std::move(rows)}};
  write_text_atomic(out / "scores.json", j.dump(2) + "\n");

  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [s, i] : order)
    std::cout << table.rows[i] << ": " << s << " (reached " << reached_count(table, i) << "/"
              << table.cols.size() << ")\n";
  return 0;
}

struct SuiteOptions {
  bool derive = false;
  int jobs = 1;
  std::string out;
};

int cmd_suite(const SuiteOptions& opt, const std::string& command) {
  Suite suite = Suite::desk();
  nlohmann::json j = suite_json(suite);
  j["digest"] = suite_digest(suite);
  std::cout << j.dump(2) << "\n";

  if (opt.derive) {
    std::filesystem::path out = resolve_out(opt.out);
    RunManifest manifest;
    manifest.command = command;
    manifest.stream_seed = 0;
    manifest.suite_digest = suite_digest(suite);
    manifest.timestamp = utc_timestamp();
    write_manifest(out, manifest);

    std::cout << "deriving targets...\n";
    SuiteTargets targets = derive_targets(suite, opt.jobs);
    nlohmann::json tj = to_json(targets);
    tj["manifest_digest"] = manifest_digest(manifest);
    write_text_atomic(out / "targets.json", tj.dump(2) + "\n");
    for (const WorkloadTarget& t : targets.entries)
      std::cout << "  " << t.workload << ": best " << t.best_metric << ", target " << t.target
                << "\n";
    std::cout << "wrote " << (out / "targets.json").string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"benchmark harness for learning-rate-free optimizers"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  std::string command = join_command(argc, argv);

  std::vector<std::string> algo_names = algorithm_names();
  std::vector<std::string> wl_names = workload_names();

  RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "run one trial and write its record");
  run->add_option("--algo", run_opt.algo, "optimizer name")
      ->required()
      ->check(CLI::IsMember(algo_names));
  run->add_option("--workload", run_opt.workload, "workload name")
      ->required()
      ->check(CLI::IsMember(wl_names));
  run->add_option("--horizon", run_opt.horizon, "schedule horizon as a fraction of the budget")
      ->check(CLI::Range(1e-6, 1.0))
      ->capture_default_str();
  run->add_flag("--constant", run_opt.constant,
                "constant schedule with out-of-the-box settings (full budget)");
  run->add_option("--warmup", run_opt.warmup, "warmup fraction of the horizon")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  run->add_option("--seed", run_opt.seed, "trial seed")->capture_default_str();
  run->add_option("--lr", run_opt.lr, "override the peak step size");
  run->add_option("--weight-decay", run_opt.wd, "override the weight decay");
  run->add_option("--beta1", run_opt.beta1, "override beta1");
  run->add_option("--beta2", run_opt.beta2, "override beta2");
  run->add_option("--dropout", run_opt.dropout, "dropout rate where supported")
      ->check(CLI::Range(0.0, 0.99));
  run->add_option("--label-smoothing", run_opt.label_smoothing,
                  "label smoothing where supported")
      ->check(CLI::Range(0.0, 0.99));
  run->add_option("--target", run_opt.target, "metric target to time (defaults to none)");
  run->add_option("--label", run_opt.label, "record label");
  run->add_option("--out", run_opt.out, "output directory (defaults to $LRFBENCH_OUT or ./out)");

  SearchOptions search_opt;
  CLI::App* search = app.add_subcommand("search", "calibrate algorithms on the suite");
  search->add_option("--algos", search_opt.algos, "comma-separated algorithm list")
      ->capture_default_str();
  search->add_option("--horizons", search_opt.horizons, "comma-separated horizon fractions")
      ->capture_default_str();
  search->add_option("--points", search_opt.points, "search points per horizon")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  search->add_option("--shortlist", search_opt.shortlist, "configs kept per horizon")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  search->add_option("--seeds", search_opt.seeds, "seeds per finalize run")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  search->add_option("--stream-seed", search_opt.stream_seed, "master seed of the search")
      ->capture_default_str();
  search->add_option("--tau-max", search_opt.tau_max, "profile integration limit")
      ->capture_default_str();
  search->add_option("--jobs", search_opt.jobs, "parallel trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  search->add_option("--refs", search_opt.refs,
                     "algorithms to add as out-of-the-box reference rows");
  search->add_option("--targets-file", search_opt.targets_file,
                     "reuse targets from a previous targets.json");
  search->add_option("--out", search_opt.out, "output directory");

  ScoreOptions score_opt;
  CLI::App* score = app.add_subcommand("score", "score a time-to-target table");
  score->add_option("--table", score_opt.table, "time table csv")->required();
  score->add_option("--tau-max", score_opt.tau_max, "profile integration limit")
      ->capture_default_str();
  score->add_option("--out", score_opt.out, "output directory");

  SuiteOptions suite_opt;
  CLI::App* suite_cmd = app.add_subcommand("suite", "describe the workload suite");
  suite_cmd->add_flag("--derive-targets", suite_opt.derive,
                      "run the reference grid and write targets.json");
  suite_cmd->add_option("--jobs", suite_opt.jobs, "parallel trials")
      ->check(CLI::PositiveNumber);
  suite_cmd->add_option("--out", suite_opt.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_opt, *run, command);
    if (search->parsed()) return cmd_search(search_opt, command);
    if (score->parsed()) return cmd_score(score_opt, command);
    if (suite_cmd->parsed()) return cmd_suite(suite_opt, command);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
