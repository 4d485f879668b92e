#include "lrfbench/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <stdexcept>
#include <utility>

namespace lrfbench {

namespace {

std::string format_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("format_double: non-finite value");
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

void check_csv_token(const std::string& s) {
  if (s.empty() || s.find_first_of(",\n\r#") != std::string::npos)
    throw std::invalid_argument("csv: label not representable: '" + s + "'");
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  for (int i = 15; i >= 0; --i) {
    buf[i] = "0123456789abcdef"[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf, 16);
}

nlohmann::json manifest_json(const RunManifest& m, bool include_timestamp) {
  nlohmann::json j{
      {"command", m.command},
      {"tool_version", m.tool_version},
      {"stream_seed", m.stream_seed},
      {"suite_digest", m.suite_digest},
  };
  if (include_timestamp) j["timestamp"] = m.timestamp;
  return j;
}

std::string manifest_digest(const RunManifest& m) {
  return fnv1a_hex(manifest_json(m, false).dump());
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json suite_json(const Suite& suite) {
  nlohmann::json workloads = nlohmann::json::array();
  for (const auto& wl : suite.workloads) {
    workloads.push_back({
        {"name", wl->name()},
        {"dim", wl->dim()},
        {"t_max", wl->t_max()},
        {"metric_direction", to_string(wl->direction())},
        {"supports_dropout", wl->supports_dropout()},
        {"supports_label_smoothing", wl->supports_label_smoothing()},
    });
  }
  return nlohmann::json{{"workloads", std::move(workloads)}};
}

std::string suite_digest(const Suite& suite) { return fnv1a_hex(suite_json(suite).dump()); }

nlohmann::json to_json(const OptimizerConfig& cfg) {
  return {
      {"algorithm", cfg.algorithm},
      {"lr", cfg.lr},
      {"beta1", cfg.beta1},
      {"beta2", cfg.beta2},
      {"eps", cfg.eps},
      {"weight_decay", cfg.weight_decay},
      {"d0", cfg.d0},
      {"dowg_r2_init", cfg.dowg_r2_init},
      {"cocob_alpha", cfg.cocob_alpha},
      {"mech_s_init", cfg.mech_s_init},
      {"mech_lambda", cfg.mech_lambda},
      {"mech_n", cfg.mech_n},
      {"momo_f_star", cfg.momo_f_star},
      {"bias_correction", cfg.bias_correction},
      {"safeguard_warmup", cfg.safeguard_warmup},
  };
}

nlohmann::json to_json(const ScheduleSpec& spec) {
  return {
      {"shape", to_string(spec.shape)},
      {"warmup_fraction", spec.warmup_fraction},
      {"alpha", spec.alpha},
  };
}

nlohmann::json to_json(const RegularizerKnobs& knobs) {
  return {{"dropout", knobs.dropout}, {"label_smoothing", knobs.label_smoothing}};
}

nlohmann::json to_json(const TrialSpec& spec) {
  return {
      {"config", to_json(spec.config)},
      {"schedule", to_json(spec.schedule)},
      {"knobs", to_json(spec.knobs)},
      {"workload", spec.workload},
      {"seed", spec.seed},
      {"label", spec.label},
  };
}

nlohmann::json to_json(const TrialRecord& record) {
  nlohmann::json history = nlohmann::json::array();
  for (const EvalPoint& p : record.eval_history) history.push_back({p.step, p.metric});
  nlohmann::json j{
      {"spec", to_json(record.spec)},
      {"eval_history", std::move(history)},
      {"final_metric", record.final_metric},
      {"aborted", record.aborted},
      {"steps_run", record.steps_run},
      {"target", record.target},
  };
  if (record.steps_to_target)
    j["steps_to_target"] = *record.steps_to_target;
  else
    j["steps_to_target"] = nullptr;
  return j;
}

nlohmann::json to_json(const SuiteTargets& targets) {
  nlohmann::json entries = nlohmann::json::array();
  for (const WorkloadTarget& t : targets.entries) {
    nlohmann::json runs = nlohmann::json::array();
    for (const OracleRun& r : t.runs) {
      runs.push_back({
          {"lr", r.lr},
          {"seed", r.seed},
          {"best_metric", r.best_metric},
          {"final_metric", r.final_metric},
          {"aborted", r.aborted},
      });
    }
    entries.push_back({
        {"workload", t.workload},
        {"best_metric", t.best_metric},
        {"target", t.target},
        {"runs", std::move(runs)},
    });
  }
  return nlohmann::json{{"entries", std::move(entries)}};
}

nlohmann::json to_json(const TimeTable& table) {
  return {{"rows", table.rows}, {"cols", table.cols}, {"times", table.times}};
}

SuiteTargets suite_targets_from_json(const nlohmann::json& j) {
  SuiteTargets targets;
  for (const auto& e : j.at("entries")) {
    WorkloadTarget t;
    t.workload = e.at("workload").get<std::string>();
    t.best_metric = e.at("best_metric").get<double>();
    t.target = e.at("target").get<double>();
    for (const auto& r : e.at("runs")) {
      OracleRun run;
      run.lr = r.at("lr").get<double>();
      run.seed = r.at("seed").get<std::uint64_t>();
      run.best_metric = r.at("best_metric").get<double>();
      run.final_metric = r.at("final_metric").get<double>();
      run.aborted = r.at("aborted").get<bool>();
      t.runs.push_back(run);
    }
    targets.entries.push_back(std::move(t));
  }
  return targets;
}

std::string time_table_csv(const TimeTable& table, std::string_view manifest_digest) {
  if (table.times.size() != table.rows.size())
    throw std::invalid_argument("time_table_csv: row count mismatch");
  std::string out;
  out += "# manifest ";
  out += manifest_digest;
  out += "\nalgorithm,workload,fraction\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.times[r].size() != table.cols.size())
      throw std::invalid_argument("time_table_csv: column count mismatch");
    check_csv_token(table.rows[r]);
    for (std::size_t c = 0; c < table.cols.size(); ++c) {
      check_csv_token(table.cols[c]);
      double v = table.times[r][c];
      out += table.rows[r];
      out += ',';
      out += table.cols[c];
      out += ',';
      out += v == kUnreached ? "UNREACHED" : format_double(v);
      out += '\n';
    }
  }
  return out;
}

TimeTable time_table_from_csv(std::string_view text) {
  std::vector<std::string> rows, cols;
  std::map<std::pair<std::string, std::string>, double> cells;
  bool saw_header = false;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (!saw_header) {
      if (line != "algorithm,workload,fraction")
        throw std::runtime_error("time table csv: bad header: '" + std::string(line) + "'");
      saw_header = true;
      continue;
    }

    std::size_t c1 = line.find(',');
    std::size_t c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos)
      throw std::runtime_error("time table csv: bad row: '" + std::string(line) + "'");
    std::string row(line.substr(0, c1));
    std::string col(line.substr(c1 + 1, c2 - c1 - 1));
    std::string_view cell = line.substr(c2 + 1);
    if (row.empty() || col.empty())
      throw std::runtime_error("time table csv: empty label: '" + std::string(line) + "'");

    double value;
    if (cell == "UNREACHED") {
      value = kUnreached;
    } else {
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value))
        throw std::runtime_error("time table csv: bad fraction: '" + std::string(cell) + "'");
    }

    if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
    if (std::find(cols.begin(), cols.end(), col) == cols.end()) cols.push_back(col);
    if (!cells.emplace(std::make_pair(row, col), value).second)
      throw std::runtime_error("time table csv: duplicate cell " + row + "/" + col);
  }
  if (!saw_header) throw std::runtime_error("time table csv: missing header");

  TimeTable table;
  table.rows = std::move(rows);
  table.cols = std::move(cols);
  table.times.resize(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    table.times[r].resize(table.cols.size());
    for (std::size_t c = 0; c < table.cols.size(); ++c) {
      auto it = cells.find({table.rows[r], table.cols[c]});
      if (it == cells.end())
        throw std::runtime_error("time table csv: missing cell " + table.rows[r] + "/" +
                                 table.cols[c]);
      table.times[r][c] = it->second;
    }
  }
  return table;
}

std::string profile_csv(const PerformanceProfile& profile, double tau_max,
                        std::string_view manifest_digest) {
  std::string out;
  out += "# manifest ";
  out += manifest_digest;
  out += "\ntau,p\n";
  for (const auto& [tau, p] : profile.breakpoints(tau_max)) {
    out += format_double(tau);
    out += ',';
    out += format_double(p);
    out += '\n';
  }
  return out;
}

void write_text_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path parent = path.parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("write_text_atomic: cannot open " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write_text_atomic: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("LRFBENCH_OUT"); env != nullptr && *env != '\0')
    return std::filesystem::path(env);
  return std::filesystem::path("out");
}

}  // namespace lrfbench
