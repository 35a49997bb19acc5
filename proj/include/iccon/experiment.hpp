#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "iccon/che.hpp"
#include "iccon/config.hpp"
#include "iccon/csv.hpp"
#include "iccon/errors.hpp"
#include "iccon/simulator.hpp"
#include "iccon/version.hpp"

namespace iccon {

/// One experiment invocation: a parsed config, the seed list, the policies
/// to run (churn may run both), and where to put the files.
struct RunManifest {
  ParsedConfig config;
  std::string config_text;  // original document, echoed for reproducibility
  std::vector<std::uint64_t> seeds;
  std::vector<SelectionPolicy> policies;
  std::filesystem::path out_dir;

  void validate() const {
    if (seeds.empty()) throw ConfigError("manifest: seed list must not be empty");
    std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
    if (unique.size() != seeds.size()) throw ConfigError("manifest: seeds must be distinct");
    if (config.scenario != ScenarioKind::kCheSweep && policies.empty())
      throw ConfigError("manifest: at least one policy is required");
  }
};

struct ExperimentResult {
  std::vector<std::filesystem::path> files;
  bool any_warmup_capped = false;
  std::string summary;
};

namespace detail {

struct Replica {
  SelectionPolicy policy;
  std::uint64_t seed;
  MetricsSeries series;
};

inline csv::Table churn_table(const Replica& replica, std::size_t ap_count) {
  csv::Table table;
  table.header = {"event_index", "policy", "seed", "requests", "hits", "chr_window",
                  "chr_cumulative"};
  for (std::size_t ap = 1; ap <= ap_count; ++ap) table.header.push_back("n_" + std::to_string(ap));
  for (const MetricsRow& row : replica.series.rows) {
    std::vector<std::string> cells = {csv::cell(row.event_index),
                                      to_string(replica.policy),
                                      csv::cell(replica.seed),
                                      csv::cell(row.requests),
                                      csv::cell(row.hits),
                                      csv::cell(row.chr),
                                      csv::cell(row.chr_cumulative)};
    for (std::uint64_t n : row.per_ap_users) cells.push_back(csv::cell(n));
    table.rows.push_back(std::move(cells));
  }
  return table;
}

inline csv::Table per_request_table(const Replica& replica) {
  csv::Table table;
  table.header = {"slot", "seed", "requests", "hits", "chr"};
  for (const MetricsRow& row : replica.series.rows) {
    table.rows.push_back({csv::cell(row.event_index), csv::cell(replica.seed),
                          csv::cell(row.requests), csv::cell(row.hits), csv::cell(row.chr)});
  }
  return table;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

/// Mean and population standard deviation.
inline MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(sq / static_cast<double>(values.size()));
  return out;
}

inline csv::Table sweep_table(const std::vector<CheSweepCell>& cells) {
  csv::Table table;
  table.header = {"alpha", "c_ratio", "c_items", "tau_seconds", "r", "chr"};
  for (const CheSweepCell& cell : cells) {
    std::vector<std::string> row = {csv::cell(cell.aggregation), csv::cell(cell.c_ratio),
                                    csv::cell(cell.cache_size)};
    if (cell.solution) {
      row.push_back(csv::cell(cell.solution->tau));
      row.push_back(csv::cell(cell.solution->r));
      row.push_back(csv::cell(cell.solution->chr));
    } else {
      row.insert(row.end(), {"nan", "nan", "nan"});
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw RuntimeError("write failed: " + path.string());
}

}  // namespace detail

/// Runs every (policy, seed) replica of the manifest's scenario, emits one
/// CSV per replica plus aggregate and summary files, and echoes the
/// configuration for reproducibility. Replicas run concurrently; all file
/// output happens afterwards in deterministic order.
inline ExperimentResult run_experiment(const RunManifest& manifest) {
  manifest.validate();
  std::error_code ec;
  std::filesystem::create_directories(manifest.out_dir, ec);
  if (ec) throw RuntimeError("cannot create output directory " + manifest.out_dir.string() +
                             ": " + ec.message());

  ExperimentResult result;
  std::ostringstream summary;
  summary << "iccon " << kVersion << " scenario=" << to_string(manifest.config.scenario) << "\n";

  const auto emit = [&](const std::filesystem::path& name, const csv::Table& table) {
    const std::filesystem::path path = manifest.out_dir / name;
    csv::write(path, table);
    result.files.push_back(path);
  };

  if (manifest.config.scenario == ScenarioKind::kCheSweep) {
    const CheSweepSpec& spec = *manifest.config.sweep;
    const auto cells = che_sweep(spec.alphas, spec.c_ratios, spec.base);
    emit("che_sweep.csv", detail::sweep_table(cells));
    std::size_t failed = 0;
    for (const auto& cell : cells) {
      if (!cell.solution) {
        ++failed;
        summary << "cell alpha=" << csv::cell(cell.aggregation)
                << " c_ratio=" << csv::cell(cell.c_ratio) << " skipped: " << cell.error << "\n";
      }
    }
    summary << "cells=" << cells.size() << " skipped=" << failed << "\n";
  } else {
    // Simulation scenarios: run all (policy, seed) replicas concurrently.
    const SimConfig& base = *manifest.config.sim;
    std::vector<detail::Replica> replicas;
    for (SelectionPolicy policy : manifest.policies) {
      for (std::uint64_t seed : manifest.seeds) {
        replicas.push_back(detail::Replica{policy, seed, {}});
      }
    }
    std::vector<std::future<MetricsSeries>> futures;
    futures.reserve(replicas.size());
    for (const detail::Replica& r : replicas) {
      SimConfig cfg = base;
      cfg.policy = r.policy;
      cfg.seed = r.seed;
      const ParsedConfig& parsed = manifest.config;
      futures.push_back(std::async(std::launch::async, [cfg, parsed]() {
        if (parsed.scenario == ScenarioKind::kChurn) return Simulation::run_churn_scenario(cfg);
        return Simulation::run_per_request_scenario(cfg, parsed.slots,
                                                    parsed.requests_per_slot);
      }));
    }
    for (std::size_t i = 0; i < replicas.size(); ++i) replicas[i].series = futures[i].get();

    const std::string prefix =
        manifest.config.scenario == ScenarioKind::kChurn ? "churn" : "per_request";
    csv::Table summary_table;
    summary_table.header = {"scenario", "policy", "seed", "rows", "requests", "hits",
                            "final_chr", "warmup_capped"};

    for (const detail::Replica& r : replicas) {
      const std::string name =
          prefix + "_" + to_string(r.policy) + "_seed" + std::to_string(r.seed) + ".csv";
      emit(name, manifest.config.scenario == ScenarioKind::kChurn
                     ? detail::churn_table(r, base.ap_count)
                     : detail::per_request_table(r));
      std::uint64_t requests = 0, hits = 0;
      for (const MetricsRow& row : r.series.rows) {
        requests += row.requests;
        hits += row.hits;
      }
      const std::optional<double> final_chr =
          r.series.rows.empty() ? std::nullopt : r.series.rows.back().chr;
      summary_table.rows.push_back({to_string(manifest.config.scenario), to_string(r.policy),
                                    csv::cell(r.seed), csv::cell(r.series.rows.size()),
                                    csv::cell(requests), csv::cell(hits), csv::cell(final_chr),
                                    csv::cell(std::uint64_t(r.series.warmup_capped ? 1 : 0))});
      result.any_warmup_capped = result.any_warmup_capped || r.series.warmup_capped;
      if (r.series.warmup_capped) {
        summary << "warning: warm-up hit the stabilization cap (policy="
                << to_string(r.policy) << " seed=" << r.seed << ")\n";
      }
    }

    // Aggregate across seeds, one block per policy.
    csv::Table aggregate;
    if (manifest.config.scenario == ScenarioKind::kChurn) {
      aggregate.header = {"event_index", "policy",
                          "requests_mean", "hits_mean",
                          "chr_window_mean", "chr_window_std",
                          "chr_cumulative_mean", "chr_cumulative_std"};
    } else {
      aggregate.header = {"slot", "policy", "chr_mean", "chr_std"};
    }
    const std::size_t row_count = replicas.empty() ? 0 : replicas.front().series.rows.size();
    for (SelectionPolicy policy : manifest.policies) {
      for (std::size_t row = 0; row < row_count; ++row) {
        std::vector<double> window, cumulative, reqs, hits;
        for (const detail::Replica& r : replicas) {
          if (r.policy != policy) continue;
          const MetricsRow& m = r.series.rows[row];
          if (m.chr) window.push_back(*m.chr);
          if (m.chr_cumulative) cumulative.push_back(*m.chr_cumulative);
          reqs.push_back(static_cast<double>(m.requests));
          hits.push_back(static_cast<double>(m.hits));
        }
        const auto w = detail::mean_std(window);
        const auto c = detail::mean_std(cumulative);
        if (manifest.config.scenario == ScenarioKind::kChurn) {
          aggregate.rows.push_back({csv::cell(row + 1), to_string(policy),
                                    csv::cell(detail::mean_std(reqs).mean),
                                    csv::cell(detail::mean_std(hits).mean), csv::cell(w.mean),
                                    csv::cell(w.std), csv::cell(c.mean), csv::cell(c.std)});
        } else {
          aggregate.rows.push_back(
              {csv::cell(row + 1), to_string(policy), csv::cell(w.mean), csv::cell(w.std)});
        }
      }
    }
    emit(prefix + "_aggregate.csv", aggregate);
    emit("summary.csv", summary_table);
    summary << "replicas=" << replicas.size() << " rows_per_replica=" << row_count << "\n";
  }

  // Manifest echo: enough to re-run the experiment bit for bit.
  std::ostringstream echo;
  echo << "# iccon run manifest\n";
  echo << "version = " << kVersion << "\n";
  echo << "scenario = " << to_string(manifest.config.scenario) << "\n";
  echo << "seeds = ";
  for (std::size_t i = 0; i < manifest.seeds.size(); ++i) {
    if (i > 0) echo << ",";
    echo << manifest.seeds[i];
  }
  echo << "\n";
  if (manifest.config.scenario != ScenarioKind::kCheSweep) {
    echo << "policies = ";
    for (std::size_t i = 0; i < manifest.policies.size(); ++i) {
      if (i > 0) echo << ",";
      echo << to_string(manifest.policies[i]);
    }
    echo << "\n";
  }
  echo << "# --- configuration ---\n" << manifest.config_text;
  const std::filesystem::path echo_path = manifest.out_dir / "manifest.txt";
  detail::write_file(echo_path, echo.str());
  result.files.push_back(echo_path);

  result.summary = summary.str();
  return result;
}

}  // namespace iccon
