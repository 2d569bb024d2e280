#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spfts/diagnostics.hpp"
#include "spfts/dgp.hpp"
#include "spfts/pipeline.hpp"
#include "spfts/rank.hpp"

namespace spfts {

// Runs fn(0..n-1) on `threads` workers; indices are handed out dynamically.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

struct SimulateConfig {
  ModelConfig model;
  int replicates = 50;
  int k_max = 5;
  int acf_lags = 20;
  int threads = 1;
  std::string out_dir;
};

struct SimulateSummary {
  SimulateConfig config;
  std::vector<SpectralReport> reports;       // one per replicate
  std::vector<double> median_alignment;      // per k
  std::vector<double> alignment_iqr_low, alignment_iqr_high;
  std::vector<double> median_share;
  std::vector<double> share_iqr_low, share_iqr_high;
  std::vector<double> median_eigenvalue;
  std::vector<double> eigenvalue_iqr_low, eigenvalue_iqr_high;
  std::vector<double> mean_eigenvalue;       // per k, replicate mean
  std::vector<double> mean_theory_eigenvalue;
};

SimulateSummary run_simulate(const SimulateConfig& cfg, bool write_outputs);

struct RankCommandConfig {
  std::vector<int> settings;  // subset of 1..6; empty -> use `model` as-is
  ModelConfig model;          // dimensions, seed, and the custom fallback
  std::vector<int> k_grid = {5, 10, 20, 40};
  std::string out_dir;
};

struct RankRow {
  int setting = 0;  // 0 for custom
  EffectiveRankReport report;
};

std::vector<RankRow> run_rank(const RankCommandConfig& cfg, bool write_outputs);
std::string format_rank_table(const std::vector<RankRow>& rows);

struct AnalyzeConfig {
  std::string data_path;
  CsvSchema schema = CsvSchema::long_format;
  int q = 6;
  int k_max = 8;
  int acf_lags = 20;
  std::string aggregate_cutoff;  // empty -> no tail pooling
  std::string save_panel_path;   // empty -> no container written
  std::string out_dir;
};

struct AnalyzeResult {
  SpectralReport report;
  SmoothingInfo smoothing;
  int p = 0, T = 0, m = 0;
};

AnalyzeResult run_analyze(const AnalyzeConfig& cfg, bool write_outputs);

struct ProbeConfig {
  ModelConfig model;
  int replicates = 50;
  int k_max = 8;
  double persistent_cutoff = 0.8;
  double noise_cutoff = 0.3;
  int threads = 1;
  std::string out_dir;
};

struct ProbeSummary {
  ProbeConfig config;
  int conjectured_split = 0;               // nnz(C_eps spectrum) * per-direction rank
  std::vector<std::vector<double>> lag1;   // replicate -> lag-1 ACF of top eigenvectors
  std::vector<double> median_lag1;         // per eigenvector
  std::vector<std::string> classification; // persistent | white-noise | ambiguous
  int split_hits = 0;                      // replicates matching the conjectured split
};

ProbeSummary run_probe(const ProbeConfig& cfg, bool write_outputs);

// JSON front door used by the CLI: validates schema_version and mode-specific
// fields, applies the optional seed override from the environment.
SimulateConfig simulate_config_from_json(const nlohmann::json& j);
RankCommandConfig rank_config_from_json(const nlohmann::json& j);
ProbeConfig probe_config_from_json(const nlohmann::json& j);

}  // namespace spfts
