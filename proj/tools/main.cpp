#include <CLI11.hpp>
#include <iostream>

#include "spfts/errors.hpp"
#include "spfts/experiment.hpp"
#include "spfts/serialize.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  int threads = 1;
};

int run_simulate_cmd(const CommonOpts& opts) {
  auto cfg = spfts::simulate_config_from_json(spfts::load_json_file(opts.config_path));
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (cfg.out_dir.empty()) throw spfts::ConfigError("simulate needs an output directory (--out)");
  cfg.threads = opts.threads;
  const auto summary = spfts::run_simulate(cfg, true);
  std::cout << "replicates: " << cfg.replicates << "\n";
  for (int k = 0; k < cfg.k_max; ++k) {
    std::cout << "k=" << k + 1 << "  median alignment "
              << summary.median_alignment[static_cast<std::size_t>(k)] << "  median share "
              << summary.median_share[static_cast<std::size_t>(k)] << "\n";
  }
  std::cout << "outputs written to " << cfg.out_dir << "\n";
  return kExitOk;
}

int run_rank_cmd(const CommonOpts& opts) {
  auto cfg = spfts::rank_config_from_json(spfts::load_json_file(opts.config_path));
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  const auto rows = spfts::run_rank(cfg, true);
  std::cout << spfts::format_rank_table(rows);
  return kExitOk;
}

int run_probe_cmd(const CommonOpts& opts) {
  auto cfg = spfts::probe_config_from_json(spfts::load_json_file(opts.config_path));
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  cfg.threads = opts.threads;
  const auto summary = spfts::run_probe(cfg, true);
  std::cout << "conjectured split at " << summary.conjectured_split << "\n";
  for (int k = 0; k < cfg.k_max; ++k) {
    std::cout << "eigenvector " << k + 1 << ": median lag-1 acf "
              << summary.median_lag1[static_cast<std::size_t>(k)] << " ("
              << summary.classification[static_cast<std::size_t>(k)] << ")\n";
  }
  std::cout << "split reproduced in " << summary.split_hits << "/" << cfg.replicates
            << " replicates\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and eigen-analysis diagnostics for nonstationary functional panels"};
  app.require_subcommand(1);

  CommonOpts sim_opts, rank_opts, probe_opts;

  auto* sim = app.add_subcommand("simulate", "Simulate panels and report eigenstructure");
  sim->add_option("--config", sim_opts.config_path, "experiment config JSON")->required();
  sim->add_option("--out", sim_opts.out_dir, "output directory");
  sim->add_option("--threads", sim_opts.threads, "worker threads")->default_val(1);

  auto* rank = app.add_subcommand("rank", "Effective-rank ledger and bounds");
  rank->add_option("--config", rank_opts.config_path, "rank config JSON")->required();
  rank->add_option("--out", rank_opts.out_dir, "output directory");

  auto* probe = app.add_subcommand("probe", "Eigenvector persistence probe");
  probe->add_option("--config", probe_opts.config_path, "probe config JSON")->required();
  probe->add_option("--out", probe_opts.out_dir, "output directory");
  probe->add_option("--threads", probe_opts.threads, "worker threads")->default_val(1);

  spfts::AnalyzeConfig analyze_cfg;
  std::string schema = "long";
  auto* analyze = app.add_subcommand("analyze", "Ingest a CSV panel and run the eigen pipeline");
  analyze->add_option("--data", analyze_cfg.data_path, "input CSV path")->required();
  analyze->add_option("--schema", schema, "long|wide")->default_val("long");
  analyze->add_option("--q", analyze_cfg.q, "basis truncation order")->default_val(6);
  analyze->add_option("--kmax", analyze_cfg.k_max, "eigenvectors to report")->default_val(8);
  analyze->add_option("--out", analyze_cfg.out_dir, "output directory");
  analyze->add_option("--aggregate-tail", analyze_cfg.aggregate_cutoff,
                      "pool grid points at/above this label");
  analyze->add_option("--save-panel", analyze_cfg.save_panel_path,
                      "write the smoothed coefficient panel container here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sim->parsed()) return run_simulate_cmd(sim_opts);
    if (rank->parsed()) return run_rank_cmd(rank_opts);
    if (probe->parsed()) return run_probe_cmd(probe_opts);
    if (analyze->parsed()) {
      if (schema == "long") {
        analyze_cfg.schema = spfts::CsvSchema::long_format;
      } else if (schema == "wide") {
        analyze_cfg.schema = spfts::CsvSchema::wide_format;
      } else {
        throw spfts::ConfigError("--schema must be long or wide");
      }
      const auto result = spfts::run_analyze(analyze_cfg, !analyze_cfg.out_dir.empty());
      std::cout << "panel: p=" << result.p << " T=" << result.T << " m=" << result.m << "\n";
      for (std::size_t k = 0; k < result.report.alignments.size(); ++k) {
        std::cout << "k=" << k + 1 << "  alignment " << result.report.alignments[k] << "  share "
                  << result.report.variance_shares[k] << "\n";
      }
      if (result.smoothing.interpolated_cells > 0) {
        std::cout << "interpolated cells: " << result.smoothing.interpolated_cells << "\n";
      }
      return kExitOk;
    }
  } catch (const spfts::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const spfts::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const spfts::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitConfig;
}
