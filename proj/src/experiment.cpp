#include "spfts/experiment.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "spfts/errors.hpp"
#include "spfts/serialize.hpp"
#include "spfts/spectral.hpp"
#include "spfts/stats.hpp"
#include "spfts/svg.hpp"

namespace spfts {

namespace fs = std::filesystem;

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  workers.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

void ensure_dir(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + dir + "': " + ec.message());
}

std::optional<std::uint64_t> env_seed_override() {
  const char* env = std::getenv("SPFTS_SEED");
  if (!env || !*env) return std::nullopt;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    throw ConfigError("SPFTS_SEED must be a nonnegative integer");
  }
}

std::vector<double> linspace_time(int T) {
  std::vector<double> xs(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) xs[static_cast<std::size_t>(t)] = static_cast<double>(t + 1);
  return xs;
}

const char* kSeriesColors[] = {"#c0392b", "#2471a3", "#1e8449", "#9b59b6", "#d68910",
                               "#17a589", "#884ea0", "#5d6d7e"};

void write_eigenvector_figures(const std::string& out_dir, const EigenDecomposition& eig,
                               int k_max, int T, const std::string& hash) {
  const auto xs = linspace_time(T);
  for (int k = 1; k <= k_max && k < T; ++k) {
    LinePlot plot("Sample eigenvector " + std::to_string(k) + " vs trigonometric limit", "t",
                  "coordinate");
    plot.set_metadata("config_hash=" + hash);
    const Eigen::VectorXd d = spurious_vector(k, T) / spurious_vector(k, T).norm();
    std::vector<double> uk(T), dk(T);
    for (int t = 0; t < T; ++t) {
      uk[static_cast<std::size_t>(t)] = eig.vectors(t, k - 1);
      dk[static_cast<std::size_t>(t)] = d[t];
    }
    plot.add_line(xs, uk, "eigenvector " + std::to_string(k),
                  kSeriesColors[(k - 1) % 8], 1.6);
    plot.add_line(xs, dk, "limit d_" + std::to_string(k), "#111111", 1.4, true);
    plot.write_svg(out_dir + "/eigenvector_" + std::to_string(k) + ".svg");
    plot.write_csv(out_dir + "/eigenvector_" + std::to_string(k) + ".csv");
  }
}

void write_scree_figure(const std::string& out_dir, const std::vector<double>& median_share,
                        int k_max, const std::string& hash) {
  LinePlot plot("Variance shares vs limit law", "k", "share");
  plot.set_metadata("config_hash=" + hash);
  std::vector<double> ks, theory;
  for (int k = 1; k <= k_max; ++k) {
    ks.push_back(k);
    theory.push_back(theory_share(k));
  }
  plot.add_line(ks, median_share, "median share", "#c0392b", 1.8);
  plot.add_line(ks, theory, "limit 6/(k pi)^2", "#111111", 1.4, true);
  plot.write_svg(out_dir + "/scree.svg");
  plot.write_csv(out_dir + "/scree.csv");
}

}  // namespace

SimulateSummary run_simulate(const SimulateConfig& cfg, bool write_outputs) {
  cfg.model.validate();
  if (cfg.replicates < 1) throw ConfigError("replicates must be >= 1");
  if (cfg.k_max < 1 || cfg.k_max >= cfg.model.T) throw ConfigError("need 1 <= k_max < T");

  const auto ctx = build_fourier_basis(cfg.model.q, std::max(101, 4 * cfg.model.q + 1));

  SimulateSummary summary;
  summary.config = cfg;
  summary.reports.resize(static_cast<std::size_t>(cfg.replicates));
  std::vector<EigenDecomposition> first_eig(1);

  parallel_for(cfg.replicates, cfg.threads, [&](int r) {
    const SimulationDraw draw = simulate_replicate(cfg.model, ctx, static_cast<std::uint64_t>(r));
    const GramMatrix gram = gram_matrix(draw.panel);
    const EigenDecomposition eig = eigendecompose(gram, cfg.k_max);
    const OperatorMatrix om = build_omega(draw.loadings, ctx);
    ReportInputs in;
    in.T = cfg.model.T;
    in.p = cfg.model.p;
    in.k_max = cfg.k_max;
    in.trace_ce_omega = trace_ce_omega(draw.covariance, om);
    in.acf_lags = cfg.acf_lags;
    summary.reports[static_cast<std::size_t>(r)] = build_report(eig, in);
    if (r == 0) first_eig[0] = eig;
  });

  for (int k = 0; k < cfg.k_max; ++k) {
    std::vector<double> al, sh, ev, th;
    for (const auto& rep : summary.reports) {
      al.push_back(rep.alignments[static_cast<std::size_t>(k)]);
      sh.push_back(rep.variance_shares[static_cast<std::size_t>(k)]);
      ev.push_back(rep.eigenvalues[static_cast<std::size_t>(k)]);
      th.push_back(rep.theory_eigenvalues[static_cast<std::size_t>(k)]);
    }
    summary.median_alignment.push_back(median(al));
    summary.alignment_iqr_low.push_back(quantile(al, 0.25));
    summary.alignment_iqr_high.push_back(quantile(al, 0.75));
    summary.median_share.push_back(median(sh));
    summary.share_iqr_low.push_back(quantile(sh, 0.25));
    summary.share_iqr_high.push_back(quantile(sh, 0.75));
    summary.median_eigenvalue.push_back(median(ev));
    summary.eigenvalue_iqr_low.push_back(quantile(ev, 0.25));
    summary.eigenvalue_iqr_high.push_back(quantile(ev, 0.75));
    summary.mean_eigenvalue.push_back(mean(ev));
    summary.mean_theory_eigenvalue.push_back(mean(th));
  }

  if (write_outputs) {
    ensure_dir(cfg.out_dir);
    const json model_json = to_json(cfg.model);
    const std::string hash = config_hash(model_json);
    for (int r = 0; r < cfg.replicates; ++r) {
      json j = to_json(summary.reports[static_cast<std::size_t>(r)]);
      j["replicate"] = r;
      j["config_hash"] = hash;
      std::ostringstream name;
      name << cfg.out_dir << "/report_r" << std::setfill('0') << std::setw(3) << r << ".json";
      write_json_file(name.str(), j);
    }
    json agg;
    agg["schema_version"] = kSchemaVersion;
    agg["config_hash"] = hash;
    agg["model"] = model_json;
    agg["replicates"] = cfg.replicates;
    agg["k_max"] = cfg.k_max;
    agg["median_alignment"] = summary.median_alignment;
    agg["alignment_iqr_low"] = summary.alignment_iqr_low;
    agg["alignment_iqr_high"] = summary.alignment_iqr_high;
    agg["median_share"] = summary.median_share;
    agg["share_iqr_low"] = summary.share_iqr_low;
    agg["share_iqr_high"] = summary.share_iqr_high;
    agg["median_eigenvalue"] = summary.median_eigenvalue;
    agg["eigenvalue_iqr_low"] = summary.eigenvalue_iqr_low;
    agg["eigenvalue_iqr_high"] = summary.eigenvalue_iqr_high;
    agg["mean_eigenvalue"] = summary.mean_eigenvalue;
    agg["mean_theory_eigenvalue"] = summary.mean_theory_eigenvalue;
    write_json_file(cfg.out_dir + "/summary.json", agg);
    write_eigenvector_figures(cfg.out_dir, first_eig[0], cfg.k_max, cfg.model.T, hash);
    write_scree_figure(cfg.out_dir, summary.median_share, cfg.k_max, hash);
  }
  return summary;
}

std::vector<RankRow> run_rank(const RankCommandConfig& cfg, bool write_outputs) {
  std::vector<RankRow> rows;
  auto ctx = build_fourier_basis(cfg.model.q, std::max(101, 4 * cfg.model.q + 1));

  if (cfg.settings.empty()) {
    rows.push_back({0, build_rank_report(cfg.model, ctx, cfg.k_grid)});
  } else {
    for (int setting : cfg.settings) {
      if (setting < 1 || setting > 6) throw ConfigError("settings must be in 1..6");
      ModelConfig model = cfg.model;
      switch (setting) {
        case 1:
          model.covariance.setting = CovarianceSetting::delocalized_flat;
          model.loadings.scheme = LoadingScheme::full_rank;
          break;
        case 2:
          model.covariance.setting = CovarianceSetting::delocalized_flat;
          model.loadings.scheme = LoadingScheme::low_eff_rank;
          break;
        case 3:
          model.covariance.setting = CovarianceSetting::localized_geometric;
          model.loadings.scheme = LoadingScheme::full_rank;
          break;
        case 4:
          model.covariance.setting = CovarianceSetting::localized_geometric;
          model.loadings.scheme = LoadingScheme::low_eff_rank;
          break;
        case 5:
          model.covariance.setting = CovarianceSetting::localized_rank2;
          model.loadings.scheme = LoadingScheme::full_rank;
          break;
        case 6:
          model.covariance.setting = CovarianceSetting::localized_rank2;
          model.loadings.scheme = LoadingScheme::low_eff_rank;
          break;
      }
      model.loadings.product_rank = 0;
      model.loadings.custom_A.clear();
      rows.push_back({setting, build_rank_report(model, ctx, cfg.k_grid)});
    }
  }

  if (write_outputs && !cfg.out_dir.empty()) {
    ensure_dir(cfg.out_dir);
    for (const auto& row : rows) {
      json j = to_json(row.report);
      j["setting"] = row.setting;
      j["config_hash"] = config_hash(to_json(cfg.model));
      const std::string name = row.setting ? "rank_setting" + std::to_string(row.setting)
                                           : "rank_custom";
      write_json_file(cfg.out_dir + "/" + name + ".json", j);
    }
  }
  return rows;
}

std::string format_rank_table(const std::vector<RankRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(9) << "setting" << std::setw(13) << "|C_eps|_2^2"
      << std::setw(12) << "ratio_Bn" << std::setw(11) << "R_hs" << std::setw(11) << "R_op"
      << std::setw(10) << "lower" << std::setw(10) << "upper" << std::setw(13) << "regime"
      << std::setw(8) << "cond_a" << std::setw(8) << "cond_b" << "order\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    double max_ratio = 0.0;
    for (const auto& s : r.per_n) max_ratio = std::max(max_ratio, s.ratio_b);
    out << std::left << std::setw(9)
        << (row.setting ? std::to_string(row.setting) : std::string("custom")) << std::setw(13)
        << std::setprecision(4) << r.hs_ceps * r.hs_ceps << std::setw(12) << max_ratio
        << std::setw(11) << r.effective_rank_hs << std::setw(11) << r.effective_rank_op
        << std::setw(10) << r.lower_bound << std::setw(10) << r.upper_bound << std::setw(13)
        << to_string(r.regime) << std::setw(8) << (r.cond_a ? "yes" : "no") << std::setw(8)
        << (r.cond_b ? "yes" : "no") << (r.order_tag.empty() ? "-" : r.order_tag) << "\n";
  }
  return out.str();
}

namespace {

// Re-throws pipeline failures with the failing stage named.
template <typename Fn>
auto analyze_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DataError& e) {
    throw DataError(std::string(stage) + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(std::string(stage) + ": " + e.what());
  }
}

json analyze_config_json(const AnalyzeConfig& cfg) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["data"] = cfg.data_path;
  j["schema"] = cfg.schema == CsvSchema::long_format ? "long" : "wide";
  j["q"] = cfg.q;
  j["k_max"] = cfg.k_max;
  j["aggregate_tail"] = cfg.aggregate_cutoff;
  return j;
}

}  // namespace

AnalyzeResult run_analyze(const AnalyzeConfig& cfg, bool write_outputs) {
  if (cfg.q < 1) throw ConfigError("analyze: q must be >= 1");
  if (cfg.k_max < 1) throw ConfigError("analyze: k_max must be >= 1");

  RawPanel raw =
      analyze_stage("ingest", [&] { return load_panel_csv(cfg.data_path, cfg.schema); });
  if (!cfg.aggregate_cutoff.empty()) {
    raw = analyze_stage("aggregate", [&] { return aggregate_tail(raw, cfg.aggregate_cutoff); });
  }
  const auto ctx =
      analyze_stage("basis", [&] { return data_basis_context(cfg.q, raw.grid_values); });
  auto [panel, info] = analyze_stage("smooth", [&] { return log_smooth(raw, ctx); });
  if (!cfg.save_panel_path.empty()) {
    analyze_stage("save-panel", [&] { save_panel(panel, cfg.save_panel_path); return 0; });
  }

  const GramMatrix gram = analyze_stage("gram", [&] { return gram_matrix(panel); });
  const int k_max = std::min(cfg.k_max, panel.T() - 1);
  const EigenDecomposition eig =
      analyze_stage("eigen", [&] { return eigendecompose(gram, k_max); });
  ReportInputs in;
  in.T = panel.T();
  in.p = panel.p();
  in.k_max = k_max;
  in.acf_lags = std::min(cfg.acf_lags, panel.T() - 1);
  AnalyzeResult result{build_report(eig, in), info, panel.p(), panel.T(), raw.m()};

  if (write_outputs && !cfg.out_dir.empty()) {
    ensure_dir(cfg.out_dir);
    const std::string hash = config_hash(analyze_config_json(cfg));
    json j = to_json(result.report);
    j["data_path"] = cfg.data_path;
    j["interpolated_cells"] = info.interpolated_cells;
    j["config_hash"] = hash;
    write_json_file(cfg.out_dir + "/analysis.json", j);
    write_eigenvector_figures(cfg.out_dir, eig, k_max, panel.T(), hash);
    write_scree_figure(cfg.out_dir, result.report.variance_shares, k_max, hash);
  }
  return result;
}

ProbeSummary run_probe(const ProbeConfig& cfg, bool write_outputs) {
  cfg.model.validate();
  if (cfg.replicates < 1) throw ConfigError("replicates must be >= 1");
  if (cfg.k_max < 1 || cfg.k_max >= cfg.model.T) throw ConfigError("need 1 <= k_max < T");

  const auto ctx = build_fourier_basis(cfg.model.q, std::max(101, 4 * cfg.model.q + 1));
  const CovarianceSpec cov = make_covariance(cfg.model.covariance, cfg.model.q, ctx);

  ProbeSummary summary;
  summary.config = cfg;
  // Conjectured nonstationary dimension: nonzero covariance directions times the
  // per-direction loading rank.
  int cov_rank = 0;
  for (int n = 0; n < cov.c.size(); ++n) {
    if (cov.c[n] > 1e-12) ++cov_rank;
  }
  const int per_direction_rank =
      cfg.model.loadings.product_rank > 0 ? cfg.model.loadings.product_rank : cfg.model.K;
  summary.conjectured_split = std::min(cov_rank * per_direction_rank, cfg.k_max);

  summary.lag1.assign(static_cast<std::size_t>(cfg.replicates),
                      std::vector<double>(static_cast<std::size_t>(cfg.k_max), 0.0));
  parallel_for(cfg.replicates, cfg.threads, [&](int r) {
    const SimulationDraw draw = simulate_replicate(cfg.model, ctx, static_cast<std::uint64_t>(r));
    const GramMatrix gram = gram_matrix(draw.panel);
    const EigenDecomposition eig = eigendecompose(gram, cfg.k_max);
    for (int k = 0; k < cfg.k_max; ++k) {
      const Eigen::VectorXd acf = eigenvector_acf(eig.vectors.col(k), 1);
      summary.lag1[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] = acf[0];
    }
  });

  const int split = summary.conjectured_split;
  for (int k = 0; k < cfg.k_max; ++k) {
    std::vector<double> vals;
    for (const auto& row : summary.lag1) vals.push_back(row[static_cast<std::size_t>(k)]);
    const double med = median(vals);
    summary.median_lag1.push_back(med);
    summary.classification.push_back(med > cfg.persistent_cutoff  ? "persistent"
                                     : med < cfg.noise_cutoff     ? "white-noise"
                                                                  : "ambiguous");
  }
  for (const auto& row : summary.lag1) {
    bool hit = true;
    for (int k = 0; k < cfg.k_max; ++k) {
      const double a = row[static_cast<std::size_t>(k)];
      if (k < split ? a <= cfg.persistent_cutoff : a >= cfg.noise_cutoff) {
        hit = false;
        break;
      }
    }
    if (hit) ++summary.split_hits;
  }

  if (write_outputs && !cfg.out_dir.empty()) {
    ensure_dir(cfg.out_dir);
    json j;
    j["schema_version"] = kSchemaVersion;
    j["config_hash"] = config_hash(to_json(cfg.model));
    j["conjectured_split"] = summary.conjectured_split;
    j["median_lag1"] = summary.median_lag1;
    j["classification"] = summary.classification;
    j["split_hits"] = summary.split_hits;
    j["replicates"] = cfg.replicates;
    j["lag1"] = summary.lag1;
    write_json_file(cfg.out_dir + "/probe.json", j);
  }
  return summary;
}

namespace {

int require_schema_version(const json& j) {
  if (!j.contains("schema_version")) throw ConfigError("config missing schema_version");
  const int v = j["schema_version"].get<int>();
  if (v != kSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(v));
  }
  return v;
}

}  // namespace

SimulateConfig simulate_config_from_json(const json& j) {
  SimulateConfig cfg;
  require_schema_version(j);
  try {
    cfg.model = model_config_from_json(j.at("model"));
    cfg.replicates = j.value("replicates", 50);
    cfg.k_max = j.value("k_max", 8);
    cfg.acf_lags = j.value("acf_lags", 20);
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid simulate config: ") + e.what());
  }
  if (auto seed = env_seed_override()) cfg.model.seed = *seed;
  return cfg;
}

RankCommandConfig rank_config_from_json(const json& j) {
  RankCommandConfig cfg;
  require_schema_version(j);
  try {
    cfg.model = model_config_from_json(j.at("model"));
    if (j.contains("settings")) cfg.settings = j["settings"].get<std::vector<int>>();
    if (j.contains("k_grid")) cfg.k_grid = j["k_grid"].get<std::vector<int>>();
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid rank config: ") + e.what());
  }
  if (auto seed = env_seed_override()) cfg.model.seed = *seed;
  return cfg;
}

ProbeConfig probe_config_from_json(const json& j) {
  ProbeConfig cfg;
  require_schema_version(j);
  try {
    cfg.model = model_config_from_json(j.at("model"));
    cfg.replicates = j.value("replicates", 50);
    cfg.k_max = j.value("k_max", 8);
    cfg.persistent_cutoff = j.value("persistent_cutoff", 0.8);
    cfg.noise_cutoff = j.value("noise_cutoff", 0.3);
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid probe config: ") + e.what());
  }
  if (auto seed = env_seed_override()) cfg.model.seed = *seed;
  return cfg;
}

}  // namespace spfts
