#include "spfts/serialize.hpp"

#include <fstream>

#include "spfts/errors.hpp"

namespace spfts {

namespace {

CovarianceSetting covariance_setting_from_string(const std::string& s) {
  if (s == "delocalized_flat") return CovarianceSetting::delocalized_flat;
  if (s == "localized_geometric") return CovarianceSetting::localized_geometric;
  if (s == "localized_rank2") return CovarianceSetting::localized_rank2;
  if (s == "custom") return CovarianceSetting::custom;
  throw ConfigError("unknown covariance setting '" + s + "'");
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return {};
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(i)].size()) != cols) {
      throw ConfigError("ragged matrix in config");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(i, c) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

}  // namespace

json to_json(const ModelConfig& cfg) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["T"] = cfg.T;
  j["p"] = cfg.p;
  j["q"] = cfg.q;
  j["K"] = cfg.K;
  j["seed"] = cfg.seed;
  json cov;
  cov["setting"] = to_string(cfg.covariance.setting);
  if (cfg.covariance.setting == CovarianceSetting::custom) {
    cov["c"] = vector_to_json(cfg.covariance.custom_c);
  }
  j["covariance"] = std::move(cov);
  json loadings;
  if (cfg.loadings.scheme == LoadingScheme::custom && cfg.loadings.product_rank > 0) {
    loadings["scheme"] = "rank_product";
    loadings["rank"] = cfg.loadings.product_rank;
  } else {
    loadings["scheme"] = to_string(cfg.loadings.scheme);
    if (cfg.loadings.scheme == LoadingScheme::custom) {
      json mats = json::array();
      for (const auto& a : cfg.loadings.custom_A) mats.push_back(matrix_to_json(a));
      loadings["A"] = std::move(mats);
    }
  }
  j["loadings"] = std::move(loadings);
  if (cfg.noise.variances.size() == 0) {
    j["noise"] = "default";
  } else {
    j["noise"] = vector_to_json(cfg.noise.variances);
  }
  j["distribution"] = to_string(cfg.distribution);
  return j;
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig cfg;
  try {
    if (j.contains("schema_version") && j["schema_version"].get<int>() != kSchemaVersion) {
      throw ConfigError("unsupported schema_version");
    }
    cfg.T = j.at("T").get<int>();
    cfg.p = j.at("p").get<int>();
    cfg.q = j.at("q").get<int>();
    cfg.K = j.at("K").get<int>();
    cfg.seed = j.value("seed", std::uint64_t{1});

    const json& cov = j.at("covariance");
    const std::string setting = cov.at("setting").get<std::string>();
    cfg.covariance.setting = covariance_setting_from_string(setting);
    if (cfg.covariance.setting == CovarianceSetting::custom) {
      cfg.covariance.custom_c = vector_from_json(cov.at("c"));
    }

    const json& loadings = j.at("loadings");
    const std::string scheme = loadings.at("scheme").get<std::string>();
    if (scheme == "full_rank") {
      cfg.loadings.scheme = LoadingScheme::full_rank;
    } else if (scheme == "low_eff_rank") {
      cfg.loadings.scheme = LoadingScheme::low_eff_rank;
    } else if (scheme == "rank_product") {
      cfg.loadings.scheme = LoadingScheme::custom;
      cfg.loadings.product_rank = loadings.at("rank").get<int>();
    } else if (scheme == "custom") {
      cfg.loadings.scheme = LoadingScheme::custom;
      for (const auto& mat : loadings.at("A")) {
        cfg.loadings.custom_A.push_back(matrix_from_json(mat));
      }
    } else {
      throw ConfigError("unknown loading scheme '" + scheme + "'");
    }

    if (j.contains("noise") && j["noise"].is_array()) {
      cfg.noise.variances = vector_from_json(j["noise"]);
    } else if (j.contains("noise") && j["noise"].is_string() &&
               j["noise"].get<std::string>() == "none") {
      cfg.noise = NoiseSpec::none(cfg.q);
    }
    if (j.contains("distribution") &&
        j["distribution"].get<std::string>() != "gaussian") {
      throw ConfigError("only the gaussian innovation distribution is available");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid model config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

json to_json(const SpectralReport& rep) {
  json j;
  j["schema_version"] = rep.schema_version;
  j["T"] = rep.T;
  j["p"] = rep.p;
  j["k_max"] = rep.k_max;
  j["degenerate"] = rep.degenerate;
  j["total_variance"] = rep.total_variance;
  j["trace_ce_omega"] = rep.trace_ce_omega;
  j["eigenvalues"] = rep.eigenvalues;
  j["variance_shares"] = rep.variance_shares;
  j["alignments"] = rep.alignments;
  j["theory_eigenvalues"] = rep.theory_eigenvalues;
  j["theory_shares"] = rep.theory_shares;
  j["acf"] = rep.acf;
  return j;
}

SpectralReport spectral_report_from_json(const json& j) {
  SpectralReport rep;
  try {
    rep.schema_version = j.at("schema_version").get<int>();
    rep.T = j.at("T").get<int>();
    rep.p = j.at("p").get<int>();
    rep.k_max = j.at("k_max").get<int>();
    rep.degenerate = j.at("degenerate").get<bool>();
    rep.total_variance = j.at("total_variance").get<double>();
    rep.trace_ce_omega = j.at("trace_ce_omega").get<double>();
    rep.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    rep.variance_shares = j.at("variance_shares").get<std::vector<double>>();
    rep.alignments = j.at("alignments").get<std::vector<double>>();
    rep.theory_eigenvalues = j.at("theory_eigenvalues").get<std::vector<double>>();
    rep.theory_shares = j.at("theory_shares").get<std::vector<double>>();
    rep.acf = j.at("acf").get<std::vector<std::vector<double>>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid spectral report: ") + e.what());
  }
  return rep;
}

json to_json(const EffectiveRankReport& rep) {
  json j;
  j["schema_version"] = rep.schema_version;
  j["T"] = rep.T;
  j["p"] = rep.p;
  j["q"] = rep.q;
  j["K"] = rep.K;
  j["effective_rank_op"] = rep.effective_rank_op;
  j["effective_rank_hs"] = rep.effective_rank_hs;
  j["trace_c"] = rep.trace_c;
  j["hs_c"] = rep.hs_c;
  j["op_c"] = rep.op_c;
  j["hs_ceps"] = rep.hs_ceps;
  j["upper_bound"] = rep.upper_bound;
  j["lower_bound"] = rep.lower_bound;
  j["regime"] = to_string(rep.regime);
  j["cond_a"] = rep.cond_a;
  j["cond_b"] = rep.cond_b;
  j["divergence_slope"] = rep.divergence_slope;
  j["noise_lhs"] = rep.noise_lhs;
  j["noise_rhs"] = rep.noise_rhs;
  j["noise_ok"] = rep.noise_ok;
  j["order_tag"] = rep.order_tag;
  json per_n = json::array();
  for (const auto& s : rep.per_n) {
    per_n.push_back({{"n", s.n},
                     {"trace_b", s.trace_b},
                     {"hs_b", s.hs_b},
                     {"op_b", s.op_b},
                     {"rank_b", s.rank_b},
                     {"alpha_b", s.alpha_b},
                     {"ratio_b", s.ratio_b}});
  }
  j["per_n"] = std::move(per_n);
  return j;
}

std::string config_hash(const json& j) {
  const std::string dump = j.dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf);
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace spfts
