#include "spfts/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "spfts/errors.hpp"

namespace spfts {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& s, int line_no, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line_no) + ": cannot parse " + what + " '" + s + "'");
  }
}

// Numeric sort with the original string labels kept; non-numeric labels keep
// their first-appearance position among themselves.
std::vector<std::string> sorted_numeric_labels(const std::vector<std::string>& labels) {
  std::vector<std::pair<double, std::string>> keyed;
  keyed.reserve(labels.size());
  double fallback = 0.0;
  for (const auto& label : labels) {
    double key;
    try {
      key = std::stod(label);
    } catch (const std::exception&) {
      key = fallback;
    }
    fallback += 1e-9;
    keyed.emplace_back(key, label);
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> out;
  out.reserve(keyed.size());
  for (auto& [key, label] : keyed) {
    (void)key;
    out.push_back(std::move(label));
  }
  return out;
}

std::map<std::string, int> index_of(const std::vector<std::string>& labels) {
  std::map<std::string, int> idx;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) idx.emplace(labels[i], i);
  return idx;
}

struct LongCell {
  double value = 0.0;
  double weight = 1.0;
};

RawPanel load_long(std::ifstream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: header row is mandatory");
  auto header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  if (header.size() < 4 || header[0] != "series" || header[1] != "time" || header[2] != "grid" ||
      header[3] != "value") {
    throw DataError("long schema expects header series,time,grid,value[,weight]");
  }
  const bool has_weight = header.size() >= 5 && header[4] == "weight";

  std::vector<std::string> series_order;
  std::map<std::string, int> series_seen;
  std::vector<std::string> time_set, grid_set;
  std::map<std::string, int> time_seen, grid_seen;
  std::map<std::tuple<std::string, std::string, std::string>, LongCell> cells;

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() < 4) {
      throw DataError("line " + std::to_string(line_no) + ": expected at least 4 fields");
    }
    const std::string sid = trim(fields[0]);
    const std::string tid = trim(fields[1]);
    const std::string gid = trim(fields[2]);
    if (sid.empty() || tid.empty() || gid.empty()) {
      throw DataError("line " + std::to_string(line_no) + ": empty key field");
    }
    if (series_seen.emplace(sid, 0).second) series_order.push_back(sid);
    if (time_seen.emplace(tid, 0).second) time_set.push_back(tid);
    if (grid_seen.emplace(gid, 0).second) grid_set.push_back(gid);

    const std::string value_field = trim(fields[3]);
    if (value_field.empty()) continue;  // explicit missing cell
    LongCell cell;
    cell.value = parse_number(value_field, line_no, "value");
    if (has_weight && fields.size() >= 5 && !trim(fields[4]).empty()) {
      cell.weight = parse_number(trim(fields[4]), line_no, "weight");
    }
    if (!cells.emplace(std::make_tuple(sid, tid, gid), cell).second) {
      throw DataError("line " + std::to_string(line_no) + ": duplicate (series,time,grid) key");
    }
  }
  if (series_order.empty()) throw DataError("no data rows found");

  RawPanel panel;
  panel.series_ids = series_order;
  panel.time_labels = sorted_numeric_labels(time_set);
  panel.grid_labels = sorted_numeric_labels(grid_set);
  const auto time_idx = index_of(panel.time_labels);
  const auto grid_idx = index_of(panel.grid_labels);
  const auto series_idx = index_of(panel.series_ids);

  const int p = panel.p(), T = panel.T(), m = panel.m();
  panel.values.assign(static_cast<std::size_t>(p), Eigen::MatrixXd::Zero(T, m));
  panel.missing.assign(static_cast<std::size_t>(p),
                       Eigen::Matrix<bool, -1, -1>::Constant(T, m, true));
  if (has_weight) {
    panel.weights =
        std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(p), Eigen::MatrixXd::Ones(T, m));
  }
  for (const auto& [key, cell] : cells) {
    const auto& [sid, tid, gid] = key;
    const auto i = static_cast<std::size_t>(series_idx.at(sid));
    const int t = time_idx.at(tid);
    const int g = grid_idx.at(gid);
    if (cell.value < 0) {
      throw DataError("negative value for series '" + sid + "' at time " + tid);
    }
    panel.values[i](t, g) = cell.value;
    panel.missing[i](t, g) = false;
    if (panel.weights) (*panel.weights)[i](t, g) = cell.weight;
  }

  panel.grid_values.resize(m);
  for (int g = 0; g < m; ++g) {
    try {
      panel.grid_values[g] = std::stod(panel.grid_labels[static_cast<std::size_t>(g)]);
    } catch (const std::exception&) {
      panel.grid_values[g] = g;  // positional grid for non-numeric labels
    }
  }
  return panel;
}

RawPanel load_wide(std::ifstream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: header row is mandatory");
  auto header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  if (header.size() < 3 || header[0] != "series" || header[1] != "time") {
    throw DataError("wide schema expects header series,time,<grid label>...");
  }
  const int m = static_cast<int>(header.size()) - 2;

  std::vector<std::string> series_order;
  std::map<std::string, int> series_seen;
  std::vector<std::string> time_set;
  std::map<std::string, int> time_seen;
  struct Row {
    std::vector<double> values;
    std::vector<bool> present;
  };
  std::map<std::pair<std::string, std::string>, Row> rows;

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != m + 2) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(m + 2) +
                      " fields, got " + std::to_string(fields.size()));
    }
    const std::string sid = trim(fields[0]);
    const std::string tid = trim(fields[1]);
    if (sid.empty() || tid.empty()) {
      throw DataError("line " + std::to_string(line_no) + ": empty key field");
    }
    if (series_seen.emplace(sid, 0).second) series_order.push_back(sid);
    if (time_seen.emplace(tid, 0).second) time_set.push_back(tid);
    Row row;
    row.values.resize(static_cast<std::size_t>(m), 0.0);
    row.present.resize(static_cast<std::size_t>(m), false);
    for (int g = 0; g < m; ++g) {
      const std::string field = trim(fields[static_cast<std::size_t>(g) + 2]);
      if (field.empty()) continue;
      row.values[static_cast<std::size_t>(g)] = parse_number(field, line_no, "value");
      row.present[static_cast<std::size_t>(g)] = true;
    }
    if (!rows.emplace(std::make_pair(sid, tid), std::move(row)).second) {
      throw DataError("line " + std::to_string(line_no) + ": duplicate (series,time) key");
    }
  }
  if (series_order.empty()) throw DataError("no data rows found");

  RawPanel panel;
  panel.series_ids = series_order;
  panel.time_labels = sorted_numeric_labels(time_set);
  panel.grid_labels.assign(header.begin() + 2, header.end());
  const auto time_idx = index_of(panel.time_labels);
  const auto series_idx = index_of(panel.series_ids);

  const int p = panel.p(), T = panel.T();
  panel.values.assign(static_cast<std::size_t>(p), Eigen::MatrixXd::Zero(T, m));
  panel.missing.assign(static_cast<std::size_t>(p),
                       Eigen::Matrix<bool, -1, -1>::Constant(T, m, true));
  for (const auto& [key, row] : rows) {
    const auto i = static_cast<std::size_t>(series_idx.at(key.first));
    const int t = time_idx.at(key.second);
    for (int g = 0; g < m; ++g) {
      if (!row.present[static_cast<std::size_t>(g)]) continue;
      const double v = row.values[static_cast<std::size_t>(g)];
      if (v < 0) throw DataError("negative value for series '" + key.first + "'");
      panel.values[i](t, g) = v;
      panel.missing[i](t, g) = false;
    }
  }

  panel.grid_values.resize(m);
  for (int g = 0; g < m; ++g) {
    try {
      panel.grid_values[g] = std::stod(panel.grid_labels[static_cast<std::size_t>(g)]);
    } catch (const std::exception&) {
      panel.grid_values[g] = g;
    }
  }
  for (int g = 0; g + 1 < m; ++g) {
    if (!(panel.grid_values[g] < panel.grid_values[g + 1])) {
      throw DataError("wide schema grid labels must be strictly increasing");
    }
  }
  return panel;
}

}  // namespace

int RawPanel::missing_count() const {
  int count = 0;
  for (const auto& mask : missing) count += static_cast<int>(mask.count());
  return count;
}

RawPanel load_panel_csv(const std::string& path, CsvSchema schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return schema == CsvSchema::long_format ? load_long(in) : load_wide(in);
}

RawPanel aggregate_tail(const RawPanel& panel, const std::string& cutoff_label) {
  const auto it = std::find(panel.grid_labels.begin(), panel.grid_labels.end(), cutoff_label);
  if (it == panel.grid_labels.end()) {
    throw DataError("aggregate_tail: cutoff label '" + cutoff_label + "' not in grid");
  }
  const int cut = static_cast<int>(it - panel.grid_labels.begin());
  const int m = panel.m();
  if (cut == m - 1) return panel;  // nothing to pool

  RawPanel out;
  out.series_ids = panel.series_ids;
  out.time_labels = panel.time_labels;
  out.grid_labels.assign(panel.grid_labels.begin(), panel.grid_labels.begin() + cut + 1);
  out.grid_values = panel.grid_values.head(cut + 1);

  const int p = panel.p(), T = panel.T();
  out.values.assign(static_cast<std::size_t>(p), Eigen::MatrixXd::Zero(T, cut + 1));
  out.missing.assign(static_cast<std::size_t>(p),
                     Eigen::Matrix<bool, -1, -1>::Constant(T, cut + 1, true));
  if (panel.weights) {
    out.weights =
        std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(p), Eigen::MatrixXd::Ones(T, cut + 1));
  }

  for (int i = 0; i < p; ++i) {
    const auto si = static_cast<std::size_t>(i);
    out.values[si].leftCols(cut) = panel.values[si].leftCols(cut);
    out.missing[si].leftCols(cut) = panel.missing[si].leftCols(cut);
    if (panel.weights) (*out.weights)[si].leftCols(cut) = (*panel.weights)[si].leftCols(cut);
    for (int t = 0; t < T; ++t) {
      double weight_sum = 0.0, weighted = 0.0;
      int present = 0;
      for (int g = cut; g < m; ++g) {
        if (panel.missing[si](t, g)) continue;
        const double w = panel.weights ? (*panel.weights)[si](t, g) : 1.0;
        weighted += w * panel.values[si](t, g);
        weight_sum += w;
        ++present;
      }
      if (present > 0 && weight_sum > 0) {
        out.values[si](t, cut) = weighted / weight_sum;
        out.missing[si](t, cut) = false;
        if (out.weights) (*out.weights)[si](t, cut) = weight_sum;
      }
    }
  }
  return out;
}

std::pair<FunctionalPanel, SmoothingInfo> log_smooth(const RawPanel& panel,
                                                     const BasisContextPtr& ctx) {
  if (!ctx) throw ConfigError("log_smooth: null basis context");
  if (ctx->m() != panel.m()) {
    throw ConfigError("log_smooth: context grid size must match the panel grid");
  }
  const int p = panel.p(), T = panel.T(), m = panel.m();

  SmoothingInfo info;
  Eigen::MatrixXd samples(m, static_cast<Eigen::Index>(p) * T);
  for (int i = 0; i < p; ++i) {
    const auto si = static_cast<std::size_t>(i);
    for (int t = 0; t < T; ++t) {
      // Usable cells are present and strictly positive; everything else is
      // linearly interpolated along the grid axis.
      std::vector<int> good;
      good.reserve(static_cast<std::size_t>(m));
      for (int g = 0; g < m; ++g) {
        if (!panel.missing[si](t, g) && panel.values[si](t, g) > 0) good.push_back(g);
      }
      if (good.empty()) {
        throw DataError("series '" + panel.series_ids[si] + "' at time " +
                        panel.time_labels[static_cast<std::size_t>(t)] +
                        " has no usable values");
      }
      bool interpolated = false;
      for (int g = 0; g < m; ++g) {
        double v;
        if (!panel.missing[si](t, g) && panel.values[si](t, g) > 0) {
          v = panel.values[si](t, g);
        } else {
          interpolated = true;
          ++info.interpolated_cells;
          const auto right = std::lower_bound(good.begin(), good.end(), g);
          if (right == good.begin()) {
            v = panel.values[si](t, *right);
          } else if (right == good.end()) {
            v = panel.values[si](t, *(right - 1));
          } else {
            const int g0 = *(right - 1), g1 = *right;
            const double x0 = panel.grid_values[g0], x1 = panel.grid_values[g1];
            const double w1 = (panel.grid_values[g] - x0) / (x1 - x0);
            v = (1.0 - w1) * panel.values[si](t, g0) + w1 * panel.values[si](t, g1);
          }
        }
        samples(g, static_cast<Eigen::Index>(i) * T + t) = std::log(v);
      }
      if (interpolated) info.flagged.emplace_back(i, t);
    }
  }

  const Eigen::MatrixXd coeffs = project_columns(samples, *ctx);  // q x (p*T)
  FunctionalPanel out;
  out.context = ctx;
  out.slices.assign(static_cast<std::size_t>(ctx->q), Eigen::MatrixXd(p, T));
  for (int n = 0; n < ctx->q; ++n) {
    for (int i = 0; i < p; ++i) {
      for (int t = 0; t < T; ++t) {
        out.slices[static_cast<std::size_t>(n)](i, t) =
            coeffs(n, static_cast<Eigen::Index>(i) * T + t);
      }
    }
  }
  out.validate();
  return {std::move(out), std::move(info)};
}

BasisContextPtr data_basis_context(int q, const Eigen::VectorXd& grid_values) {
  const int m = static_cast<int>(grid_values.size());
  if (m < 2) throw DataError("data grid needs at least two points");
  const double lo = grid_values[0], hi = grid_values[m - 1];
  if (!(hi > lo)) throw DataError("data grid must be strictly increasing");
  Eigen::VectorXd mapped = (grid_values.array() - lo) / (hi - lo);
  return build_fourier_basis(q, mapped);
}

namespace {

constexpr char kPanelMagic[4] = {'S', 'P', 'F', 'P'};

}  // namespace

void save_panel(const FunctionalPanel& panel, const std::string& path) {
  panel.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");

  nlohmann::json header;
  header["schema_version"] = 1;
  header["p"] = panel.p();
  header["T"] = panel.T();
  header["q"] = panel.q();
  std::vector<double> grid(panel.context->grid.data(),
                           panel.context->grid.data() + panel.context->m());
  header["grid"] = grid;
  const std::string header_text = header.dump();
  const std::uint64_t header_len = header_text.size();

  out.write(kPanelMagic, sizeof(kPanelMagic));
  out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (const auto& slice : panel.slices) {
    out.write(reinterpret_cast<const char*>(slice.data()),
              static_cast<std::streamsize>(sizeof(double) * slice.size()));
  }
  if (!out) throw DataError("short write to '" + path + "'");
}

FunctionalPanel load_panel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");

  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kPanelMagic, sizeof(magic)) != 0) {
    throw DataError("'" + path + "' is not a panel container");
  }
  std::uint64_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  if (!in || header_len > (1ull << 30)) throw DataError("corrupt panel header");
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("corrupt panel header: ") + e.what());
  }

  const int p = header.at("p").get<int>();
  const int T = header.at("T").get<int>();
  const int q = header.at("q").get<int>();
  const auto grid_values = header.at("grid").get<std::vector<double>>();
  Eigen::VectorXd grid(static_cast<Eigen::Index>(grid_values.size()));
  for (std::size_t i = 0; i < grid_values.size(); ++i) {
    grid[static_cast<Eigen::Index>(i)] = grid_values[i];
  }

  FunctionalPanel panel;
  panel.context = build_fourier_basis(q, grid);
  panel.slices.assign(static_cast<std::size_t>(q), Eigen::MatrixXd(p, T));
  for (auto& slice : panel.slices) {
    in.read(reinterpret_cast<char*>(slice.data()),
            static_cast<std::streamsize>(sizeof(double) * slice.size()));
  }
  if (!in) throw DataError("truncated panel payload in '" + path + "'");
  panel.validate();
  return panel;
}

}  // namespace spfts
