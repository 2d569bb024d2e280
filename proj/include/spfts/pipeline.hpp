#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spfts/basis.hpp"

namespace spfts {

enum class CsvSchema { long_format, wide_format };

// Discretized panel as ingested: p series, T time labels, m grid labels, with a
// missing mask (true = missing) and optional exposure weights.
struct RawPanel {
  std::vector<std::string> series_ids;
  std::vector<std::string> time_labels;
  std::vector<std::string> grid_labels;
  Eigen::VectorXd grid_values;  // numeric parse of grid_labels, strictly increasing
  std::vector<Eigen::MatrixXd> values;              // per series: T x m
  std::vector<Eigen::Matrix<bool, -1, -1>> missing; // per series: T x m
  std::optional<std::vector<Eigen::MatrixXd>> weights;

  int p() const { return static_cast<int>(series_ids.size()); }
  int T() const { return static_cast<int>(time_labels.size()); }
  int m() const { return static_cast<int>(grid_labels.size()); }
  int missing_count() const;
};

// Long schema columns: series,time,grid,value[,weight]. Wide schema: header
// series,time,<grid label>...; one row per (series, time); empty cells are
// missing. Header row mandatory, UTF-8.
RawPanel load_panel_csv(const std::string& path, CsvSchema schema);

// Pools all grid points at or above the cutoff label into one terminal point:
// exposure-weighted mean when weights are available, arithmetic mean otherwise.
RawPanel aggregate_tail(const RawPanel& panel, const std::string& cutoff_label);

struct SmoothingInfo {
  int interpolated_cells = 0;
  std::vector<std::pair<int, int>> flagged;  // (series, time) with interpolation
};

// log-transform then weighted least-squares projection onto the basis. Missing
// or nonpositive cells are linearly interpolated along the grid axis first;
// curves with no usable value are rejected.
std::pair<FunctionalPanel, SmoothingInfo> log_smooth(const RawPanel& panel,
                                                     const BasisContextPtr& ctx);

// Fourier context on the panel's grid mapped affinely to [0, 1].
BasisContextPtr data_basis_context(int q, const Eigen::VectorXd& grid_values);

// Panel container: "SPFP" magic, a little-endian uint64 header length, a JSON
// header (schema_version, p, T, q, basis grid), then the coefficient slices as
// raw little-endian doubles in slice-major, column-major order. Round-trips
// bit-exactly; the basis context is rebuilt from the embedded grid.
void save_panel(const FunctionalPanel& panel, const std::string& path);
FunctionalPanel load_panel(const std::string& path);

}  // namespace spfts
