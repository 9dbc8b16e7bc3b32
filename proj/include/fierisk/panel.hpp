#pragma once

// Delimited-text return panels.
//
// Layout: one header row, then one row per period. The header holds asset
// names; if its first cell is "date", "time", "timestamp", "index" or "t"
// (any case) the first column is a row label kept verbatim. Cells are
// separated by commas. Prices are converted to log-returns ln P_t - ln P_{t-1}.

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fierisk {

enum class PanelFormat { CsvPrices, CsvReturns };

std::optional<PanelFormat> parse_panel_format(std::string_view name) noexcept;
std::string_view to_string(PanelFormat format) noexcept;

struct ReturnPanel {
  std::vector<std::string> assets;
  std::vector<std::string> labels;  // row labels of the return rows; empty when the file has none
  Eigen::MatrixXd returns;          // n x m
  std::optional<Eigen::MatrixXd> prices;  // (n + 1) x m when ingested from prices
  std::size_t source_rows = 0;            // data rows read from the file

  std::vector<double> column(std::size_t j) const;
};

/// Throws Error(Load) naming the offending row and column (1-based, header = row 1).
ReturnPanel ingest(std::istream& in, PanelFormat format, std::string_view source = "<stream>");
ReturnPanel ingest(const std::string& path, PanelFormat format);

/// Writes the return panel in csv-returns layout with shortest round-trip numbers.
void emit(std::ostream& out, const ReturnPanel& panel);
void emit(const std::string& path, const ReturnPanel& panel);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace fierisk
