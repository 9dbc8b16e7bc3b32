#include "fierisk/panel.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fierisk/error.hpp"

namespace fierisk {
namespace {

constexpr std::string_view kModule = "panel";

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? pos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return cells;
}

bool is_label_header(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s == "date" || s == "time" || s == "timestamp" || s == "index" || s == "t";
}

[[noreturn]] void fail(std::string_view source, std::size_t row, std::size_t col, const std::string& what) {
  throw Error(ErrorKind::Load, kModule,
              std::string(source) + ": row " + std::to_string(row) + ", column " + std::to_string(col) +
                  ": " + what);
}

double parse_cell(const std::string& cell, std::string_view source, std::size_t row, std::size_t col) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty()) fail(source, row, col, "missing value");
  if (ec != std::errc() || ptr != last) fail(source, row, col, "non-numeric cell '" + cell + "'");
  if (!std::isfinite(v)) fail(source, row, col, "non-finite value");
  return v;
}

}  // namespace

std::optional<PanelFormat> parse_panel_format(std::string_view name) noexcept {
  if (name == "csv-prices") return PanelFormat::CsvPrices;
  if (name == "csv-returns") return PanelFormat::CsvReturns;
  return std::nullopt;
}

std::string_view to_string(PanelFormat format) noexcept {
  return format == PanelFormat::CsvPrices ? "csv-prices" : "csv-returns";
}

std::vector<double> ReturnPanel::column(std::size_t j) const {
  if (j >= static_cast<std::size_t>(returns.cols())) {
    throw Error(ErrorKind::InvalidArgument, kModule, "asset column out of range");
  }
  const auto c = returns.col(static_cast<Eigen::Index>(j));
  return {c.data(), c.data() + c.size()};
}

ReturnPanel ingest(std::istream& in, PanelFormat format, std::string_view source) {
  std::string line;
  std::size_t row = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    header = split(line);
    break;
  }
  if (header.empty()) throw Error(ErrorKind::Load, kModule, std::string(source) + ": empty file");

  const bool labelled = is_label_header(header.front());
  const std::size_t first = labelled ? 1 : 0;
  if (header.size() <= first) fail(source, row, 1, "header has no asset columns");
  ReturnPanel panel;
  panel.assets.assign(header.begin() + static_cast<std::ptrdiff_t>(first), header.end());
  for (std::size_t j = 0; j < panel.assets.size(); ++j) {
    if (panel.assets[j].empty()) fail(source, row, j + first + 1, "empty asset name");
  }
  const std::size_t m = panel.assets.size();

  std::vector<std::string> labels;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      fail(source, row, std::min(cells.size(), header.size()) + 1,
           "expected " + std::to_string(header.size()) + " cells, found " + std::to_string(cells.size()));
    }
    if (labelled) labels.push_back(cells.front());
    for (std::size_t j = first; j < cells.size(); ++j) {
      const double v = parse_cell(cells[j], source, row, j + 1);
      if (format == PanelFormat::CsvPrices && !(v > 0.0)) fail(source, row, j + 1, "non-positive price");
      values.push_back(v);
    }
  }
  const std::size_t rows = values.size() / m;
  panel.source_rows = rows;
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> data(
      values.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(m));

  if (format == PanelFormat::CsvReturns) {
    if (rows == 0) throw Error(ErrorKind::Load, kModule, std::string(source) + ": no data rows");
    panel.returns = data;
    panel.labels = std::move(labels);
  } else {
    if (rows < 2) throw Error(ErrorKind::Load, kModule, std::string(source) + ": need at least 2 price rows");
    panel.prices = Eigen::MatrixXd(data);
    panel.returns.resize(static_cast<Eigen::Index>(rows - 1), static_cast<Eigen::Index>(m));
    for (Eigen::Index t = 1; t < static_cast<Eigen::Index>(rows); ++t) {
      for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(m); ++j) {
        panel.returns(t - 1, j) = std::log(data(t, j)) - std::log(data(t - 1, j));
      }
    }
    if (labelled) panel.labels.assign(labels.begin() + 1, labels.end());
  }
  return panel;
}

ReturnPanel ingest(const std::string& path, PanelFormat format) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Load, kModule, "cannot open " + path);
  return ingest(in, format, path);
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error(ErrorKind::InvalidArgument, kModule, "cannot format number");
  return std::string(buf.data(), ptr);
}

void emit(std::ostream& out, const ReturnPanel& panel) {
  const bool labelled = !panel.labels.empty();
  if (labelled && panel.labels.size() != static_cast<std::size_t>(panel.returns.rows())) {
    throw Error(ErrorKind::InvalidArgument, kModule, "label count differs from the row count");
  }
  out << (labelled ? "index" : "");
  for (std::size_t j = 0; j < panel.assets.size(); ++j) {
    if (labelled || j > 0) out << ',';
    out << panel.assets[j];
  }
  out << '\n';
  for (Eigen::Index t = 0; t < panel.returns.rows(); ++t) {
    if (labelled) out << panel.labels[static_cast<std::size_t>(t)];
    for (Eigen::Index j = 0; j < panel.returns.cols(); ++j) {
      if (labelled || j > 0) out << ',';
      out << format_double(panel.returns(t, j));
    }
    out << '\n';
  }
}

void emit(const std::string& path, const ReturnPanel& panel) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Load, kModule, "cannot write " + path);
  emit(out, panel);
}

}  // namespace fierisk
