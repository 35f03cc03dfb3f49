#include "robustreg/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "robustreg/errors.hpp"

namespace robustreg {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line, char sep) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

std::string unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

double parse_cell(std::string_view cell, std::size_t line_no, std::size_t col) {
  double v = 0.0;
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw DataError("line " + std::to_string(line_no) + ", column " + std::to_string(col + 1) +
                    ": '" + std::string(cell) + "' is not a finite number");
  }
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

CsvTable read_csv_table(const std::filesystem::path& path, bool allow_no_rows) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");

  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  char sep = ',';
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (table.header.empty()) {
      if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
        line.erase(0, 3);
      // Some public datasets (the UCI wine files) use ';' instead of ','.
      if (line.find(',') == std::string::npos && line.find(';') != std::string::npos) sep = ';';
      for (auto cell : split_cells(line, sep)) table.header.push_back(unquote(cell));
      continue;
    }
    auto cells = split_cells(line, sep);
    if (cells.size() != table.header.size()) {
      throw DataError("line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(table.header.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) row[c] = parse_cell(cells[c], line_no, c);
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw DataError("'" + path.string() + "' is empty");
  if (table.rows.empty() && !allow_no_rows) throw DataError("'" + path.string() + "' has no data rows");
  return table;
}

ScaledTable load_csv(const std::filesystem::path& path, const std::string& target_column) {
  CsvTable table = read_csv_table(path);
  const auto it = std::find(table.header.begin(), table.header.end(), target_column);
  if (it == table.header.end())
    throw DataError("column '" + target_column + "' not found in '" + path.string() + "'");
  const auto target_col = static_cast<std::size_t>(it - table.header.begin());
  const std::size_t n_cols = table.header.size();
  if (n_cols < 2) throw DataError("need at least one feature column besides the target");

  std::vector<ColumnScale> scales(n_cols);
  for (std::size_t c = 0; c < n_cols; ++c) {
    scales[c].name = table.header[c];
    scales[c].min = scales[c].max = table.rows.front()[c];
    for (const auto& row : table.rows) {
      scales[c].min = std::min(scales[c].min, row[c]);
      scales[c].max = std::max(scales[c].max, row[c]);
    }
  }

  const std::size_t dim = n_cols - 1;
  const std::size_t n = table.rows.size();
  std::vector<double> coords;
  coords.reserve(n * dim);
  std::vector<double> labels;
  labels.reserve(n);
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (c == target_col) continue;
      // Clamp guards the last-ulp overshoot of (x - min) / (max - min).
      coords.push_back(std::clamp(scales[c].scale(row[c]), 0.0, 1.0));
    }
    labels.push_back(std::clamp(scales[target_col].scale(row[target_col]), 0.0, 1.0));
  }

  ScaledTable out{Dataset(PointSet(dim, std::move(coords)), std::move(labels)), {},
                  scales[target_col]};
  for (std::size_t c = 0; c < n_cols; ++c)
    if (c != target_col) out.features.push_back(scales[c]);
  return out;
}

void write_scaling_sidecar(const std::filesystem::path& path, const ScaledTable& table) {
  auto out = open_out(path);
  out << "column,role,min,max\n";
  for (const auto& f : table.features)
    out << f.name << ",feature," << format_double(f.min) << ',' << format_double(f.max) << '\n';
  out << table.target.name << ",target," << format_double(table.target.min) << ','
      << format_double(table.target.max) << '\n';
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
  auto out = open_out(path);
  for (std::size_t k = 0; k < data.dim(); ++k) out << 'x' << (k + 1) << ',';
  out << "y\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double c : data.point(i)) out << format_double(c) << ',';
    out << format_double(data.label(i)) << '\n';
  }
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  CsvTable table = read_csv_table(path);
  if (table.header.size() < 2 || table.header.back() != "y")
    throw DataError("'" + path.string() + "' is not a dataset file (expected x1..xd,y)");
  const std::size_t dim = table.header.size() - 1;
  std::vector<double> coords;
  std::vector<double> labels;
  coords.reserve(table.rows.size() * dim);
  for (const auto& row : table.rows) {
    coords.insert(coords.end(), row.begin(), row.end() - 1);
    labels.push_back(row.back());
  }
  return Dataset(PointSet(dim, std::move(coords)), std::move(labels));
}

void write_indices_csv(const std::filesystem::path& path, std::span<const std::size_t> indices) {
  auto out = open_out(path);
  out << "index\n";
  for (auto i : indices) out << i << '\n';
}

std::vector<std::size_t> read_indices_csv(const std::filesystem::path& path) {
  CsvTable table = read_csv_table(path, true);
  std::vector<std::size_t> out;
  for (const auto& row : table.rows) {
    if (row[0] < 0 || row[0] != std::floor(row[0])) throw DataError("index must be a natural number");
    out.push_back(static_cast<std::size_t>(row[0]));
  }
  return out;
}

}  // namespace robustreg
