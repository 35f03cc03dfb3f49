#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "robustreg/dataset.hpp"

namespace robustreg {

/// Min-max parameters of one column: scaled = (raw - min) / (max - min),
/// or 0 when the column is constant.
struct ColumnScale {
  std::string name;
  double min = 0.0;
  double max = 0.0;

  double scale(double raw) const noexcept {
    return max > min ? (raw - min) / (max - min) : 0.0;
  }
  double unscale(double scaled) const noexcept { return min + scaled * (max - min); }
};

struct ScaledTable {
  Dataset data;
  std::vector<ColumnScale> features;  // in dataset coordinate order
  ColumnScale target;
};

/// Raw delimited table: header row plus numeric cells. The delimiter is ","
/// unless the header contains ";" and no ",".
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv_table(const std::filesystem::path& path, bool allow_no_rows = false);

/// Loads a numeric CSV and rescales every feature column and the target
/// column to [0,1] by min-max over the file.
ScaledTable load_csv(const std::filesystem::path& path, const std::string& target_column);

/// Writes "column,min,max" rows for inverse transforms.
void write_scaling_sidecar(const std::filesystem::path& path, const ScaledTable& table);

/// Dataset as CSV with columns x1..xd,y. Values written with round-trip precision.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);
/// Reads the format of `write_dataset_csv` (no rescaling; points must lie in the cube).
Dataset read_dataset_csv(const std::filesystem::path& path);

/// One-column CSV ("index") of attacked sample indices.
void write_indices_csv(const std::filesystem::path& path, std::span<const std::size_t> indices);
std::vector<std::size_t> read_indices_csv(const std::filesystem::path& path);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

}  // namespace robustreg
