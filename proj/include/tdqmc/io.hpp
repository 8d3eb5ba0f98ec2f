#pragma once

#include <string>
#include <vector>

#include "tdqmc/grid.hpp"
#include "tdqmc/quantum_info.hpp"

namespace tdqmc {

/// Map CSV: header `zone_x,zone_y,value,walker_count`, NaN for empty zones,
/// numbers with 17 significant digits.
void export_map(const EntropyMap& map, const std::string& path);
/// Profile CSV `x,value`; 2D fields are written as `x,y,value`.
void export_profile(const std::vector<double>& xs, const std::vector<double>& ys,
                    const std::string& path);
void export_field(const Field& field, const std::string& path);

struct MapRow {
  int zone_x = 0;
  int zone_y = 0;
  double value = 0.0;
  std::size_t walker_count = 0;
};

struct ProfileData {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::vector<MapRow> read_map(const std::string& path);
ProfileData read_profile(const std::string& path);

/// Generic CSV with a header row; cells are formatted with format_number.
void write_table(const std::string& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace tdqmc
