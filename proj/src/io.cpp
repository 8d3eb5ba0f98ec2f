#include "tdqmc/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "tdqmc/config.hpp"
#include "tdqmc/errors.hpp"

namespace tdqmc {

namespace {

std::ofstream open_out(const std::string& path) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path + "'");
  return f;
}

void finish(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

double parse_cell(const std::string& text, const std::string& path, std::size_t line) {
  if (text == "NaN" || text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size())
    throw IoError(path + ":" + std::to_string(line) + ": cannot parse '" + text + "'");
  return v;
}

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string c;
  while (std::getline(ss, c, ',')) out.push_back(c);
  return out;
}

}  // namespace

void write_table(const std::string& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) {
  std::ofstream f = open_out(path);
  for (std::size_t c = 0; c < header.size(); ++c) f << (c ? "," : "") << header[c];
  f << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) f << (c ? "," : "") << format_number(row[c]);
    f << '\n';
  }
  finish(f, path);
}

void export_map(const EntropyMap& map, const std::string& path) {
  std::ofstream f = open_out(path);
  f << "zone_x,zone_y,value,walker_count\n";
  for (std::size_t z = 0; z < map.values.size(); ++z) {
    const auto [zx, zy] = map.partition.zone_xy(z);
    f << zx << ',' << zy << ',' << (map.empty(z) ? "NaN" : format_number(map.values[z])) << ','
      << map.walker_counts[z] << '\n';
  }
  finish(f, path);
}

void export_profile(const std::vector<double>& xs, const std::vector<double>& ys,
                    const std::string& path) {
  if (xs.size() != ys.size()) throw std::invalid_argument("profile columns differ in length");
  std::vector<std::vector<double>> rows;
  for (std::size_t n = 0; n < xs.size(); ++n) rows.push_back({xs[n], ys[n]});
  write_table(path, {"x", "value"}, rows);
}

void export_field(const Field& field, const std::string& path) {
  const Grid& g = field.grid();
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < g.size(); ++r) {
    const Position p = g.node_position(r);
    if (g.dim() == 1)
      rows.push_back({p[0], field[r]});
    else
      rows.push_back({p[0], p[1], field[r]});
  }
  if (g.dim() == 1)
    write_table(path, {"x", "value"}, rows);
  else
    write_table(path, {"x", "y", "value"}, rows);
}

std::vector<MapRow> read_map(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read '" + path + "'");
  std::string line;
  std::getline(f, line);
  if (line != "zone_x,zone_y,value,walker_count")
    throw IoError(path + ": not a zone map (header '" + line + "')");
  std::vector<MapRow> out;
  std::size_t n = 1;
  while (std::getline(f, line)) {
    ++n;
    if (line.empty()) continue;
    const auto c = cells(line);
    if (c.size() != 4) throw IoError(path + ":" + std::to_string(n) + ": expected 4 columns");
    out.push_back({static_cast<int>(parse_cell(c[0], path, n)), static_cast<int>(parse_cell(c[1], path, n)),
                   parse_cell(c[2], path, n), static_cast<std::size_t>(parse_cell(c[3], path, n))});
  }
  return out;
}

ProfileData read_profile(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read '" + path + "'");
  std::string line;
  ProfileData out;
  if (!std::getline(f, line)) throw IoError(path + ": empty file");
  out.columns = cells(line);
  std::size_t n = 1;
  while (std::getline(f, line)) {
    ++n;
    if (line.empty()) continue;
    const auto c = cells(line);
    if (c.size() != out.columns.size())
      throw IoError(path + ":" + std::to_string(n) + ": column count differs from header");
    std::vector<double> row;
    for (const auto& s : c) row.push_back(parse_cell(s, path, n));
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f = open_out(path);
  f << text;
  finish(f, path);
}

}  // namespace tdqmc
