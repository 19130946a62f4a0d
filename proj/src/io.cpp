#include "vb/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace vb::io {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_field_csv(const std::filesystem::path& path, const Field& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "x,value\n";
  for (int j = 0; j < f.size(); ++j)
    out << format_double(f.grid().node(j)) << ',' << format_double(f[j]) << '\n';
  nlohmann::json hdr = {{"n", f.grid().n}, {"L", f.grid().length}};
  std::ofstream hout(path.string() + ".json");
  hout << hdr.dump(2) << '\n';
}

Field read_field_csv(const std::filesystem::path& path) {
  std::ifstream hin(path.string() + ".json");
  if (!hin) throw std::runtime_error("missing header for " + path.string());
  nlohmann::json hdr = nlohmann::json::parse(hin);
  PeriodicGrid grid(hdr.at("n").get<int>(), hdr.at("L").get<double>());

  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);  // header row
  std::vector<double> values;
  values.reserve(grid.n);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("bad CSV row: " + line);
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  return Field(grid, std::move(values));
}

void write_series_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  for (size_t i = 0; i < columns.size(); ++i)
    out << columns[i] << (i + 1 < columns.size() ? ',' : '\n');
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw std::runtime_error("series row width mismatch");
    for (size_t i = 0; i < row.size(); ++i)
      out << format_double(row[i]) << (i + 1 < row.size() ? ',' : '\n');
  }
}

}  // namespace vb::io
