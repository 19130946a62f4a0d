#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vb/grid.hpp"

namespace vb::io {

/// 17 significant digits: doubles round-trip bit-faithfully through text.
std::string format_double(double x);

/// One row per node: x,value. A JSON sidecar with {n, L} accompanies the
/// snapshot (written next to the CSV as <path>.json).
void write_field_csv(const std::filesystem::path& path, const Field& f);
Field read_field_csv(const std::filesystem::path& path);

void write_series_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows);

}  // namespace vb::io
