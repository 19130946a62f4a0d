#pragma once

#include <string>
#include <vector>

namespace vb {

struct PropertyResult {
  std::string name;
  std::string tag;       // coarse grouping used by --filter
  double residual = 0.0; // measured worst case
  double tolerance = 0.0;
  bool passed = false;
};

struct VerifyReport {
  std::vector<PropertyResult> results;
  bool all_passed() const;
};

/// Runs every numerical identity check whose tag contains `filter`
/// (empty filter = all). Tolerances are scaled by `tol_scale`.
VerifyReport verify_suite(const std::string& filter = "", double tol_scale = 1.0);

}  // namespace vb
