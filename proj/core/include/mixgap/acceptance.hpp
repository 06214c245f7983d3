#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace mixgap::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

// Runs the verification battery (criteria 1..12). `only` restricts to a
// subset; `live` receives one status line per criterion as it finishes.
std::vector<CriterionResult> run_suite(uint64_t seed, const std::set<int>& only = {},
                                       std::ostream* live = nullptr);

std::string format_result_line(const CriterionResult& r);

}  // namespace mixgap::acceptance
