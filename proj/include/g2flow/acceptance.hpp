#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace g2flow {

struct AcceptanceOptions {
  bool quick = false;        // algebraic identities and eigen checks only
  std::uint64_t seed = 1234;  // random states for the chamber persistence check
  std::vector<int> only;     // empty = all
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string measured;
  double seconds = 0;
  bool skipped = false;
};

// Criteria 1-12. Progress lines go to log when non-null.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, std::ostream* log = nullptr);

std::string format_result_line(const CriterionResult& r);

}  // namespace g2flow
