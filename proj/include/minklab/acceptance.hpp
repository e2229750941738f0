#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace minklab {

enum class AcceptanceSuite { Fast, Full };

struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs the acceptance criteria (the fast subset or everything) and prints
/// one pass/fail line per criterion. Returns the number of failures.
int run_acceptance(AcceptanceSuite suite, std::ostream& out,
                   std::vector<CriterionResult>* results = nullptr);

}  // namespace minklab
