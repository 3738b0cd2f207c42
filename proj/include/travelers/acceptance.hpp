#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace travelers::acceptance {

/// Outcome of one end-to-end check from the verification checklist.
struct CriterionResult {
    std::string name;
    bool passed = false;
    std::string detail;   // the numbers behind the verdict
    double seconds = 0.0;
};

/// Runs the whole checklist in order, streaming one
/// "PASS|FAIL <name>: <detail> [<seconds>]" line per criterion to
/// `progress` when non-null. Fixed internal seeds make the suite
/// deterministic; the heavier Monte Carlo checks take tens of seconds.
std::vector<CriterionResult> run_all(std::ostream* progress = nullptr);

/// True iff every criterion passed.
bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace travelers::acceptance
