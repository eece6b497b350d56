#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pqs {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs the full acceptance suite, printing one PASS/FAIL line per
/// criterion to the log. Shared by the `verify-all` command and the ctest
/// acceptance binary.
std::vector<CriterionResult> run_acceptance(std::ostream& log);

}  // namespace pqs
