#pragma once

#include <string>
#include <vector>

namespace reluforge {

struct CriterionResult {
    int id = 0;
    bool pass = false;
    std::string name;
    std::string detail;
};

// The nine go/no-go checks; each returns pass/fail plus a measured summary.
std::vector<CriterionResult> run_acceptance();

} // namespace reluforge
