#pragma once
#include <iosfwd>
#include <string>
#include <vector>

namespace heatlab::accept {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

// Runs the full verification battery; one result per criterion. Progress lines
// go to `progress` when non-null.
std::vector<CriterionResult> run_all(std::ostream* progress);

// Prints "PASS/FAIL  #k name: detail" lines; returns the number of failures.
int report(const std::vector<CriterionResult>& results, std::ostream& out);

} // namespace heatlab::accept
