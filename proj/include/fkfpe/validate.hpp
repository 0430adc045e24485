#pragma once

#include <string>
#include <vector>

namespace fkfpe {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;      // measured quantity
    double threshold = 0.0;  // the bound it was held against
};

/// Named validation suites behind `fkfpe validate <suite>`: compact versions
/// of the per-module correctness checks. Suites: kernel, cost, jko, scheme,
/// oracle.
std::vector<CheckResult> run_validation_suite(const std::string& suite);

bool known_suite(const std::string& suite);

}  // namespace fkfpe
