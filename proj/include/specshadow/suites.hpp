#pragma once

#include <string>
#include <vector>

#include "specshadow/config.hpp"

namespace specshadow {

struct SuiteResult {
    std::string name;
    bool pass = false;
    int checks = 0;
    std::vector<std::string> failures;
};

/// Names of the built-in invariant suites, in canonical run order.
std::vector<std::string> suite_names();

/// Runs one deterministic invariant suite (seeded by cfg.seed). Throws
/// SchemaError for unknown names.
SuiteResult run_suite(const std::string& name, const Config& cfg = {});

}  // namespace specshadow
