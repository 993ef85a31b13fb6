#pragma once

// Oracle-equivalence suites runnable from the CLI.

#include <string>
#include <vector>

#include "veriphoton/i1dc.hpp"

namespace veriphoton {

struct SelftestOptions {
    /// The phi rule under test; replaced by a mutant to check sensitivity.
    PhiFunction phi = phi_from_outcomes;
};

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Runs suites in a fixed order, stopping after the first failure.
std::vector<SuiteResult> run_selftest(const SelftestOptions& options = {});

/// phi with every outcome-dependent sign inverted.
Angle4 phi_sign_flipped(std::span<const Angle4> angles, std::span<const std::uint8_t> outcomes);

}  // namespace veriphoton
