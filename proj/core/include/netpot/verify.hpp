#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "netpot/config.hpp"
#include "netpot/network.hpp"

namespace netpot {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    double runtime_s = 0.0;
    std::string detail;
};

struct ConformanceReport {
    std::string network_hash;
    std::vector<CheckResult> checks;
    std::vector<std::string> warnings;
    bool passed = false;

    nlohmann::json to_json() const;
    std::string table() const;
};

struct VerifyConfig {
    Tolerances tol;
    int radius = 8;                     // ball for the identity checks
    std::vector<int> minimax_radii{2, 4, 8};  // r, with R = 2r and 4r
    std::size_t max_ball = 100000;      // larger balls are skipped with a warning
    std::uint64_t seed = 42;
};

/// Runs the nine check groups: green_symmetry, dipole_laplacian, h_green_pairs,
/// h_green_initial, telescoping, path_reversal, duality_gap, monotonicity,
/// reversal_inequality. A failing check never stops the suite.
ConformanceReport verify_suite(const NetworkSource& source, const VerifyConfig& config = {});

} // namespace netpot
