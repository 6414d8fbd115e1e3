#pragma once

#include <json.hpp>

namespace netpot {

/// Global numeric tolerances. One record is threaded through every
/// computation and echoed into outputs.
struct Tolerances {
    double solve = 1e-10;    // relative residual of every Dirichlet solve
    double identity = 1e-9;  // absolute slack for identity checks
    double lp_gap = 1e-8;    // relative primal-dual gap of the minimax LP
};

nlohmann::json to_json(const Tolerances& tol);

} // namespace netpot
