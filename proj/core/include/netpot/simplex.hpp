#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace netpot {

/// maximize c·x subject to A x <= b, x >= 0, with b >= 0 (the origin is
/// feasible, so no phase one is needed).
struct LinearProgram {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::VectorXd c;
};

struct SimplexOptions {
    double pivot_tol = 1e-11;
    double cost_tol = 1e-9;
    std::size_t max_iterations = 0;  // 0: 50 * (rows + columns)
};

struct SimplexResult {
    Eigen::VectorXd x;     // primal optimum
    Eigen::VectorXd y;     // dual optimum (one multiplier per row, y >= 0)
    double primal = 0.0;   // c·x
    double dual = 0.0;     // b·y
    std::size_t iterations = 0;
    std::vector<std::size_t> basis;  // basic column indices (slack j -> n + j)
    bool degenerate = false;         // some basic variable sits at zero
    bool multiple_optima = false;    // a nonbasic column has zero reduced cost
};

/// Dense-tableau simplex: Dantzig's rule, switching to Bland's rule after a
/// run of degenerate pivots so cycling cannot persist. Deterministic. The
/// final basis is re-solved from the original data with an LU factorization
/// to strip accumulated tableau round-off. Throws Unbounded.
SimplexResult solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

} // namespace netpot
