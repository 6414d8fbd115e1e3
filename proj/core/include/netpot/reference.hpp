#pragma once

#include <memory>
#include <vector>

#include "netpot/ball.hpp"
#include "netpot/potential.hpp"

namespace netpot {

/// Potential kernel a(x,y) of simple random walk on Z^2: a(0,0) = 0,
/// a(1,0) = 1, a(1,1) = 4/π, harmonic off the origin. Tabulated for
/// max(|x|,|y|) <= extent by the diagonal recurrence in 100-digit arithmetic.
class PotentialKernelZ2 {
public:
    explicit PotentialKernelZ2(int extent);

    int extent() const noexcept { return extent_; }
    /// Throws InvalidArgument outside the table.
    double operator()(long x, long y) const;

private:
    int extent_;
    std::vector<double> table_;  // a(x,y) for 0 <= y <= x <= extent
};

/// a/4 on a grid2d ball: nonnegative, zero at the root, Δ = 1 at the root
/// and harmonic elsewhere. Labels must have the form "(x,y)".
PotentialOnBall grid_reference_potential(std::shared_ptr<const Ball> ball, Tolerances tol = {});

/// x^+ on a line ball with unit conductances; labels are integers.
PotentialOnBall line_positive_part(std::shared_ptr<const Ball> ball, Tolerances tol = {});

/// Closed-form Green density on the line ball with unit conductances,
/// killed at 0 and ±R: min(x,y)(R - max(x,y))/R on the positive side.
double line_green(long x, long y, long radius);

} // namespace netpot
