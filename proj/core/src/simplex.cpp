#include "netpot/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "netpot/errors.hpp"

namespace netpot {

namespace {
constexpr std::size_t kBlandAfter = 50;
}

SimplexResult solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
    const Eigen::Index m = lp.A.rows();
    const Eigen::Index n = lp.A.cols();
    if (lp.b.size() != m || lp.c.size() != n)
        throw Error(Errc::InvalidArgument, "inconsistent LP dimensions");
    if ((lp.b.array() < 0.0).any())
        throw Error(Errc::InvalidArgument, "right-hand side must be nonnegative");

    const Eigen::Index cols = n + m;
    // Tableau rows 0..m-1 are constraints; column `cols` is the right-hand side.
    using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMatrix t = RowMatrix::Zero(m, cols + 1);
    t.leftCols(n) = lp.A;
    t.block(0, n, m, m).setIdentity();
    t.col(cols) = lp.b;
    // Reduced costs d_j = c_j - c_B B^-1 A_j; the basis starts at the slacks.
    Eigen::VectorXd d = Eigen::VectorXd::Zero(cols);
    d.head(n) = lp.c;
    std::vector<std::size_t> basis(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i)
        basis[static_cast<std::size_t>(i)] = static_cast<std::size_t>(n + i);

    const std::size_t cap =
        options.max_iterations ? options.max_iterations : 50 * static_cast<std::size_t>(m + cols);
    SimplexResult res;
    std::size_t stalled = 0;  // consecutive degenerate pivots
    for (;;) {
        const bool bland = stalled >= kBlandAfter;
        Eigen::Index enter = -1;
        for (Eigen::Index j = 0; j < cols; ++j)
            if (d(j) > options.cost_tol && (enter < 0 || (!bland && d(j) > d(enter)))) {
                enter = j;
                if (bland)
                    break;
            }
        if (enter < 0)
            break;

        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < m; ++i)
            if (t(i, enter) > options.pivot_tol)
                best = std::min(best, std::max(t(i, cols), 0.0) / t(i, enter));
        // Bland: among minimum-ratio rows, the smallest basic index leaves.
        Eigen::Index leave = -1;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (t(i, enter) <= options.pivot_tol)
                continue;
            const double ratio = std::max(t(i, cols), 0.0) / t(i, enter);
            if (ratio > best + 1e-14 * std::max(1.0, best))
                continue;
            if (leave < 0 ||
                basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])
                leave = i;
        }
        if (leave < 0)
            throw Error(Errc::Unbounded, "objective is unbounded along column " + std::to_string(enter));

        stalled = best <= 1e-12 ? stalled + 1 : 0;
        const double pivot = t(leave, enter);
        t.row(leave) /= pivot;
        for (Eigen::Index i = 0; i < m; ++i)
            if (i != leave) {
                const double f = t(i, enter);
                if (f != 0.0)
                    t.row(i) -= f * t.row(leave);
            }
        d -= d(enter) * t.row(leave).head(cols).transpose();
        basis[static_cast<std::size_t>(leave)] = static_cast<std::size_t>(enter);

        if (++res.iterations > cap)
            throw Error(Errc::InvalidArgument, "simplex iteration cap exceeded");
    }

    // Re-solve the optimal basis from the original data.
    auto column = [&](std::size_t j) -> Eigen::VectorXd {
        if (j < static_cast<std::size_t>(n))
            return lp.A.col(static_cast<Eigen::Index>(j));
        Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
        e(static_cast<Eigen::Index>(j) - n) = 1.0;
        return e;
    };
    Eigen::MatrixXd B(m, m);
    Eigen::VectorXd cb(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const std::size_t j = basis[static_cast<std::size_t>(i)];
        B.col(i) = column(j);
        cb(i) = j < static_cast<std::size_t>(n) ? lp.c(static_cast<Eigen::Index>(j)) : 0.0;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    const Eigen::VectorXd xb = lu.solve(lp.b);
    const Eigen::VectorXd y = lu.transpose().solve(cb);

    res.x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i) {
        const std::size_t j = basis[static_cast<std::size_t>(i)];
        if (j < static_cast<std::size_t>(n))
            res.x(static_cast<Eigen::Index>(j)) = std::max(xb(i), 0.0);
        if (std::abs(xb(i)) <= options.pivot_tol)
            res.degenerate = true;
    }
    res.y = y.cwiseMax(0.0);
    res.primal = lp.c.dot(res.x);
    res.dual = lp.b.dot(res.y);
    res.basis = basis;

    std::vector<char> in_basis(static_cast<std::size_t>(cols), 0);
    for (std::size_t j : basis)
        in_basis[j] = 1;
    for (Eigen::Index j = 0; j < cols; ++j)
        if (!in_basis[static_cast<std::size_t>(j)] && std::abs(d(j)) <= options.cost_tol)
            res.multiple_optima = true;
    return res;
}

} // namespace netpot
