#include "netpot/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "netpot/errors.hpp"
#include "netpot/simplex.hpp"

namespace netpot {

Measure BoundaryMeasure::as_measure() const {
    Measure m;
    m.reserve(support.size());
    for (std::size_t k = 0; k < support.size(); ++k)
        m.emplace_back(support[k], weights[k]);
    return m;
}

double BoundaryMeasure::total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

namespace {

// c_o P_o(τ_sphere < τ_o^+), from the solve with boundary data 1 on the sphere.
double escape_flux(const GreenOperator& op) {
    const Ball& ball = op.ball();
    std::vector<double> source(ball.size(), 0.0), boundary(ball.size(), 0.0);
    for (std::size_t i = ball.interior_size(); i < ball.size(); ++i)
        boundary[i] = 1.0;
    const auto sol = op.system().solve(source, boundary);
    double flux = 0.0;
    for (const auto& a : ball.arcs(Ball::root_index()))
        flux += a.conductance * sol.values[a.target];
    return flux;
}

AlphaWeights alpha_from(const GreenOperator& op, const HarmonicMeasure& hm,
                        const std::unordered_map<std::size_t, Eigen::Index>& row_of) {
    const Ball& ball = op.ball();
    AlphaWeights aw;
    for (std::size_t j = 0; j < hm.columns.size(); ++j) {
        double a = 0.0;
        for (const auto& arc : ball.arcs(Ball::root_index()))
            a += arc.conductance * hm.values(row_of.at(arc.target), static_cast<Eigen::Index>(j));
        if (a > 0.0) {
            aw.columns.push_back(hm.columns[j]);
            aw.alpha.push_back(a);
            aw.total += a;
        } else {
            aw.dropped.push_back(hm.columns[j]);
        }
    }
    aw.escape_flux = escape_flux(op);
    aw.residual = std::abs(aw.total - aw.escape_flux);
    if (aw.residual > op.tolerances().identity)
        throw Error(Errc::IdentityViolation,
                    "sum of alpha weights differs from the escape flux by " +
                        std::to_string(aw.residual));
    return aw;
}

void require_absorbing(const GreenOperator& op) {
    if (op.boundary() != SphereBoundary::Absorbing)
        throw Error(Errc::InvalidArgument, "minimax needs an absorbing-sphere operator");
    if (op.ball().exhausted())
        throw Error(Errc::ExhaustedBall, "ball has an empty sphere");
}

} // namespace

AlphaWeights alpha_weights(const GreenOperator& op) {
    require_absorbing(op);
    std::vector<std::size_t> rows;
    for (const auto& a : op.ball().arcs(Ball::root_index()))
        rows.push_back(a.target);
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    const auto hm = harmonic_measure(op.system(), rows);
    std::unordered_map<std::size_t, Eigen::Index> row_of;
    for (std::size_t k = 0; k < rows.size(); ++k)
        row_of[rows[k]] = static_cast<Eigen::Index>(k);
    return alpha_from(op, hm, row_of);
}

std::vector<MinimaxProblem> make_minimax_problems(const GreenOperator& op,
                                                  const std::vector<int>& inner_radii) {
    require_absorbing(op);
    const Ball& ball = op.ball();
    std::vector<std::vector<std::size_t>> spheres;
    std::vector<std::size_t> rows;
    for (int r : inner_radii) {
        if (r < 1 || r >= ball.radius())
            throw Error(Errc::InvalidArgument, "inner radius " + std::to_string(r) +
                                                   " must lie in [1, R)");
        spheres.push_back(ball.layer(r));
        if (spheres.back().empty())
            throw Error(Errc::Infeasible, "sphere(" + std::to_string(r) + ") is empty");
        rows.insert(rows.end(), spheres.back().begin(), spheres.back().end());
    }
    for (const auto& a : ball.arcs(Ball::root_index()))
        rows.push_back(a.target);
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());

    const auto hm = harmonic_measure(op.system(), rows);
    std::unordered_map<std::size_t, Eigen::Index> row_of;
    for (std::size_t k = 0; k < rows.size(); ++k)
        row_of[rows[k]] = static_cast<Eigen::Index>(k);
    const AlphaWeights alpha = alpha_from(op, hm, row_of);

    std::unordered_map<std::size_t, Eigen::Index> col_of;
    for (std::size_t j = 0; j < hm.columns.size(); ++j)
        col_of[hm.columns[j]] = static_cast<Eigen::Index>(j);

    std::vector<MinimaxProblem> out;
    for (std::size_t p = 0; p < inner_radii.size(); ++p) {
        MinimaxProblem prob;
        prob.outer_radius = ball.radius();
        prob.inner_radius = inner_radii[p];
        prob.inner_sphere = spheres[p];
        prob.alpha = alpha;
        prob.kernel.resize(static_cast<Eigen::Index>(spheres[p].size()),
                           static_cast<Eigen::Index>(alpha.columns.size()));
        for (std::size_t i = 0; i < spheres[p].size(); ++i)
            for (std::size_t j = 0; j < alpha.columns.size(); ++j)
                prob.kernel(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    hm.values(row_of.at(spheres[p][i]), col_of.at(alpha.columns[j]));
        out.push_back(std::move(prob));
    }
    return out;
}

MinimaxProblem make_minimax_problem(const GreenOperator& op, int inner_radius) {
    return std::move(make_minimax_problems(op, {inner_radius}).front());
}

MinimaxResult solve_minimax(const GreenOperator& op, const MinimaxProblem& problem) {
    const Ball& ball = op.ball();
    const auto rows = static_cast<Eigen::Index>(problem.inner_sphere.size());
    const auto cols = static_cast<Eigen::Index>(problem.alpha.columns.size());
    if (rows == 0)
        throw Error(Errc::Infeasible, "inner sphere is empty");
    if (cols == 0)
        throw Error(Errc::Infeasible, "no sphere vertex is reachable from the root");

    // Columns scaled by 1/α_w: with b'_w = α_w b_w the normalization is Σ b' = 1.
    Eigen::MatrixXd scaled = problem.kernel;
    for (Eigen::Index j = 0; j < cols; ++j)
        scaled.col(j) /= problem.alpha.alpha[static_cast<std::size_t>(j)];

    MinimaxResult res;
    Eigen::VectorXd bprime = Eigen::VectorXd::Constant(cols, 1.0 / static_cast<double>(cols));
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(rows);
    Eigen::Index dead = -1;
    for (Eigen::Index i = 0; i < rows && dead < 0; ++i)
        if (!(scaled.row(i).maxCoeff() > 0.0))
            dead = i;
    if (dead >= 0) {
        // v cannot reach the sphere without the root: every ψ vanishes there.
        eta(dead) = 1.0;
    } else {
        // Positive game: with x = b'/V, min Σx s.t. K'x >= 1. Solved through
        // its dual max Σy s.t. K'^T y <= 1, whose origin is nondegenerate.
        LinearProgram lp;
        lp.A = scaled.transpose();
        lp.b = Eigen::VectorXd::Ones(cols);
        lp.c = Eigen::VectorXd::Ones(rows);
        const SimplexResult sx = solve_lp(lp);
        res.iterations = sx.iterations;
        res.degenerate = sx.degenerate;
        res.multiple_optima = sx.multiple_optima;
        if (!(sx.y.sum() > 0.0) || !(sx.x.sum() > 0.0))
            throw Error(Errc::Infeasible, "degenerate game solution");
        bprime = sx.y / sx.y.sum();
        eta = sx.x / sx.x.sum();
    }

    res.sphere_data.resize(static_cast<std::size_t>(cols));
    std::vector<double> source(ball.size(), 0.0), boundary(ball.size(), 0.0);
    for (Eigen::Index j = 0; j < cols; ++j) {
        const double b = bprime(j) / problem.alpha.alpha[static_cast<std::size_t>(j)];
        res.sphere_data[static_cast<std::size_t>(j)] = b;
        boundary[problem.alpha.columns[static_cast<std::size_t>(j)]] = b;
    }
    auto values = op.system().solve(source, boundary).values;
    res.psi = std::make_shared<const PotentialOnBall>(op.ball_ptr(), std::move(values), 1.0,
                                                      op.tolerances());

    res.eta.support = problem.inner_sphere;
    res.eta.weights.assign(eta.data(), eta.data() + eta.size());

    res.primal = std::numeric_limits<double>::infinity();
    for (std::size_t v : problem.inner_sphere)
        res.primal = std::min(res.primal, res.psi->value(v));
    const Eigen::RowVectorXd response = eta.transpose() * scaled;
    res.dual = response.maxCoeff();
    res.value = res.primal;
    res.gap = std::abs(res.dual - res.primal);
    res.certified = res.gap <= op.tolerances().lp_gap * std::max(1.0, std::abs(res.value));
    return res;
}

MinimaxResult solve_minimax(const GreenOperator& op, int inner_radius) {
    return solve_minimax(op, make_minimax_problem(op, inner_radius));
}

double pairing(const PotentialOnBall& psi, const BoundaryMeasure& eta) {
    double s = 0.0;
    for (std::size_t k = 0; k < eta.support.size(); ++k)
        s += eta.weights[k] * psi.value(eta.support[k]);
    return s;
}

MCurve m_curve(const NetworkSource& source, const std::vector<int>& radii, double ratio,
               Tolerances tol) {
    if (!(ratio > 1.0))
        throw Error(Errc::InvalidArgument, "ratio must exceed 1");
    MCurve curve;
    for (int r : radii) {
        const int R = static_cast<int>(std::ceil(ratio * r - 1e-12));
        GreenOperator op(make_ball(source, std::max(R, r + 1)), SphereBoundary::Absorbing, tol);
        const auto res = solve_minimax(op, r);
        if (!curve.rows.empty() &&
            res.value < curve.rows.back().value - 1e-10 * std::max(1.0, curve.rows.back().value))
            curve.monotone = false;
        curve.rows.push_back({r, op.ball().radius(), res.value, res.gap, res.iterations});
    }
    return curve;
}

} // namespace netpot
