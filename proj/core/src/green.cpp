#include "netpot/green.hpp"

#include <cmath>
#include <limits>

#include "netpot/errors.hpp"

namespace netpot {

namespace {

std::vector<std::size_t> root_only() { return {Ball::root_index()}; }

} // namespace

GreenOperator::GreenOperator(std::shared_ptr<const Ball> ball, SphereBoundary boundary,
                             Tolerances tol)
    : system_(std::move(ball), root_only(), boundary, tol) {}

std::shared_ptr<const std::vector<double>> GreenOperator::column(std::size_t y) const {
    const Ball& b = ball();
    if (y >= b.size())
        throw Error(Errc::VertexOutsideBall, "target index out of range");
    if (system_.is_killed(y))
        throw Error(Errc::InvalidArgument,
                    "'" + b.label(y).label() + "' is killed; its Green column vanishes");
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(y); it != cache_.end())
            return it->second;
    }
    std::vector<double> source(b.size(), 0.0), boundary(b.size(), 0.0);
    source[y] = 1.0;
    auto col = std::make_shared<const std::vector<double>>(system_.solve(source, boundary).values);
    std::lock_guard lock(mutex_);
    return cache_.emplace(y, std::move(col)).first->second;
}

double GreenOperator::density(std::size_t x, std::size_t y) const {
    if (x >= ball().size() || y >= ball().size())
        throw Error(Errc::VertexOutsideBall, "vertex index out of range");
    if (system_.is_killed(y) || system_.is_killed(x))
        return 0.0;
    return (*column(y))[x];
}

double GreenOperator::density(const VertexId& x, const VertexId& y) const {
    return density(ball().index_of(x), ball().index_of(y));
}

const HarmonicMeasure& GreenOperator::harmonic_measure() const {
    std::lock_guard lock(mutex_);
    if (!harmonic_)
        harmonic_ = std::make_shared<const HarmonicMeasure>(netpot::harmonic_measure(system_));
    return *harmonic_;
}

std::size_t GreenOperator::cached_columns() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

std::vector<double> dipole_mixture(const GreenOperator& op, const Measure& eta) {
    if (op.boundary() != SphereBoundary::Reflecting) {
        GreenOperator reflecting(op.ball_ptr(), SphereBoundary::Reflecting, op.tolerances());
        return dipole_mixture(reflecting, eta);
    }
    const Ball& ball = op.ball();
    double total = 0.0;
    for (const auto& [v, w] : eta) {
        if (v >= ball.size())
            throw Error(Errc::VertexOutsideBall, "target index out of range");
        if (v == Ball::root_index())
            throw Error(Errc::TargetIsRoot, "dipole target coincides with the root");
        if (!ball.is_interior(v))
            throw Error(Errc::VertexOutsideBall,
                        "dipole target '" + ball.label(v).label() + "' is not interior");
        if (!(w >= 0.0))
            throw Error(Errc::MeasureNotNormalized, "negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > op.tolerances().identity)
        throw Error(Errc::MeasureNotNormalized, "weights sum to " + std::to_string(total));

    std::vector<double> f(ball.size(), 0.0);
    for (const auto& [v, w] : eta) {
        if (w == 0.0)
            continue;
        const auto col = op.column(v);
        for (std::size_t i = 0; i < f.size(); ++i)
            f[i] += w * (*col)[i];
    }
    return f;
}

ExhaustionReport exhaustion_limit(const NetworkSource& source, const VertexId& x,
                                  const VertexId& y, const std::vector<int>& radii, double tol,
                                  Tolerances tolerances) {
    if (radii.empty())
        throw Error(Errc::InvalidArgument, "empty radius schedule");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (radii[i] <= radii[i - 1])
            throw Error(Errc::InvalidArgument, "radius schedule must be strictly increasing");
    if (x == source.root() || y == source.root())
        throw Error(Errc::InvalidArgument, "x and y must differ from the root");

    ExhaustionReport report;
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < radii.size(); ++i) {
        auto ball = make_ball(source, radii[i]);
        const auto xi = ball->find(x), yi = ball->find(y);
        if (i + 1 == radii.size() && (!xi || !yi || !ball->is_interior(*xi) || !ball->is_interior(*yi)))
            throw Error(Errc::VertexOutsideBall, "largest ball does not contain x and y");
        double value = 0.0;
        if (xi && yi && ball->is_interior(*xi) && ball->is_interior(*yi)) {
            GreenOperator op(ball, SphereBoundary::Absorbing, tolerances);
            value = op.density(*xi, *yi);
        }
        const double delta = i == 0 ? std::numeric_limits<double>::quiet_NaN() : value - previous;
        if (i > 0 && delta < -1e-10 * std::max(1.0, std::abs(previous)))
            throw Error(Errc::NotMonotone, "g^(R) decreased from R=" + std::to_string(radii[i - 1]) +
                                               " to R=" + std::to_string(radii[i]));
        report.steps.push_back({radii[i], value, delta});
        previous = value;
    }
    report.estimate = report.steps.back().value;
    report.last_delta = report.steps.size() > 1 ? report.steps.back().delta
                                                : std::numeric_limits<double>::infinity();
    report.converged = std::abs(report.last_delta) < tol;
    return report;
}

double path_probability(const Ball& ball, std::span<const std::size_t> path) {
    double p = 1.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const double c = ball.conductance(path[i - 1], path[i]);
        if (c == 0.0)
            throw Error(Errc::InvalidPath, "consecutive path vertices are not adjacent");
        p *= c / ball.conductance_sum(path[i - 1]);
    }
    return p;
}

ConditionedPath conditioned_path_probability(const GreenOperator& op,
                                             std::span<const std::size_t> path, std::size_t v) {
    const Ball& ball = op.ball();
    if (path.empty())
        throw Error(Errc::InvalidPath, "empty path");
    if (v >= ball.size() || !ball.is_interior(v))
        throw Error(Errc::VertexNotInterior, "target must be an interior vertex");
    if (v == Ball::root_index())
        throw Error(Errc::TargetIsRoot, "target coincides with the root");
    for (std::size_t k = 0; k < path.size(); ++k) {
        if (path[k] >= ball.size())
            throw Error(Errc::VertexOutsideBall, "path vertex out of range");
        if (path[k] == Ball::root_index())
            throw Error(Errc::PathTouchesRoot, "path visits the root");
        if (path[k] == v)
            throw Error(Errc::PathTouchesTarget, "path visits the target");
        if (k + 1 < path.size() && !ball.is_interior(path[k]))
            throw Error(Errc::VertexNotInterior, "path leaves the ball interior");
    }
    const double first = ball.conductance(Ball::root_index(), path[0]);
    if (first == 0.0)
        throw Error(Errc::InvalidPath, "path must start at a neighbor of the root");

    const auto col = op.column(v);
    double z = 0.0;
    for (const auto& a : ball.arcs(Ball::root_index()))
        z += a.conductance * (*col)[a.target];

    ConditionedPath out;
    out.raw = first * path_probability(ball, path) * (*col)[path.back()];
    out.normalizer = z;
    out.sphere_bias = 1.0 - z;
    out.probability = out.raw / z;
    return out;
}

} // namespace netpot
