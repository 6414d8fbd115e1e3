#include "netpot/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "netpot/errors.hpp"
#include "netpot/solver.hpp"

namespace netpot {

PotentialValidation validate_potential(const Ball& ball, std::span<const double> values,
                                       double expected_mass, Tolerances tol) {
    if (values.size() != ball.size())
        throw Error(Errc::InvalidArgument, "function size does not match ball");
    PotentialValidation rep;
    rep.expected_mass = expected_mass;
    rep.layer_minima.assign(static_cast<std::size_t>(ball.radius()) + 1,
                            std::numeric_limits<double>::infinity());

    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i) {
        lowest = std::min(lowest, values[i]);
        auto& m = rep.layer_minima[static_cast<std::size_t>(ball.depth(i))];
        m = std::min(m, values[i]);
    }
    while (!rep.layer_minima.empty() && std::isinf(rep.layer_minima.back()))
        rep.layer_minima.pop_back();  // exhausted balls have no outer layers
    rep.max_negativity = std::max(0.0, -lowest);
    rep.root_value = values[Ball::root_index()];
    rep.root_laplacian = laplacian_apply(ball, values, Ball::root_index());
    for (std::size_t v = 1; v < ball.interior_size(); ++v)
        rep.harmonic_residual =
            std::max(rep.harmonic_residual, std::abs(laplacian_apply(ball, values, v)));

    rep.nonnegative = rep.max_negativity <= tol.solve;
    rep.root_zero = std::abs(rep.root_value) <= tol.identity;
    rep.mass_ok = std::abs(rep.root_laplacian - expected_mass) <= tol.identity;
    rep.harmonic = rep.harmonic_residual <= tol.identity;
    if (!rep.nonnegative)
        rep.flags.push_back("negative values (min " + std::to_string(lowest) + ")");
    if (!rep.root_zero)
        rep.flags.push_back("nonzero at root");
    if (!rep.mass_ok)
        rep.flags.push_back("root Laplacian " + std::to_string(rep.root_laplacian) + " != " +
                            std::to_string(expected_mass));
    if (!rep.harmonic)
        rep.flags.push_back("not harmonic off the root (residual " +
                            std::to_string(rep.harmonic_residual) + ")");
    rep.valid = rep.nonnegative && rep.root_zero && rep.mass_ok && rep.harmonic;
    return rep;
}

PotentialOnBall::PotentialOnBall(std::shared_ptr<const Ball> ball, std::vector<double> values,
                                 double mass, Tolerances tol)
    : ball_(std::move(ball)), values_(std::move(values)), mass_(mass) {
    if (!ball_)
        throw Error(Errc::InvalidArgument, "null ball");
    validation_ = validate_potential(*ball_, values_, mass_, tol);
}

PotentialOnBall combine(const std::vector<WeightedPotential>& terms, Tolerances tol) {
    if (terms.empty())
        throw Error(Errc::InvalidArgument, "nothing to combine");
    const PotentialOnBall* smallest = &terms.front().second.get();
    for (const auto& [w, p] : terms) {
        if (!(w >= 0.0))
            throw Error(Errc::InvalidArgument, "combination weights must be nonnegative");
        if (p.get().ball().network_hash() != smallest->ball().network_hash() ||
            p.get().ball().root() != smallest->ball().root())
            throw Error(Errc::BallMismatch, "potentials live on different networks");
        if (p.get().ball().radius() < smallest->ball().radius())
            smallest = &p.get();
    }
    const auto& target = smallest->ball_ptr();
    std::vector<double> values(target->size(), 0.0);
    double mass = 0.0;
    for (const auto& [w, pref] : terms) {
        const PotentialOnBall& p = pref.get();
        mass += w * p.mass();
        if (p.ball_ptr() == target || p.ball().radius() == target->radius()) {
            for (std::size_t i = 0; i < values.size(); ++i)
                values[i] += w * p.value(i);
        } else {
            for (std::size_t i = 0; i < values.size(); ++i)
                values[i] += w * p.value(target->label(i));
        }
    }
    return PotentialOnBall(target, std::move(values), mass, tol);
}

std::vector<SublevelRow> sublevel_report(std::span<const double> values, std::span<const int> depths,
                                         int radius, std::span<const double> levels) {
    if (values.size() != depths.size())
        throw Error(Errc::InvalidArgument, "values and depths differ in length");
    // Window-completeness: the sublevel set must stay clear of the sphere and
    // the last interior layer, so no vertex beyond the window can join it.
    const int outer = radius < 0 ? std::numeric_limits<int>::max() : radius - 1;
    std::vector<SublevelRow> rows;
    for (double m : levels) {
        SublevelRow row{m, 0, true};
        for (std::size_t i = 0; i < values.size(); ++i)
            if (values[i] <= m) {
                ++row.count;
                if (depths[i] >= outer)
                    row.window_complete = false;
            }
        rows.push_back(row);
    }
    return rows;
}

std::vector<SublevelRow> sublevel_report(const PotentialOnBall& h, std::span<const double> levels) {
    const Ball& ball = h.ball();
    std::vector<int> depths(ball.size());
    for (std::size_t i = 0; i < ball.size(); ++i)
        depths[i] = ball.depth(i);
    return sublevel_report(h.values(), depths, ball.exhausted() ? -1 : ball.radius(), levels);
}

PotentialOnBall ball_potential(std::shared_ptr<const Ball> ball, Tolerances tol) {
    if (ball->exhausted())
        throw Error(Errc::ExhaustedBall, "ball has no sphere");
    DirichletSystem system(ball, {Ball::root_index()}, SphereBoundary::Absorbing, tol);
    const std::vector<double> source(ball->size(), 0.0);
    std::vector<double> boundary(ball->size(), 0.0);
    for (std::size_t w : ball->sphere())
        boundary[w] = 1.0;
    auto phi = system.solve(source, boundary).values;
    const double mass = laplacian_apply(*ball, phi, Ball::root_index());
    for (double& v : phi)
        v /= mass;
    return PotentialOnBall(std::move(ball), std::move(phi), 1.0, tol);
}

} // namespace netpot
