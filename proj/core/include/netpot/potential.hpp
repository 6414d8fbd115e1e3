#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netpot/ball.hpp"
#include "netpot/config.hpp"

namespace netpot {

/// Measured distance of a function on a ball from the potential axioms:
/// nonnegative, zero at the root, Δ(root) equal to the expected mass and
/// harmonic at every other interior vertex.
struct PotentialValidation {
    double max_negativity = 0.0;     // max(0, -min value)
    double root_value = 0.0;
    double root_laplacian = 0.0;
    double expected_mass = 1.0;
    double harmonic_residual = 0.0;  // max |Δf(v)| over interior v != root
    std::vector<double> layer_minima;  // min over each distance layer 0..R
    bool nonnegative = false;
    bool root_zero = false;
    bool mass_ok = false;
    bool harmonic = false;
    bool valid = false;
    std::vector<std::string> flags;
};

PotentialValidation validate_potential(const Ball& ball, std::span<const double> values,
                                       double expected_mass = 1.0, Tolerances tol = {});

/// A function on a ball together with its root Laplacian mass (1 for a
/// potential, Σ w_n for weighted sums) and its validation report.
class PotentialOnBall {
public:
    PotentialOnBall(std::shared_ptr<const Ball> ball, std::vector<double> values,
                    double mass = 1.0, Tolerances tol = {});

    const Ball& ball() const noexcept { return *ball_; }
    const std::shared_ptr<const Ball>& ball_ptr() const noexcept { return ball_; }
    std::span<const double> values() const noexcept { return values_; }
    double value(std::size_t i) const { return values_.at(i); }
    double value(const VertexId& v) const { return values_.at(ball_->index_of(v)); }
    double mass() const noexcept { return mass_; }
    const PotentialValidation& validation() const noexcept { return validation_; }

private:
    std::shared_ptr<const Ball> ball_;
    std::vector<double> values_;
    double mass_;
    PotentialValidation validation_;
};

/// Normalized ball potential φ/Δφ(o) with φ = P(τ_sphere < τ_o): harmonic
/// on the interior, mass 1. Throws ExhaustedBall without a sphere.
PotentialOnBall ball_potential(std::shared_ptr<const Ball> ball, Tolerances tol = {});

using WeightedPotential = std::pair<double, std::reference_wrapper<const PotentialOnBall>>;

/// Σ w_n ψ_n with root mass Σ w_n. Terms on different radii of the same
/// network are restricted to the smallest ball; different networks raise
/// BallMismatch. Negative weights raise InvalidArgument.
PotentialOnBall combine(const std::vector<WeightedPotential>& terms, Tolerances tol = {});

struct SublevelRow {
    double level;
    std::size_t count;     // |{v in window : h(v) <= level}|
    bool window_complete;  // the set misses the two outermost layers
};

std::vector<SublevelRow> sublevel_report(const PotentialOnBall& h, std::span<const double> levels);

/// Same report from raw values and depths; `radius` < 0 marks an exhausted ball.
std::vector<SublevelRow> sublevel_report(std::span<const double> values, std::span<const int> depths,
                                         int radius, std::span<const double> levels);

} // namespace netpot
