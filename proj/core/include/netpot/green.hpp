#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "netpot/ball.hpp"
#include "netpot/solver.hpp"

namespace netpot {

/// Weighted target set: (ball index, weight) pairs. Used for point masses,
/// dipole mixtures and boundary measures.
using Measure = std::vector<std::pair<std::size_t, double>>;

/// Green density g(x,y) = G(x,y)/c_y of the walk killed at the root and,
/// in Absorbing mode, at the sphere. Columns are solved lazily and cached;
/// the cache is guarded so concurrent readers observe either no entry or a
/// complete column.
class GreenOperator {
public:
    explicit GreenOperator(std::shared_ptr<const Ball> ball,
                           SphereBoundary boundary = SphereBoundary::Absorbing,
                           Tolerances tol = {});

    const Ball& ball() const noexcept { return system_.ball(); }
    const std::shared_ptr<const Ball>& ball_ptr() const noexcept { return system_.ball_ptr(); }
    const DirichletSystem& system() const noexcept { return system_; }
    SphereBoundary boundary() const noexcept { return system_.boundary(); }
    const Tolerances& tolerances() const noexcept { return system_.tolerances(); }

    /// g(·,y) over ball indices. y must be a free vertex (not the root, not
    /// an absorbed sphere vertex); killed vertices carry 0.
    std::shared_ptr<const std::vector<double>> column(std::size_t y) const;

    /// g(x,y); both vertices must be in the ball, y must not be killed.
    double density(std::size_t x, std::size_t y) const;
    double density(const VertexId& x, const VertexId& y) const;

    /// Cached harmonic measure over all ball rows (Absorbing mode only).
    const HarmonicMeasure& harmonic_measure() const;

    std::size_t cached_columns() const;

private:
    DirichletSystem system_;
    mutable std::mutex mutex_;
    mutable std::map<std::size_t, std::shared_ptr<const std::vector<double>>> cache_;
    mutable std::shared_ptr<const HarmonicMeasure> harmonic_;
};

/// f = Σ_v η(v) g(·,v) with f(o) = 0 and Δf = 1_o - η on the ball interior.
/// Uses a Reflecting operator (the ball as a finite network killed only at
/// the root), where the dipole identities hold exactly. Targets must be
/// interior, non-root vertices; weights must sum to 1.
/// Throws TargetIsRoot, MeasureNotNormalized, VertexOutsideBall.
std::vector<double> dipole_mixture(const GreenOperator& op, const Measure& eta);

struct ExhaustionStep {
    int radius;
    double value;
    double delta;  // value minus the previous value; NaN for the first entry
};

struct ExhaustionReport {
    std::vector<ExhaustionStep> steps;
    double estimate = 0.0;
    double last_delta = 0.0;
    bool converged = false;
};

/// g^(R)(x,y) along an increasing radius schedule; the sequence must be
/// non-decreasing (NotMonotone otherwise). Converged when the last delta is
/// below `tol`.
ExhaustionReport exhaustion_limit(const NetworkSource& source, const VertexId& x,
                                  const VertexId& y, const std::vector<int>& radii, double tol,
                                  Tolerances tolerances = {});

/// P_{γ1}(γ) = Π p(γ_{i-1}, γ_i).
double path_probability(const Ball& ball, std::span<const std::size_t> path);

struct ConditionedPath {
    double probability;  // c_o P_o(oγ) g(γ_l, v) / Z_v
    double raw;          // c_o P_o(oγ) g(γ_l, v)
    double normalizer;   // Z_v = Σ_{x~o} c_ox g(x, v) = P_v(τ_o < τ_sphere)
    double sphere_bias;  // 1 - Z_v: mass of v-hitting paths lost at the sphere
};

/// Law of the first steps of the walk from the root conditioned to hit v
/// before returning to the root (and before the sphere, in Absorbing mode).
/// γ starts at a neighbor of the root and avoids both the root and v.
/// Throws PathTouchesRoot, PathTouchesTarget, InvalidPath, VertexNotInterior.
ConditionedPath conditioned_path_probability(const GreenOperator& op,
                                             std::span<const std::size_t> path, std::size_t v);

} // namespace netpot
