#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "netpot/ball.hpp"
#include "netpot/config.hpp"

namespace netpot {

/// How the sphere of a ball is treated.
///  - Absorbing: the sphere is always part of the killed set (walk stopped at
///    the sphere). This gives the monotone exhaustion G^(R) increasing to G_o.
///  - Reflecting: the ball is treated as a finite network in its own right
///    (sphere vertices keep only their ball edges); only the requested killed
///    set stops the walk.
enum class SphereBoundary { Absorbing, Reflecting };

struct Solution {
    std::vector<double> values;  // indexed by ball index, boundary data on killed vertices
    double residual = 0.0;       // ||L u - rhs||_inf / ||rhs||_inf on the free vertices
};

/// Reduced weighted Laplacian L_Z = diag(c) - C on the free vertices
/// (ball minus killed set), factorized once and reused for every right-hand
/// side. Solves are serialized internally, so concurrent callers never see
/// each other's state.
class DirichletSystem {
public:
    /// `killed` holds ball indices and must contain the root. In Absorbing
    /// mode the sphere is added automatically. Throws InvalidArgument on a
    /// violated precondition, SingularSystem if factorization fails.
    DirichletSystem(std::shared_ptr<const Ball> ball, std::vector<std::size_t> killed,
                    SphereBoundary boundary = SphereBoundary::Absorbing, Tolerances tol = {});

    static DirichletSystem factor(std::shared_ptr<const Ball> ball,
                                  const std::vector<VertexId>& killed,
                                  SphereBoundary boundary = SphereBoundary::Absorbing,
                                  Tolerances tol = {});

    DirichletSystem(DirichletSystem&&) noexcept;
    DirichletSystem& operator=(DirichletSystem&&) noexcept;
    ~DirichletSystem();

    const Ball& ball() const noexcept { return *ball_; }
    const std::shared_ptr<const Ball>& ball_ptr() const noexcept { return ball_; }
    SphereBoundary boundary() const noexcept { return boundary_; }
    const Tolerances& tolerances() const noexcept { return tol_; }

    bool is_killed(std::size_t i) const { return position_.at(i) < 0; }
    std::size_t free_size() const noexcept { return free_.size(); }
    std::span<const std::size_t> free_vertices() const noexcept { return free_; }

    /// Conductance sum used for vertex i (full network value on the interior).
    double conductance_sum(std::size_t i) const { return ball_->conductance_sum(i); }

    /// u = boundary on the killed set and Δu = -source on the free vertices.
    /// Both spans are indexed by ball index; `source` must vanish on the
    /// killed set. Throws ResidualTooLarge if the tolerance cannot be met.
    Solution solve(std::span<const double> source, std::span<const double> boundary) const;

    /// Solves several right-hand sides given directly on the free vertices
    /// (column k of the result is the free-vertex solution for column k).
    Eigen::MatrixXd solve_free(const Eigen::MatrixXd& rhs, double* max_residual = nullptr) const;

private:
    struct Impl;
    std::shared_ptr<const Ball> ball_;
    SphereBoundary boundary_;
    Tolerances tol_;
    std::vector<std::size_t> free_;
    std::vector<long> position_;  // ball index -> free position, -1 if killed
    std::unique_ptr<Impl> impl_;
};

/// K(v,w) = P_v(walk hits sphere vertex w before the root or any other killed
/// vertex). One column per sphere vertex; rows restricted to `rows` (ball
/// indices), or all ball vertices when `rows` is empty.
struct HarmonicMeasure {
    std::vector<std::size_t> columns;  // sphere vertices (ball indices)
    std::vector<std::size_t> rows;     // ball indices
    Eigen::MatrixXd values;            // rows.size() x columns.size()
    double max_residual = 0.0;
};

/// Requires an Absorbing system with nonempty sphere (ExhaustedBall otherwise).
HarmonicMeasure harmonic_measure(const DirichletSystem& system,
                                 std::span<const std::size_t> rows = {});

/// Effective resistance between the root and the wired sphere of B(o,R).
/// Throws ExhaustedBall when the sphere is empty.
double effective_resistance(const NetworkSource& source, int radius, Tolerances tol = {});
double effective_resistance(std::shared_ptr<const Ball> ball, Tolerances tol = {});

} // namespace netpot
