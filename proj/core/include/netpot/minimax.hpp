#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "netpot/green.hpp"
#include "netpot/potential.hpp"

namespace netpot {

/// Probability measure on a vertex set.
struct BoundaryMeasure {
    std::vector<std::size_t> support;
    std::vector<double> weights;

    Measure as_measure() const;
    double total() const;
};

/// α_w = Σ_{x~o} c_ox K(x,w): the root Laplacian of the sphere-data
/// potential K(·,w). Columns with α_w = 0 cannot be normalized and are
/// dropped (reported).
struct AlphaWeights {
    std::vector<std::size_t> columns;   // kept sphere vertices
    std::vector<double> alpha;          // matching α_w > 0
    std::vector<std::size_t> dropped;   // sphere vertices with α_w = 0
    double total = 0.0;                 // Σ α_w
    double escape_flux = 0.0;           // c_o P_o(τ_sphere < τ_o^+), solved independently
    double residual = 0.0;              // |total - escape_flux|
};

/// Throws IdentityViolation if Σα and the escape flux disagree beyond the
/// identity tolerance.
AlphaWeights alpha_weights(const GreenOperator& op);

/// max_b min_{v in sphere(r)} (K b)(v) over b >= 0 with α·b = 1, posed on
/// the columns scaled by 1/α_w.
struct MinimaxProblem {
    int outer_radius = 0;
    int inner_radius = 0;
    std::vector<std::size_t> inner_sphere;  // ball indices of sphere(r)
    AlphaWeights alpha;
    Eigen::MatrixXd kernel;                 // K restricted to inner_sphere x alpha.columns
};

MinimaxProblem make_minimax_problem(const GreenOperator& op, int inner_radius);

/// Problems for several inner radii sharing one harmonic-measure pass.
std::vector<MinimaxProblem> make_minimax_problems(const GreenOperator& op,
                                                  const std::vector<int>& inner_radii);

struct MinimaxResult {
    double value = 0.0;    // primal value M_R(r)
    double primal = 0.0;   // min over sphere(r) of the reconstructed optimizer
    double dual = 0.0;     // max_w (η K)(w) / α_w for the dual optimizer
    double gap = 0.0;      // |dual - primal|
    bool certified = false;  // gap <= lp_gap * max(1, value)
    std::vector<double> sphere_data;  // b over alpha.columns (α·b = 1)
    std::shared_ptr<const PotentialOnBall> psi;
    BoundaryMeasure eta;   // on sphere(r)
    std::size_t iterations = 0;
    bool degenerate = false;
    bool multiple_optima = false;
};

/// Solves the game as the LP max Σy s.t. K'^T y <= 1 (value 1/Σy), reads
/// η* from y and the sphere data b from the dual, then rebuilds ψ* by a
/// Dirichlet solve. A sphere(r) vertex that cannot reach the outer sphere
/// forces value 0 with η* concentrated there.
/// Throws Infeasible if sphere(r) is empty.
MinimaxResult solve_minimax(const GreenOperator& op, const MinimaxProblem& problem);
MinimaxResult solve_minimax(const GreenOperator& op, int inner_radius);

/// f_r(ψ, η) = Σ_v η(v) ψ(v).
double pairing(const PotentialOnBall& psi, const BoundaryMeasure& eta);

struct MCurveRow {
    int r;
    int R;
    double value;
    double gap;
    std::size_t iterations;
};

struct MCurve {
    std::vector<MCurveRow> rows;
    bool monotone = true;  // value non-decreasing in r (up to 1e-10 slack)
};

/// M_R(r) with R = ceil(ratio * r) for each r.
MCurve m_curve(const NetworkSource& source, const std::vector<int>& radii, double ratio,
               Tolerances tol = {});

} // namespace netpot
