#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netpot/green.hpp"
#include "netpot/potential.hpp"

namespace netpot {

/// Doob transform of the ball walk: p^h(x,y) = p(x,y) h(y)/h(x) on
/// S_h = {h > 0}, started from μ_h(v) = c_ov h(v). In Absorbing mode sphere
/// states have no outgoing transitions; in Reflecting mode they move along
/// ball edges with the ball conductance sum.
class HTransformChain {
public:
    struct Transition {
        std::size_t target;
        double probability;
    };

    HTransformChain(const PotentialOnBall& h, SphereBoundary boundary, Tolerances tol = {});

    const Ball& ball() const noexcept { return *ball_; }
    const std::shared_ptr<const Ball>& ball_ptr() const noexcept { return ball_; }
    SphereBoundary boundary() const noexcept { return boundary_; }
    const Tolerances& tolerances() const noexcept { return tol_; }

    double h(std::size_t i) const { return h_.at(i); }
    std::span<const double> h_values() const noexcept { return h_; }
    bool contains(std::size_t i) const { return i < h_.size() && h_[i] > 0.0; }
    bool absorbing(std::size_t i) const {
        return boundary_ == SphereBoundary::Absorbing && ball_->is_sphere(i);
    }
    /// States of S_h in index order.
    std::span<const std::size_t> states() const noexcept { return states_; }

    std::span<const Transition> transitions(std::size_t i) const {
        return {moves_.data() + offsets_[i], moves_.data() + offsets_[i + 1]};
    }
    double row_sum(std::size_t i) const { return row_sums_.at(i); }

    /// μ_h as (index, mass) pairs and its total, which equals Δh(o).
    const Measure& initial() const noexcept { return mu_; }
    double initial_mass() const noexcept { return mu_mass_; }

    /// max |row sum - 1| over interior non-root states.
    double max_row_defect() const noexcept { return max_row_defect_; }

private:
    std::shared_ptr<const Ball> ball_;
    SphereBoundary boundary_;
    Tolerances tol_;
    std::vector<double> h_;
    std::vector<std::size_t> states_;
    std::vector<std::size_t> offsets_;
    std::vector<Transition> moves_;
    std::vector<double> row_sums_;
    Measure mu_;
    double mu_mass_ = 0.0;
    double max_row_defect_ = 0.0;
};

/// Throws EmptyStateSpace when h vanishes on every neighbor of the root.
HTransformChain build_chain(const PotentialOnBall& h,
                            SphereBoundary boundary = SphereBoundary::Absorbing,
                            Tolerances tol = {});

/// P^h_{γ1}(γ) = Π p^h(γ_{i-1}, γ_i); 0 if the path leaves S_h.
double chain_path_probability(const HTransformChain& chain, std::span<const std::size_t> path);

/// Both sides of G^h(x,y) = G_o(x,y) h(y)/h(x) and of
/// G^h(μ_h,y) = h(y) c_y Z_y, where Z_y = P_y(τ_o < τ_sphere) (1 in
/// Reflecting mode). The left sides come from (I - P^h)^{-1}, the right
/// sides from an independent Green operator of the untransformed walk.
struct HGreenIdentity {
    double transformed = 0.0;     // G^h(x,y)
    double predicted = 0.0;       // G_o(x,y) h(y)/h(x)
    double mu_transformed = 0.0;  // G^h(μ_h,y)
    double mu_predicted = 0.0;    // h(y) c_y Z_y
    double discrepancy = 0.0;     // max of the two absolute differences
};

/// Precomputed factorization of I - P^h over the non-absorbed states.
class HGreen {
public:
    explicit HGreen(const HTransformChain& chain);
    ~HGreen();
    HGreen(HGreen&&) noexcept;

    /// G^h(·,y) over ball indices.
    std::vector<double> column(std::size_t y) const;
    /// G^h(μ_h,·) over ball indices.
    std::vector<double> initial_row() const;

    /// x, y must be interior states of S_h (NotInStateSpace otherwise).
    HGreenIdentity check(std::size_t x, std::size_t y) const;

    /// Max discrepancy of both identities over all interior state pairs.
    struct Summary {
        double pairs_error = 0.0;
        double initial_error = 0.0;
        std::size_t pairs = 0;
    };
    Summary check_all() const;

private:
    struct Impl;
    const HTransformChain& chain_;
    std::unique_ptr<Impl> impl_;
};

HGreenIdentity h_green_exact(const HTransformChain& chain, std::size_t x, std::size_t y);

struct McEstimate {
    double estimate = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    double ci_low = 0.0;   // 99% normal binomial interval
    double ci_high = 0.0;
    double std_error = 0.0;
    std::string rng;
};

struct EscapeStatistic {
    long ell = 0;
    double level = 0.0;
    std::optional<std::size_t> start;  // empty: started from μ_h
    std::optional<double> exact;
    std::optional<McEstimate> mc;
    /// P_v(τ_o >= ℓ) and the bound (M/h(v)) P_v(τ_o >= ℓ) on the complement.
    std::optional<double> survival;
    std::optional<double> complement_bound;
};

struct McOptions {
    std::size_t samples = 100000;
    std::uint64_t seed = 42;
};

inline constexpr const char* kMcStream = "splitmix64-counter/1";

/// P^h(h(Y_ℓ) > M) from `start` (or μ_h). Requires depth(start) + ℓ below the
/// ball radius so the walk cannot reach the sphere (BallTooSmall).
EscapeStatistic escape_statistic(const HTransformChain& chain, std::optional<std::size_t> start,
                                 long ell, double level, bool exact,
                                 std::optional<McOptions> mc = std::nullopt);

/// Length-ℓ paths γ = (γ_1..γ_ℓ) from the neighbors of the root that avoid
/// the root. Throws PathSpaceTooLarge above `cap` paths.
std::vector<std::vector<std::size_t>> enumerate_paths(const Ball& ball, int ell,
                                                      std::size_t cap = 1000000);

struct TvReport {
    std::vector<double> tv;
    std::size_t paths = 0;
    bool non_increasing = true;
    bool strictly_decreasing = true;
};

/// Total variation on length-ℓ path space between Σ_v η(v) P_o(oγ | τ_v < τ_o^+)
/// (computed in `op`'s ball) and the h-process law c_o P_o(oγ) h(γ_ℓ).
/// `h` may live on a different ball of the same network.
TvReport conditioned_vs_hprocess(const GreenOperator& op, const PotentialOnBall& h, int ell,
                                 const std::vector<Measure>& targets);

struct ReversalBound {
    double probability = 0.0;  // P_o(h(X_ℓ) >= M | τ_v < τ_o^+)
    double bound = 0.0;        // h(v)/M
    bool pass = false;         // probability <= bound + identity tolerance
};

/// Throws EllTooLarge unless 0 < ℓ < d(o,v).
ReversalBound reversal_bound_check(const GreenOperator& op, const PotentialOnBall& h,
                                   std::size_t v, double level, int ell);

struct ReversalIdentity {
    double from_root = 0.0;    // c_o P_o(τ_v < τ_o^+)
    double from_target = 0.0;  // c_v P_v(τ_o < τ_v^+)
};

/// Both escape fluxes from separate solves killed at {o, v} (and the sphere,
/// if the ball has one).
ReversalIdentity path_reversal(std::shared_ptr<const Ball> ball, std::size_t v, Tolerances tol = {});

} // namespace netpot
