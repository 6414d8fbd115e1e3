#pragma once

#include <string>
#include <vector>

#include "netpot/errors.hpp"
#include "netpot/minimax.hpp"
#include "netpot/potential.hpp"

namespace netpot {

struct ScheduleEntry {
    double weight;  // w_n > 0
    int radius;     // r_n
    double level;   // t_n
};

struct EscapeSchedule {
    enum class Mode { Explicit, Auto };
    Mode mode = Mode::Explicit;
    std::vector<ScheduleEntry> entries;
};

/// Auto mode: for each level t_n find the smallest r_n <= r_max (doubling,
/// then bisection) with M_{ceil(ratio r_n)}(r_n) >= t_n / w_n.
struct AutoScheduleRequest {
    std::vector<double> levels;
    std::vector<double> weights;  // empty: w_n = 2^-n
    double ratio = 2.0;
    int r_max = 100000;
};

struct CertificateEntry {
    int n;
    double weight;
    int radius;
    double level;
    double minimax_value;      // M over the common window, at r_n
    double weighted_min;       // w_n * min over sphere(r_n) of ψ_{r_n}
    bool sphere_pass;          // weighted_min >= t_n
    double window_min;         // min of h over r_n <= d < R_window
    bool window_pass;          // window_min >= t_n - identity tolerance
    double gap;                // LP duality gap of ψ_{r_n}
};

struct EscapeCertificate {
    int window_radius = 0;
    double mass = 0.0;  // Σ w_n
    std::vector<CertificateEntry> entries;
    bool passed = false;
};

struct EscapeResult {
    PotentialOnBall h;
    EscapeCertificate certificate;
    EscapeSchedule schedule;
};

/// Raised when no r_n <= r_max reaches the level t_n / w_n. The upper bound
/// uses M_R(r) <= R_eff(o <-> sphere(r)) <= R_eff(o <-> sphere(r_max)).
class ScheduleInfeasibleError : public Error {
public:
    ScheduleInfeasibleError(int n, int r_max, double target, double achievable_bound,
                            double best_computed);

    int n() const noexcept { return n_; }
    int r_max() const noexcept { return r_max_; }
    double target() const noexcept { return target_; }
    /// Upper bound on the level w_n * M(r) reachable with r <= r_max.
    double achievable_level() const noexcept { return achievable_; }
    /// Best level actually realized by a computed optimizer (0 if none).
    double best_computed_level() const noexcept { return best_; }

private:
    int n_;
    int r_max_;
    double target_;
    double achievable_;
    double best_;
};

EscapeResult escape_construct(const NetworkSource& source, const AutoScheduleRequest& request,
                              Tolerances tol = {});

/// Explicit radii, weights and levels; the certificate is computed, not
/// assumed. All potentials live on the window B(o, ceil(ratio * r_N)).
EscapeResult escape_construct(const NetworkSource& source, const EscapeSchedule& schedule,
                              double ratio = 2.0, Tolerances tol = {});

} // namespace netpot
