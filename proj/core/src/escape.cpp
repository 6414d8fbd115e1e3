#include "netpot/escape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "netpot/errors.hpp"
#include "netpot/solver.hpp"

namespace netpot {

namespace {

std::string infeasible_message(int n, int r_max, double target, double bound) {
    return "level " + std::to_string(n) + " needs M(r) >= " + std::to_string(target) +
           " but M(r) <= R_eff(o<->sphere(" + std::to_string(r_max) + ")) = " +
           std::to_string(bound) + " for every r <= " + std::to_string(r_max);
}

int outer_radius(int r, double ratio) {
    return std::max(r + 1, static_cast<int>(std::ceil(ratio * r - 1e-12)));
}

bool reaches(double value, double target) {
    return value >= target - 1e-9 * std::max(1.0, std::abs(target));
}

// Lazily evaluated M_{ceil(ratio r)}(r), screened by the resistance bound.
class Searcher {
public:
    Searcher(const NetworkSource& source, double ratio, Tolerances tol)
        : source_(source), ratio_(ratio), tol_(tol) {}

    double resistance(int r) {
        auto it = reff_.find(r);
        if (it != reff_.end())
            return it->second;
        double value;
        try {
            value = effective_resistance(source_, r, tol_);
        } catch (const Error& e) {
            if (e.code() != Errc::ExhaustedBall)
                throw;
            value = 0.0;  // finite network exhausted before r: no sphere to reach
        }
        return reff_[r] = value;
    }

    std::optional<double> value(int r, double target) {
        if (resistance(r) < target * (1.0 - 1e-12))
            return std::nullopt;  // M <= R_eff < target, no LP needed
        auto it = values_.find(r);
        if (it != values_.end())
            return it->second;
        GreenOperator op(make_ball(source_, outer_radius(r, ratio_)), SphereBoundary::Absorbing, tol_);
        const double v = solve_minimax(op, r).value;
        best_ = std::max(best_, v);
        return values_[r] = v;
    }

    double best() const { return best_; }

private:
    const NetworkSource& source_;
    double ratio_;
    Tolerances tol_;
    std::map<int, double> reff_;
    std::map<int, double> values_;
    double best_ = 0.0;
};

// Smallest r in (lo, hi] with pred(r) by doubling from lo+1 and bisection.
template <class Pred>
std::optional<int> doubling_search(int lo, int hi, Pred&& pred) {
    int fail = lo;
    int r = lo + 1;
    for (;;) {
        if (r > hi)
            r = hi;
        if (pred(r))
            break;
        if (r == hi)
            return std::nullopt;
        fail = r;
        r *= 2;
    }
    int ok = r;
    while (ok - fail > 1) {
        const int mid = fail + (ok - fail) / 2;
        if (pred(mid))
            ok = mid;
        else
            fail = mid;
    }
    return ok;
}

EscapeResult assemble(const NetworkSource& source, EscapeSchedule schedule, double ratio,
                      Tolerances tol, bool repair) {
    auto& entries = schedule.entries;
    const int window = outer_radius(entries.back().radius, ratio);
    GreenOperator op(make_ball(source, window), SphereBoundary::Absorbing, tol);

    std::vector<MinimaxResult> optimizers;
    for (std::size_t n = 0; n < entries.size(); ++n) {
        auto res = solve_minimax(op, entries[n].radius);
        const double target = entries[n].level / entries[n].weight;
        if (repair && !reaches(res.value, target)) {
            // The window LP is tighter than the search LP; move r_n outward.
            const int lo = entries[n].radius;
            const int hi = n + 1 < entries.size() ? entries[n + 1].radius - 1 : window - 1;
            auto found = doubling_search(lo, hi, [&](int r) {
                return reaches(solve_minimax(op, r).value, target);
            });
            if (!found)
                throw ScheduleInfeasibleError(static_cast<int>(n + 1), hi, target, res.value * entries[n].weight,
                                              res.value * entries[n].weight);
            entries[n].radius = *found;
            res = solve_minimax(op, *found);
        }
        optimizers.push_back(std::move(res));
    }

    std::vector<WeightedPotential> terms;
    for (std::size_t n = 0; n < entries.size(); ++n)
        terms.emplace_back(entries[n].weight, std::cref(*optimizers[n].psi));
    PotentialOnBall h = combine(terms, tol);

    EscapeCertificate cert;
    cert.window_radius = window;
    cert.passed = h.validation().valid;
    const Ball& ball = op.ball();
    for (std::size_t n = 0; n < entries.size(); ++n) {
        const auto& e = entries[n];
        CertificateEntry ce{};
        ce.n = static_cast<int>(n + 1);
        ce.weight = e.weight;
        ce.radius = e.radius;
        ce.level = e.level;
        ce.minimax_value = optimizers[n].value;
        ce.gap = optimizers[n].gap;
        double sphere_min = std::numeric_limits<double>::infinity();
        for (std::size_t v : ball.layer(e.radius))
            sphere_min = std::min(sphere_min, optimizers[n].psi->value(v));
        ce.weighted_min = e.weight * sphere_min;
        ce.sphere_pass = reaches(ce.weighted_min, e.level);
        ce.window_min = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ball.size(); ++i)
            if (ball.depth(i) >= e.radius && ball.depth(i) < window)
                ce.window_min = std::min(ce.window_min, h.value(i));
        ce.window_pass = ce.window_min >= e.level - tol.identity;
        cert.passed = cert.passed && ce.sphere_pass && ce.window_pass;
        cert.mass += e.weight;
        cert.entries.push_back(ce);
    }
    return EscapeResult{std::move(h), std::move(cert), std::move(schedule)};
}

void check_weights_levels(const std::vector<double>& weights, const std::vector<double>& levels) {
    double total = 0.0;
    for (std::size_t n = 0; n < weights.size(); ++n) {
        if (!(weights[n] > 0.0))
            throw Error(Errc::InvalidArgument, "schedule weights must be positive");
        if (!(levels[n] > 0.0) || (n > 0 && levels[n] <= levels[n - 1]))
            throw Error(Errc::InvalidArgument, "schedule levels must be positive and increasing");
        total += weights[n];
    }
    if (total > 1.0 + 1e-12)
        throw Error(Errc::InvalidArgument, "schedule weights must sum to at most 1");
}

} // namespace

ScheduleInfeasibleError::ScheduleInfeasibleError(int n, int r_max, double target,
                                                 double achievable_bound, double best_computed)
    : Error(Errc::ScheduleInfeasible, infeasible_message(n, r_max, target, achievable_bound)),
      n_(n),
      r_max_(r_max),
      target_(target),
      achievable_(achievable_bound),
      best_(best_computed) {}

EscapeResult escape_construct(const NetworkSource& source, const AutoScheduleRequest& request,
                              Tolerances tol) {
    if (request.levels.empty())
        throw Error(Errc::InvalidArgument, "no levels requested");
    if (!(request.ratio > 1.0))
        throw Error(Errc::InvalidArgument, "ratio must exceed 1");
    if (request.r_max < 1)
        throw Error(Errc::InvalidArgument, "r_max must be >= 1");
    std::vector<double> weights = request.weights;
    if (weights.empty())
        for (std::size_t n = 1; n <= request.levels.size(); ++n)
            weights.push_back(std::ldexp(1.0, -static_cast<int>(n)));
    if (weights.size() != request.levels.size())
        throw Error(Errc::InvalidArgument, "weights and levels differ in length");
    check_weights_levels(weights, request.levels);

    Searcher search(source, request.ratio, tol);
    EscapeSchedule schedule;
    schedule.mode = EscapeSchedule::Mode::Auto;
    int previous = 0;
    for (std::size_t n = 0; n < request.levels.size(); ++n) {
        const double target = request.levels[n] / weights[n];
        const double bound = search.resistance(request.r_max);
        auto infeasible = [&] {
            return ScheduleInfeasibleError(static_cast<int>(n + 1), request.r_max, target,
                                           weights[n] * bound, weights[n] * search.best());
        };
        if (bound < target * (1.0 - 1e-12) || previous >= request.r_max)
            throw infeasible();
        auto found = doubling_search(previous, request.r_max, [&](int r) {
            auto v = search.value(r, target);
            return v && reaches(*v, target);
        });
        if (!found)
            throw infeasible();
        schedule.entries.push_back({weights[n], *found, request.levels[n]});
        previous = *found;
    }
    return assemble(source, std::move(schedule), request.ratio, tol, true);
}

EscapeResult escape_construct(const NetworkSource& source, const EscapeSchedule& schedule,
                              double ratio, Tolerances tol) {
    if (schedule.entries.empty())
        throw Error(Errc::InvalidArgument, "empty schedule");
    std::vector<double> weights, levels;
    for (std::size_t n = 0; n < schedule.entries.size(); ++n) {
        weights.push_back(schedule.entries[n].weight);
        levels.push_back(schedule.entries[n].level);
        if (schedule.entries[n].radius < 1 ||
            (n > 0 && schedule.entries[n].radius <= schedule.entries[n - 1].radius))
            throw Error(Errc::InvalidArgument, "schedule radii must be increasing and >= 1");
    }
    check_weights_levels(weights, levels);
    EscapeSchedule copy = schedule;
    copy.mode = EscapeSchedule::Mode::Explicit;
    return assemble(source, std::move(copy), ratio, tol, false);
}

} // namespace netpot
