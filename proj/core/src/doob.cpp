#include "netpot/doob.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "netpot/errors.hpp"
#include "netpot/hash.hpp"

namespace netpot {

namespace {

constexpr double kZ99 = 2.5758293035489004;

// Counter-based uniform stream: draw k of sample i depends only on (seed, i, k).
struct CounterStream {
    std::uint64_t key;
    std::uint64_t counter = 0;

    CounterStream(std::uint64_t seed, std::uint64_t sample)
        : key(splitmix64(seed ^ splitmix64(sample + 0x632BE59BD9B4E019ULL))) {}

    double uniform() {
        const std::uint64_t bits = splitmix64(key + 0x9E3779B97F4A7C15ULL * ++counter);
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }
};

// Number of leading ball indices with depth <= d (indices are depth-sorted).
std::size_t depth_prefix(const Ball& ball, long d) {
    if (d >= ball.radius())
        return ball.size();
    std::size_t lo = 0, hi = ball.size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (ball.depth(mid) <= d)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

std::size_t h_index(const Ball& ball, const PotentialOnBall& h, std::size_t i) {
    if (&h.ball() == &ball)
        return i;
    auto j = h.ball().find(ball.label(i));
    if (!j)
        throw Error(Errc::VertexOutsideBall,
                    "potential undefined at " + ball.label(i).label());
    return *j;
}

double h_at(const Ball& ball, const PotentialOnBall& h, std::size_t i) {
    return h.value(h_index(ball, h, i));
}

} // namespace

HTransformChain::HTransformChain(const PotentialOnBall& h, SphereBoundary boundary, Tolerances tol)
    : ball_(h.ball_ptr()), boundary_(boundary), tol_(tol), h_(h.values().begin(), h.values().end()) {
    const Ball& ball = *ball_;
    const std::size_t n = ball.size();
    offsets_.assign(n + 1, 0);
    row_sums_.assign(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
        if (contains(x)) {
            states_.push_back(x);
            if (!absorbing(x)) {
                const double cx = ball.conductance_sum(x);
                for (const auto& a : ball.arcs(x)) {
                    if (!contains(a.target))
                        continue;
                    const double p = a.conductance / cx * h_[a.target] / h_[x];
                    moves_.push_back({a.target, p});
                    row_sums_[x] += p;
                }
                if (ball.is_interior(x) && x != Ball::root_index())
                    max_row_defect_ = std::max(max_row_defect_, std::abs(row_sums_[x] - 1.0));
            }
        }
        offsets_[x + 1] = moves_.size();
    }
    for (const auto& a : ball.arcs(Ball::root_index()))
        if (contains(a.target)) {
            const double m = a.conductance * h_[a.target];
            mu_.emplace_back(a.target, m);
            mu_mass_ += m;
        }
    if (mu_.empty())
        throw Error(Errc::EmptyStateSpace, "h vanishes on every neighbor of the root");
}

HTransformChain build_chain(const PotentialOnBall& h, SphereBoundary boundary, Tolerances tol) {
    return HTransformChain(h, boundary, tol);
}

double chain_path_probability(const HTransformChain& chain, std::span<const std::size_t> path) {
    if (path.empty())
        throw Error(Errc::InvalidPath, "empty path");
    for (std::size_t k : path)
        if (!chain.contains(k))
            return 0.0;
    double p = 1.0;
    for (std::size_t k = 1; k < path.size(); ++k) {
        double step = 0.0;
        for (const auto& t : chain.transitions(path[k - 1]))
            if (t.target == path[k])
                step = t.probability;
        if (step == 0.0)
            return 0.0;
        p *= step;
    }
    return p;
}

struct HGreen::Impl {
    std::vector<long> position;  // ball index -> free state position, -1 if none
    std::vector<std::size_t> free;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_t;
    GreenOperator green;

    Impl(const HTransformChain& chain)
        : green(chain.ball_ptr(), chain.boundary(), chain.tolerances()) {}
};

HGreen::HGreen(const HTransformChain& chain) : chain_(chain), impl_(std::make_unique<Impl>(chain)) {
    const Ball& ball = chain.ball();
    auto& s = *impl_;
    s.position.assign(ball.size(), -1);
    for (std::size_t x : chain.states())
        if (!chain.absorbing(x)) {
            s.position[x] = static_cast<long>(s.free.size());
            s.free.push_back(x);
        }
    const auto m = static_cast<Eigen::Index>(s.free.size());
    std::vector<Eigen::Triplet<double>> triplets;
    for (Eigen::Index i = 0; i < m; ++i) {
        triplets.emplace_back(i, i, 1.0);
        for (const auto& t : chain.transitions(s.free[i]))
            if (s.position[t.target] >= 0)
                triplets.emplace_back(i, s.position[t.target], -t.probability);
    }
    Eigen::SparseMatrix<double> a(m, m);
    a.setFromTriplets(triplets.begin(), triplets.end());
    a.makeCompressed();
    Eigen::SparseMatrix<double> at = a.transpose();
    at.makeCompressed();
    s.lu.compute(a);
    s.lu_t.compute(at);
    if (s.lu.info() != Eigen::Success || s.lu_t.info() != Eigen::Success)
        throw Error(Errc::SingularSystem, "I - P^h is singular");
}

HGreen::~HGreen() = default;
HGreen::HGreen(HGreen&&) noexcept = default;

std::vector<double> HGreen::column(std::size_t y) const {
    const auto& s = *impl_;
    if (y >= s.position.size() || s.position[y] < 0)
        throw Error(Errc::NotInStateSpace, "vertex is not a transient state of the chain");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.free.size()));
    rhs[s.position[y]] = 1.0;
    Eigen::VectorXd g = s.lu.solve(rhs);
    std::vector<double> out(s.position.size(), 0.0);
    for (std::size_t i = 0; i < s.free.size(); ++i)
        out[s.free[i]] = g[static_cast<Eigen::Index>(i)];
    return out;
}

std::vector<double> HGreen::initial_row() const {
    const auto& s = *impl_;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.free.size()));
    for (const auto& [u, m] : chain_.initial())
        if (s.position[u] >= 0)
            rhs[s.position[u]] += m;
    Eigen::VectorXd z = s.lu_t.solve(rhs);
    std::vector<double> out(s.position.size(), 0.0);
    for (std::size_t i = 0; i < s.free.size(); ++i)
        out[s.free[i]] = z[static_cast<Eigen::Index>(i)];
    return out;
}

HGreenIdentity HGreen::check(std::size_t x, std::size_t y) const {
    const Ball& ball = chain_.ball();
    for (std::size_t v : {x, y})
        if (v >= ball.size() || !chain_.contains(v) || !ball.is_interior(v))
            throw Error(Errc::NotInStateSpace, "vertex is not an interior state of the chain");
    const auto& green = impl_->green;
    HGreenIdentity out;
    out.transformed = column(y)[x];
    const double cy = ball.conductance_sum(y);
    out.predicted = green.density(x, y) * cy * chain_.h(y) / chain_.h(x);
    out.mu_transformed = initial_row()[y];
    const auto col = green.column(y);
    double z = 0.0;
    for (const auto& a : ball.arcs(Ball::root_index()))
        z += a.conductance * (*col)[a.target];
    out.mu_predicted = chain_.h(y) * cy * z;
    out.discrepancy = std::max(std::abs(out.transformed - out.predicted),
                               std::abs(out.mu_transformed - out.mu_predicted));
    return out;
}

HGreen::Summary HGreen::check_all() const {
    const Ball& ball = chain_.ball();
    const auto& green = impl_->green;
    Summary sum;
    std::vector<std::size_t> inner;
    for (std::size_t x : chain_.states())
        if (ball.is_interior(x))
            inner.push_back(x);
    const auto mu_row = initial_row();
    for (std::size_t y : inner) {
        const auto gh = column(y);
        const auto col = green.column(y);
        const double cy = ball.conductance_sum(y);
        double z = 0.0;
        for (const auto& a : ball.arcs(Ball::root_index()))
            z += a.conductance * (*col)[a.target];
        sum.initial_error = std::max(sum.initial_error, std::abs(mu_row[y] - chain_.h(y) * cy * z));
        for (std::size_t x : inner) {
            const double predicted = (*col)[x] * cy * chain_.h(y) / chain_.h(x);
            sum.pairs_error = std::max(sum.pairs_error, std::abs(gh[x] - predicted));
            ++sum.pairs;
        }
    }
    return sum;
}

HGreenIdentity h_green_exact(const HTransformChain& chain, std::size_t x, std::size_t y) {
    return HGreen(chain).check(x, y);
}

EscapeStatistic escape_statistic(const HTransformChain& chain, std::optional<std::size_t> start,
                                 long ell, double level, bool exact, std::optional<McOptions> mc) {
    const Ball& ball = chain.ball();
    if (ell < 0)
        throw Error(Errc::InvalidArgument, "ell must be nonnegative");
    if (!exact && !mc)
        throw Error(Errc::InvalidArgument, "neither exact nor Monte-Carlo mode requested");
    int d0 = 1;
    if (start) {
        if (*start >= ball.size() || !chain.contains(*start))
            throw Error(Errc::NotInStateSpace, "start is not a state of the chain");
        d0 = ball.depth(*start);
    }
    if (!ball.exhausted() && d0 + ell >= ball.radius())
        throw Error(Errc::BallTooSmall, "ball radius " + std::to_string(ball.radius()) +
                                            " does not contain the " + std::to_string(ell) +
                                            "-step support");

    Measure init;
    if (start)
        init.emplace_back(*start, 1.0);
    else
        for (const auto& [u, m] : chain.initial())
            init.emplace_back(u, m / chain.initial_mass());

    EscapeStatistic out;
    out.ell = ell;
    out.level = level;
    out.start = start;

    if (exact) {
        std::vector<double> p(ball.size(), 0.0), q(ball.size(), 0.0);
        for (const auto& [u, m] : init)
            p[u] += m;
        for (long n = 0; n < ell; ++n) {
            const std::size_t reach = depth_prefix(ball, d0 + n);
            const std::size_t next = depth_prefix(ball, d0 + n + 1);
            std::fill(q.begin(), q.begin() + static_cast<long>(next), 0.0);
            for (std::size_t x = 0; x < reach; ++x)
                if (p[x] != 0.0)
                    for (const auto& t : chain.transitions(x))
                        q[t.target] += p[x] * t.probability;
            std::swap(p, q);
        }
        double value = 0.0;
        for (std::size_t x = 0; x < ball.size(); ++x)
            if (p[x] != 0.0 && chain.h(x) > level)
                value += p[x];
        out.exact = value;

        if (start) {
            // Untransformed walk killed at the root for ℓ - 1 steps.
            std::fill(p.begin(), p.end(), 0.0);
            p[*start] = 1.0;
            for (long n = 0; n + 1 < ell; ++n) {
                const std::size_t reach = depth_prefix(ball, d0 + n);
                const std::size_t next = depth_prefix(ball, d0 + n + 1);
                std::fill(q.begin(), q.begin() + static_cast<long>(next), 0.0);
                for (std::size_t x = 1; x < reach; ++x)
                    if (p[x] != 0.0) {
                        const double cx = ball.conductance_sum(x);
                        for (const auto& a : ball.arcs(x))
                            q[a.target] += p[x] * a.conductance / cx;
                    }
                q[Ball::root_index()] = 0.0;
                std::swap(p, q);
            }
            double survival = 0.0;
            for (std::size_t x = 1; x < ball.size(); ++x)
                survival += p[x];
            out.survival = survival;
            out.complement_bound = level / chain.h(*start) * survival;
        }
    }

    if (mc) {
        if (mc->samples == 0)
            throw Error(Errc::InvalidArgument, "at least one sample is required");
        std::size_t hits = 0;
        for (std::size_t i = 0; i < mc->samples; ++i) {
            CounterStream rng(mc->seed, i);
            std::size_t x = init.front().first;
            if (init.size() > 1) {
                double u = rng.uniform();
                for (const auto& [v, m] : init) {
                    x = v;
                    if (u < m)
                        break;
                    u -= m;
                }
            }
            bool alive = true;
            for (long n = 0; n < ell && alive; ++n) {
                double u = rng.uniform();
                alive = false;
                for (const auto& t : chain.transitions(x)) {
                    if (u < t.probability) {
                        x = t.target;
                        alive = true;
                        break;
                    }
                    u -= t.probability;
                }
            }
            if (alive && chain.h(x) > level)
                ++hits;
        }
        McEstimate est;
        est.samples = mc->samples;
        est.seed = mc->seed;
        est.rng = kMcStream;
        const double n = static_cast<double>(mc->samples);
        est.estimate = static_cast<double>(hits) / n;
        est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) / n);
        est.ci_low = std::max(0.0, est.estimate - kZ99 * est.std_error);
        est.ci_high = std::min(1.0, est.estimate + kZ99 * est.std_error);
        out.mc = est;
    }
    return out;
}

std::vector<std::vector<std::size_t>> enumerate_paths(const Ball& ball, int ell, std::size_t cap) {
    if (ell < 1)
        throw Error(Errc::InvalidArgument, "path length must be >= 1");
    if (!ball.exhausted() && ell >= ball.radius())
        throw Error(Errc::BallTooSmall, "paths of length " + std::to_string(ell) +
                                            " leave the ball interior");
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> path;
    auto extend = [&](auto&& self, std::size_t x) -> void {
        path.push_back(x);
        if (static_cast<int>(path.size()) == ell) {
            if (out.size() >= cap)
                throw Error(Errc::PathSpaceTooLarge,
                            "more than " + std::to_string(cap) + " paths of length " + std::to_string(ell));
            out.push_back(path);
        } else {
            for (const auto& a : ball.arcs(x))
                if (a.target != Ball::root_index())
                    self(self, a.target);
        }
        path.pop_back();
    };
    for (const auto& a : ball.arcs(Ball::root_index()))
        extend(extend, a.target);
    return out;
}

TvReport conditioned_vs_hprocess(const GreenOperator& op, const PotentialOnBall& h, int ell,
                                 const std::vector<Measure>& targets) {
    const Ball& ball = op.ball();
    if (targets.empty())
        throw Error(Errc::InvalidArgument, "no targets");
    for (const auto& eta : targets)
        for (const auto& [v, w] : eta) {
            if (v >= ball.size() || !ball.is_interior(v))
                throw Error(Errc::VertexNotInterior, "target must be an interior vertex");
            if (ball.depth(v) <= ell)
                throw Error(Errc::EllTooLarge, "paths of length " + std::to_string(ell) +
                                                   " can reach target " + ball.label(v).label());
        }
    const auto paths = enumerate_paths(ball, ell);

    // Common factor c_o P_o(oγ) and the h-process weight.
    std::vector<double> base(paths.size()), hprocess(paths.size());
    for (std::size_t k = 0; k < paths.size(); ++k) {
        const auto& g = paths[k];
        base[k] = ball.conductance(Ball::root_index(), g.front()) * path_probability(ball, g);
        bool inside = true;
        for (std::size_t x : g)
            inside = inside && h_at(ball, h, x) > 0.0;
        hprocess[k] = inside ? base[k] * h_at(ball, h, g.back()) : 0.0;
    }

    TvReport report;
    report.paths = paths.size();
    for (const auto& eta : targets) {
        // f(x) = Σ_v η(v) g(x,v) / Z_v
        std::vector<double> f(ball.size(), 0.0);
        for (const auto& [v, w] : eta) {
            const auto col = op.column(v);
            double z = 0.0;
            for (const auto& a : ball.arcs(Ball::root_index()))
                z += a.conductance * (*col)[a.target];
            for (std::size_t x = 0; x < ball.size(); ++x)
                f[x] += w * (*col)[x] / z;
        }
        double tv = 0.0;
        for (std::size_t k = 0; k < paths.size(); ++k)
            tv += std::abs(base[k] * f[paths[k].back()] - hprocess[k]);
        tv *= 0.5;
        if (!report.tv.empty()) {
            report.non_increasing = report.non_increasing && tv <= report.tv.back() + 1e-12;
            report.strictly_decreasing = report.strictly_decreasing && tv < report.tv.back();
        }
        report.tv.push_back(tv);
    }
    return report;
}

ReversalBound reversal_bound_check(const GreenOperator& op, const PotentialOnBall& h,
                                   std::size_t v, double level, int ell) {
    const Ball& ball = op.ball();
    if (v >= ball.size())
        throw Error(Errc::VertexOutsideBall, "target out of range");
    if (!(level > 0.0))
        throw Error(Errc::InvalidArgument, "level must be positive");
    if (ell <= 0 || ell >= ball.depth(v))
        throw Error(Errc::EllTooLarge, "need 0 < ell < d(o,v) = " + std::to_string(ball.depth(v)));
    ReversalBound out;
    for (const auto& path : enumerate_paths(ball, ell))
        if (h_at(ball, h, path.back()) >= level)
            out.probability += conditioned_path_probability(op, path, v).probability;
    out.bound = h_at(ball, h, v) / level;
    out.pass = out.probability <= out.bound + op.tolerances().identity;
    return out;
}

ReversalIdentity path_reversal(std::shared_ptr<const Ball> ball, std::size_t v, Tolerances tol) {
    if (v >= ball->size() || !ball->is_interior(v))
        throw Error(Errc::VertexNotInterior, "target must be an interior vertex");
    if (v == Ball::root_index())
        throw Error(Errc::TargetIsRoot, "target coincides with the root");
    const Ball& b = *ball;
    DirichletSystem system(ball, {Ball::root_index(), v}, SphereBoundary::Absorbing, tol);
    const std::vector<double> source(b.size(), 0.0);
    std::vector<double> boundary(b.size(), 0.0);

    ReversalIdentity out;
    boundary[v] = 1.0;
    const auto u = system.solve(source, boundary).values;
    for (const auto& a : b.arcs(Ball::root_index()))
        out.from_root += a.conductance * u[a.target];

    boundary[v] = 0.0;
    boundary[Ball::root_index()] = 1.0;
    const auto w = system.solve(source, boundary).values;
    for (const auto& a : b.arcs(v))
        out.from_target += a.conductance * w[a.target];
    return out;
}

} // namespace netpot
