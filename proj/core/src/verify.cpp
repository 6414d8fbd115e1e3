#include "netpot/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <sstream>

#include "netpot/doob.hpp"
#include "netpot/errors.hpp"
#include "netpot/green.hpp"
#include "netpot/minimax.hpp"
#include "netpot/potential.hpp"
#include "netpot/serialize.hpp"
#include "netpot/solver.hpp"

namespace netpot {

namespace {

constexpr double kMonotoneSlack = 1e-10;

// B(o,R) if every ball up to radius R stays within `cap` vertices.
std::shared_ptr<const Ball> bounded_ball(const NetworkSource& source, int radius, std::size_t cap) {
    std::shared_ptr<const Ball> ball;
    for (int r = 1; r <= radius; ++r) {
        ball = make_ball(source, r);
        if (ball->size() > cap)
            return nullptr;
        if (ball->exhausted())
            return make_ball(source, radius);
    }
    return ball;
}

struct Context {
    const NetworkSource& source;
    const VerifyConfig& config;
    ConformanceReport& report;
    std::shared_ptr<const Ball> ball;  // identity ball, nonempty sphere
    std::unique_ptr<PotentialOnBall> h;
};

void run(ConformanceReport& report, const std::string& name, double tolerance,
         const std::function<double(std::string&)>& body) {
    CheckResult res;
    res.name = name;
    res.tolerance = tolerance;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        res.measured = body(res.detail);
        res.passed = res.measured <= tolerance;
    } catch (const std::exception& e) {
        res.passed = false;
        res.measured = std::nan("");
        res.detail = e.what();
    }
    res.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.checks.push_back(std::move(res));
}

std::vector<std::size_t> interior_targets(const Ball& ball, std::size_t limit) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i < ball.interior_size() && out.size() < limit; ++i)
        out.push_back(i);
    return out;
}

double green_symmetry(Context& ctx, std::string& detail) {
    GreenOperator op(ctx.ball, SphereBoundary::Absorbing, ctx.config.tol);
    const auto v = interior_targets(*ctx.ball, 40);
    double worst = 0.0;
    for (std::size_t x : v)
        for (std::size_t y : v)
            worst = std::max(worst, std::abs(op.density(x, y) - op.density(y, x)));
    detail = std::to_string(v.size()) + " vertices";
    return worst;
}

double dipole_laplacian(Context& ctx, std::string& detail) {
    GreenOperator op(ctx.ball, SphereBoundary::Reflecting, ctx.config.tol);
    const Ball& ball = *ctx.ball;
    const auto targets = interior_targets(ball, 20);
    double worst = 0.0;
    for (std::size_t y : targets) {
        const auto f = dipole_mixture(op, Measure{{y, 1.0}});
        for (std::size_t v = 0; v < ball.interior_size(); ++v) {
            const double expected = (v == Ball::root_index() ? 1.0 : 0.0) - (v == y ? 1.0 : 0.0);
            worst = std::max(worst, std::abs(laplacian_apply(ball, f, v) - expected));
        }
    }
    detail = std::to_string(targets.size()) + " targets";
    return worst;
}

double telescoping(Context& ctx, std::string& detail) {
    const HTransformChain chain(*ctx.h, SphereBoundary::Absorbing, ctx.config.tol);
    const Ball& ball = *ctx.ball;
    std::mt19937_64 rng(ctx.config.seed);
    std::vector<std::size_t> starts;
    for (std::size_t x : chain.states())
        if (ball.is_interior(x))
            starts.push_back(x);
    double worst = 0.0;
    std::size_t paths = 0;
    for (int k = 0; k < 200; ++k) {
        std::vector<std::size_t> path{starts[rng() % starts.size()]};
        const int len = 2 + static_cast<int>(rng() % 7);
        while (static_cast<int>(path.size()) < len && ball.is_interior(path.back())) {
            std::vector<std::size_t> next;
            for (const auto& a : ball.arcs(path.back()))
                if (chain.contains(a.target))
                    next.push_back(a.target);
            if (next.empty())
                break;
            path.push_back(next[rng() % next.size()]);
        }
        const double lhs = chain_path_probability(chain, path) * chain.h(path.front());
        const double rhs = path_probability(ball, path) * chain.h(path.back());
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300));
        ++paths;
    }
    detail = std::to_string(paths) + " random paths, relative error";
    return worst;
}

double path_reversal_check(Context& ctx, std::string& detail) {
    // Exhausted finite networks use the whole network, otherwise the killed ball.
    auto ball = ctx.ball;
    if (auto ecc = eccentricity(ctx.source, 1000); ecc && static_cast<std::size_t>(*ecc) < 1000)
        if (auto whole = bounded_ball(ctx.source, *ecc + 1, ctx.config.max_ball))
            ball = whole;
    const auto targets = interior_targets(*ball, 50);
    double worst = 0.0;
    for (std::size_t v : targets) {
        const auto r = path_reversal(ball, v, ctx.config.tol);
        worst = std::max(worst, std::abs(r.from_root - r.from_target));
    }
    detail = std::to_string(targets.size()) + " targets" + (ball->exhausted() ? ", exhausted" : ", killed ball");
    return worst;
}

struct MinimaxTable {
    std::map<std::pair<int, int>, MinimaxResult> results;  // (R, r)
    double worst_gap = 0.0;
    std::size_t skipped = 0;
};

MinimaxTable minimax_table(Context& ctx) {
    MinimaxTable table;
    std::map<int, std::vector<int>> by_outer;
    for (int r : ctx.config.minimax_radii)
        for (int R : {2 * r, 4 * r})
            by_outer[R].push_back(r);
    for (const auto& [R, rs] : by_outer) {
        auto ball = bounded_ball(ctx.source, R, ctx.config.max_ball);
        if (!ball) {
            table.skipped += rs.size();
            ctx.report.warnings.push_back("minimax ball R=" + std::to_string(R) + " exceeds " +
                                          std::to_string(ctx.config.max_ball) + " vertices; skipped");
            continue;
        }
        if (ball->exhausted() || ball->layer(*std::min_element(rs.begin(), rs.end())).empty())
            continue;
        GreenOperator op(ball, SphereBoundary::Absorbing, ctx.config.tol);
        for (int r : rs) {
            if (ball->layer(r).empty())
                continue;
            auto res = solve_minimax(op, r);
            table.worst_gap = std::max(table.worst_gap, res.gap / std::max(1.0, res.value));
            table.results.emplace(std::make_pair(R, r), std::move(res));
        }
    }
    return table;
}

double monotonicity(Context& ctx, const MinimaxTable& table, std::string& detail) {
    std::size_t violations = 0, comparisons = 0;
    double worst = 0.0;
    auto record = [&](double earlier, double later) {
        ++comparisons;
        const double drop = earlier - later;
        if (drop > kMonotoneSlack)
            ++violations;
        worst = std::max(worst, drop);
    };
    // M_R(r) non-decreasing in r at fixed R, non-increasing in R at fixed r.
    for (auto it = table.results.begin(); it != table.results.end(); ++it) {
        auto next = std::next(it);
        if (next != table.results.end() && next->first.first == it->first.first)
            record(it->second.value, next->second.value);
    }
    std::map<int, std::vector<double>> by_inner;
    for (const auto& [key, res] : table.results)
        by_inner[key.second].push_back(res.value);
    for (const auto& [r, values] : by_inner)
        for (std::size_t k = 1; k < values.size(); ++k)
            record(values[k], values[k - 1]);

    // g^(R)(x,y) and R_eff(R) non-decreasing in R.
    std::vector<std::pair<VertexId, VertexId>> pairs;
    for (std::size_t x : interior_targets(*ctx.ball, 3))
        for (std::size_t y : interior_targets(*ctx.ball, 3))
            pairs.emplace_back(ctx.ball->label(x), ctx.ball->label(y));
    std::vector<double> previous(pairs.size(), 0.0);
    double previous_reff = 0.0;
    for (int R = 1; R <= 4 * ctx.config.radius; R *= 2) {
        auto ball = bounded_ball(ctx.source, R, ctx.config.max_ball);
        if (!ball)
            break;
        if (!ball->exhausted()) {
            const double reff = effective_resistance(ball, ctx.config.tol);
            record(previous_reff, reff);
            previous_reff = reff;
        }
        GreenOperator op(ball, SphereBoundary::Absorbing, ctx.config.tol);
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const auto x = ball->find(pairs[k].first), y = ball->find(pairs[k].second);
            double g = 0.0;
            if (x && y && !op.system().is_killed(*y))
                g = op.density(*x, *y);
            record(previous[k], g);
            previous[k] = g;
        }
        if (ball->exhausted())
            break;
    }
    detail = std::to_string(violations) + " violations in " + std::to_string(comparisons) +
             " comparisons (largest drop " + format_number(worst) + ")";
    return static_cast<double>(violations);
}

double reversal_inequality(Context& ctx, std::string& detail) {
    const Ball& ball = *ctx.ball;
    const int depth = std::min(4, ball.radius() - 1);
    if (depth < 2) {
        detail = "ball too shallow; nothing to check";
        return 0.0;
    }
    GreenOperator op(ctx.ball, SphereBoundary::Absorbing, ctx.config.tol);
    auto layer = ball.layer(depth);
    if (layer.size() > 10)
        layer.resize(10);
    std::size_t cases = 0, violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t v : layer)
        for (int ell = 1; ell < std::min(depth, 4); ++ell)
            for (double m : {0.5, 1.0, 2.0, 4.0, 8.0}) {
                ReversalBound b;
                try {
                    b = reversal_bound_check(op, *ctx.h, v, m, ell);
                } catch (const Error& e) {
                    if (e.code() == Errc::PathSpaceTooLarge)
                        continue;
                    throw;
                }
                ++cases;
                if (!b.pass)
                    ++violations;
                worst = std::max(worst, b.probability - b.bound);
            }
    detail = std::to_string(violations) + " violations in " + std::to_string(cases) +
             " cases (max excess " + format_number(worst) + ")";
    return static_cast<double>(violations);
}

void conditioning_warnings(Context& ctx) {
    const Ball& ball = *ctx.ball;
    std::size_t flagged = 0;
    double smallest = 1.0;
    for (std::size_t x = 0; x < ball.size(); ++x) {
        double local = 0.0;
        for (const auto& a : ball.arcs(x))
            local = std::max(local, a.conductance);
        for (const auto& a : ball.arcs(x))
            if (a.conductance < 1e-6 * local) {
                ++flagged;
                smallest = std::min(smallest, a.conductance / local);
            }
    }
    if (flagged)
        ctx.report.warnings.push_back("conditioning: " + std::to_string(flagged / 2 + flagged % 2) +
                                      " edge(s) below 1e-6 of the local maximum conductance (ratio " +
                                      format_number(smallest) + ")");
}

} // namespace

ConformanceReport verify_suite(const NetworkSource& source, const VerifyConfig& config) {
    ConformanceReport report;
    report.network_hash = source.content_hash();
    Context ctx{source, config, report, nullptr, nullptr};

    int radius = config.radius;
    if (auto ecc = eccentricity(source, config.radius); ecc)
        radius = std::max(1, std::min(radius, *ecc));
    ctx.ball = bounded_ball(source, radius, config.max_ball);
    while (!ctx.ball && radius > 1)
        ctx.ball = bounded_ball(source, --radius, config.max_ball);
    if (radius != config.radius)
        report.warnings.push_back("identity ball radius reduced to " + std::to_string(radius));
    conditioning_warnings(ctx);
    ctx.h = std::make_unique<PotentialOnBall>(ball_potential(ctx.ball, config.tol));

    const Tolerances& tol = config.tol;
    run(report, "green_symmetry", tol.identity, [&](std::string& d) { return green_symmetry(ctx, d); });
    run(report, "dipole_laplacian", tol.identity, [&](std::string& d) { return dipole_laplacian(ctx, d); });

    std::unique_ptr<HTransformChain> chain;
    std::unique_ptr<HGreen> hgreen;
    HGreen::Summary summary;
    auto doob_summary = [&]() -> const HGreen::Summary& {
        if (!hgreen) {
            chain = std::make_unique<HTransformChain>(*ctx.h, SphereBoundary::Reflecting, tol);
            hgreen = std::make_unique<HGreen>(*chain);
            summary = hgreen->check_all();
        }
        return summary;
    };
    run(report, "h_green_pairs", tol.identity, [&](std::string& d) {
        const auto& s = doob_summary();
        d = std::to_string(s.pairs) + " pairs";
        return s.pairs_error;
    });
    run(report, "h_green_initial", tol.identity, [&](std::string& d) {
        const auto& s = doob_summary();
        d = "all interior states";
        return s.initial_error;
    });
    run(report, "telescoping", 1e-12, [&](std::string& d) { return telescoping(ctx, d); });
    run(report, "path_reversal", tol.identity, [&](std::string& d) { return path_reversal_check(ctx, d); });

    std::unique_ptr<MinimaxTable> table;
    run(report, "duality_gap", tol.lp_gap, [&](std::string& d) {
        table = std::make_unique<MinimaxTable>(minimax_table(ctx));
        d = std::to_string(table->results.size()) + " (r,R) pairs, relative gap";
        if (table->skipped)
            d += ", " + std::to_string(table->skipped) + " skipped";
        return table->worst_gap;
    });
    run(report, "monotonicity", 0.0, [&](std::string& d) {
        if (!table)
            throw Error(Errc::InvalidArgument, "minimax table unavailable");
        return monotonicity(ctx, *table, d);
    });
    run(report, "reversal_inequality", 0.0, [&](std::string& d) { return reversal_inequality(ctx, d); });

    report.passed = std::all_of(report.checks.begin(), report.checks.end(),
                                [](const CheckResult& c) { return c.passed; });
    return report;
}

nlohmann::json ConformanceReport::to_json() const {
    nlohmann::json out = {{"network_hash", network_hash}, {"passed", passed}, {"warnings", warnings}};
    out["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
        out["checks"].push_back({{"name", c.name},
                                 {"status", c.passed ? "pass" : "fail"},
                                 {"measured", std::isnan(c.measured) ? nlohmann::json(nullptr)
                                                                     : nlohmann::json(c.measured)},
                                 {"tolerance", c.tolerance},
                                 {"runtime_s", c.runtime_s},
                                 {"detail", c.detail}});
    return out;
}

std::string ConformanceReport::table() const {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-20s %-6s %-12s %-12s %-9s %s\n", "check", "status", "measured",
                  "tolerance", "time[s]", "detail");
    out << line;
    std::size_t passes = 0;
    for (const auto& c : checks) {
        passes += c.passed;
        std::snprintf(line, sizeof line, "%-20s %-6s %-12.3e %-12.3e %-9.3f %s\n", c.name.c_str(),
                      c.passed ? "pass" : "FAIL", c.measured, c.tolerance, c.runtime_s, c.detail.c_str());
        out << line;
    }
    for (const auto& w : warnings)
        out << "warning: " << w << '\n';
    out << passes << "/" << checks.size() << " check groups pass\n";
    return out.str();
}

} // namespace netpot
