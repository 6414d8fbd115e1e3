// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "netpot/ball.hpp"
#include "netpot/doob.hpp"
#include "netpot/errors.hpp"
#include "netpot/escape.hpp"
#include "netpot/green.hpp"
#include "netpot/minimax.hpp"
#include "netpot/network.hpp"
#include "netpot/potential.hpp"
#include "netpot/reference.hpp"
#include "netpot/solver.hpp"
#include "netpot/verify.hpp"

using namespace netpot;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::set<int> failed;

void criterion(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double t = seconds_since(t0);
    const bool in_time = t <= budget_s;
    const bool pass = out.pass && in_time;
    if (!pass)
        failed.insert(id);
    std::printf("criterion %d %-28s %s  %s  [%.1fs / %.0fs]%s\n", id, name.c_str(), pass ? "PASS" : "FAIL",
                out.detail.c_str(), t, budget_s, in_time ? "" : " over budget");
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

NetworkSource make(GeneratorKind k) {
    GeneratorSpec s;
    s.kind = k;
    return generate(s);
}

NetworkSource tree() {
    GeneratorSpec s;
    s.kind = GeneratorKind::Tree;
    s.branching = 2;
    s.lambda = 0.5;
    return generate(s);
}

VertexId n(long x) { return VertexId(std::to_string(x)); }

double closed_form_green(long x, long y, long R) {
    if (x <= 0 || y <= 0)
        return 0.0;
    return double(std::min(x, y)) * double(R - std::max(x, y)) / double(R);
}

// Full test matrix: networks x r <= 16 x R in {2r, 4r}.
constexpr int kMaxInner = 16;
constexpr int kTreeMaxRadius = 12;

struct MatrixNetwork {
    std::string name;
    NetworkSource source;
    int max_radius;
};

struct Cell {
    double value;
    double gap;
};

struct NetworkResults {
    std::string name;
    std::map<std::pair<int, int>, Cell> minimax;  // (r, R)
    std::map<int, double> resistance;             // R -> R_eff, non-exhausted balls
    std::map<int, std::vector<double>> green;     // R -> g^(R) on fixed pairs
    std::size_t skipped = 0;
};

struct Matrix {
    std::vector<NetworkResults> results;
    double seconds = 0.0;
};

std::vector<MatrixNetwork> matrix_networks() {
    std::vector<MatrixNetwork> nets;
    nets.push_back({"line", make(GeneratorKind::Line), 4 * kMaxInner});
    nets.push_back({"grid2d", make(GeneratorKind::Grid2d), 4 * kMaxInner});
    nets.push_back({"tree(2,1/2)", tree(), kTreeMaxRadius});
    nets.push_back({"ladder", make(GeneratorKind::Ladder), 4 * kMaxInner});
    for (int k = 0; k < 20; ++k)
        nets.push_back({"random#" + std::to_string(k), random_network(42, k, 60), 4 * kMaxInner});
    return nets;
}

NetworkResults run_network(const MatrixNetwork& net) {
    NetworkResults res;
    res.name = net.name;
    std::map<int, std::vector<int>> by_outer;
    for (int r = 1; r <= kMaxInner; ++r)
        for (int R : {2 * r, 4 * r}) {
            if (R <= net.max_radius)
                by_outer[R].push_back(r);
            else
                ++res.skipped;
        }

    // fixed pairs among the root's neighbors, interior in every ball
    const auto small = make_ball(net.source, 1);
    std::vector<VertexId> probe;
    for (std::size_t i = 1; i < small->size() && probe.size() < 4; ++i)
        probe.push_back(small->label(i));

    for (auto& [R, rs] : by_outer) {
        auto ball = make_ball(net.source, R);
        GreenOperator op(ball);
        std::vector<double> g;
        for (const auto& x : probe)
            for (const auto& y : probe)
                g.push_back(op.density(x, y));
        res.green[R] = std::move(g);
        if (ball->exhausted()) {
            res.skipped += rs.size();
            continue;
        }
        res.resistance[R] = effective_resistance(ball);
        std::vector<int> usable;
        for (int r : rs) {
            if (ball->layer(r).empty())
                ++res.skipped;
            else
                usable.push_back(r);
        }
        if (usable.empty())
            continue;
        auto problems = make_minimax_problems(op, usable);
        for (std::size_t k = 0; k < usable.size(); ++k) {
            auto m = solve_minimax(op, problems[k]);
            res.minimax[{usable[k], R}] = {m.value, m.gap};
        }
    }
    return res;
}

const Matrix& matrix() {
    static const Matrix m = [] {
        Matrix out;
        const auto t0 = Clock::now();
        for (const auto& net : matrix_networks())
            out.results.push_back(run_network(net));
        out.seconds = seconds_since(t0);
        return out;
    }();
    return m;
}

Outcome line_closed_forms() {
    const long R = 16;
    GreenOperator op(make_ball(make(GeneratorKind::Line), R));
    double green_err = 0.0;
    for (long x = 0; x <= R; ++x)
        for (long y = 1; y < R; ++y)
            green_err = std::max(green_err, std::abs(op.density(n(x), n(y)) - closed_form_green(x, y, R)));
    double m_err = 0.0;
    for (int r : {1, 2, 4, 8, 16}) {
        auto m = solve_minimax(GreenOperator(make_ball(make(GeneratorKind::Line), 2 * r)), r);
        m_err = std::max(m_err, std::abs(m.value - r / 2.0));
    }
    return {green_err <= 1e-9 && m_err <= 1e-8,
            fmt("max|g - closed form| = %.2e (tol 1e-9), max|M - r/2| = %.2e (tol 1e-8)", green_err, m_err)};
}

Outcome duality() {
    const auto t0 = Clock::now();
    const auto& mx = matrix();
    double worst = 0.0;
    std::string where;
    std::size_t cells = 0, skipped = 0;
    for (const auto& net : mx.results) {
        skipped += net.skipped;
        for (const auto& [key, cell] : net.minimax) {
            ++cells;
            const double rel = cell.gap / std::max(1.0, std::abs(cell.value));
            if (rel >= worst) {
                worst = rel;
                where = net.name + fmt(" r=%d R=%d", key.first, key.second);
            }
        }
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-8,
            fmt("max gap/max(1,M) = %.2e at %s (tol 1e-8); %zu cells, %zu skipped; matrix %.1fs", worst,
                where.c_str(), cells, skipped, t)};
}

Outcome identities() {
    const std::vector<std::string> wanted{"green_symmetry", "dipole_laplacian", "h_green_pairs",
                                          "h_green_initial", "telescoping",    "path_reversal"};
    std::map<std::string, double> worst;
    bool ok = true;
    for (int k = 0; k < 20; ++k) {
        auto net = random_network(42, k, 60);
        auto rep = verify_suite(net);
        for (const auto& c : rep.checks) {
            if (std::find(wanted.begin(), wanted.end(), c.name) == wanted.end())
                continue;
            if (!(c.measured <= 1e-9))
                ok = false;
            worst[c.name] = std::max(worst[c.name], std::isnan(c.measured) ? INFINITY : c.measured);
        }
    }
    std::string detail;
    for (const auto& name : wanted) {
        if (!worst.count(name))
            ok = false;
        detail += fmt("%s %.1e, ", name.c_str(), worst[name]);
    }
    detail += "tol 1e-9, 20 networks";
    return {ok, detail};
}

Outcome grid_growth() {
    auto grid = make(GeneratorKind::Grid2d);
    std::vector<double> xs, ys;
    std::string vals;
    for (int r : {8, 16, 32, 64}) {
        auto m = solve_minimax(GreenOperator(make_ball(grid, 2 * r)), r);
        xs.push_back(std::log(double(r)));
        ys.push_back(m.value);
        vals += fmt("%.4f ", m.value);
    }
    const double k = double(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    return {slope >= 0.11 && slope <= 0.21,
            fmt("M = %sslope = %.4f in [0.11, 0.21] (1/2pi = %.4f)", vals.c_str(), slope, 1.0 / (2.0 * M_PI))};
}

Outcome monotonicity() {
    constexpr double slack = 1e-10;
    const auto& mx = matrix();
    std::size_t checks = 0, violations = 0, finite_violations = 0;
    std::string first;
    bool finite = false;
    auto note = [&](bool ok, const std::string& what) {
        ++checks;
        if (ok)
            return;
        if (violations++ == 0)
            first = what;
        if (finite)
            ++finite_violations;
    };
    for (const auto& net : mx.results) {
        finite = net.name.starts_with("random#");
        for (int rho : {2, 4}) {
            std::optional<double> prev;
            for (int r = 1; r <= kMaxInner; ++r) {
                auto it = net.minimax.find({r, rho * r});
                if (it == net.minimax.end())
                    continue;
                if (prev)
                    note(it->second.value >= *prev - slack, net.name + fmt(" M in r, rho=%d, r=%d", rho, r));
                prev = it->second.value;
            }
        }
        for (int r = 1; r <= kMaxInner; ++r) {
            auto a = net.minimax.find({r, 2 * r}), b = net.minimax.find({r, 4 * r});
            if (a != net.minimax.end() && b != net.minimax.end())
                note(b->second.value <= a->second.value + slack, net.name + fmt(" M in R, r=%d", r));
        }
        const std::vector<double>* prev_g = nullptr;
        for (const auto& [R, g] : net.green) {
            if (prev_g)
                for (std::size_t i = 0; i < g.size(); ++i)
                    note(g[i] >= (*prev_g)[i] - slack * std::max(1.0, (*prev_g)[i]),
                         net.name + fmt(" g in R, R=%d", R));
            prev_g = &g;
        }
        std::optional<double> prev_r;
        for (const auto& [R, reff] : net.resistance) {
            if (prev_r)
                note(reff >= *prev_r - slack, net.name + fmt(" R_eff in R, R=%d", R));
            prev_r = reff;
        }
    }
    return {violations == 0,
            fmt("%zu violations in %zu comparisons (slack 1e-10), %zu on random finite networks%s%s", violations,
                checks, finite_violations, violations ? "; first: " : "", first.c_str())};
}

Outcome escape_probability() {
    auto ball = make_ball(make(GeneratorKind::Line), 10010);
    auto chain = build_chain(line_positive_part(ball));
    const auto start = ball->index_of(n(1));
    std::vector<double> exact;
    std::optional<McEstimate> mc;
    for (long ell : {100L, 1000L, 10000L}) {
        auto s = escape_statistic(chain, start, ell, 10.0, true,
                                  ell == 10000 ? std::optional<McOptions>(McOptions{100000, 42}) : std::nullopt);
        exact.push_back(*s.exact);
        if (s.mc)
            mc = s.mc;
    }
    const bool monotone = exact[0] <= exact[1] && exact[1] <= exact[2];
    const double z = std::abs(mc->estimate - exact[2]) / mc->std_error;
    return {monotone && exact[2] > 0.9 && z < 3.0,
            fmt("exact %.5f, %.5f, %.5f; mc %.5f (se %.1e, %.2f sigma, %zu samples)", exact[0], exact[1], exact[2],
                mc->estimate, mc->std_error, z, mc->samples)};
}

Outcome reversal_inequality() {
    const std::vector<double> levels{0.5, 1, 2, 4, 8};
    std::size_t checks = 0, violations = 0;

    auto lball = make_ball(make(GeneratorKind::Line), 12);
    GreenOperator lop(lball, SphereBoundary::Reflecting);
    auto lh = line_positive_part(lball);
    for (long v = 3; v <= 6; ++v)
        for (int ell = 1; ell < v; ++ell)
            for (double M : levels) {
                auto r = reversal_bound_check(lop, lh, lball->index_of(n(v)), M, ell);
                ++checks;
                if (!(r.probability <= r.bound + 1e-12))
                    ++violations;
            }
    const double instance = reversal_bound_check(lop, lh, lball->index_of(n(6)), 2.0, 5).probability;

    auto grid = make(GeneratorKind::Grid2d);
    auto gball = make_ball(grid, 32);
    GreenOperator gop(gball);
    auto gh = grid_reference_potential(gball);
    for (auto v : gball->layer(4))
        for (int ell = 1; ell <= 3; ++ell)
            for (double M : levels) {
                auto r = reversal_bound_check(gop, gh, v, M, ell);
                ++checks;
                if (!(r.probability <= r.bound + 1e-12))
                    ++violations;
            }
    const bool exact = std::abs(instance - 14.0 / 16.0) <= 1e-12;
    return {violations == 0 && exact,
            fmt("%zu violations in %zu cases; line v=6 M=2 l=5 gives %.15f (14/16)", violations, checks, instance)};
}

Outcome conditioned_convergence() {
    auto lball = make_ball(make(GeneratorKind::Line), 12);
    GreenOperator lop(lball, SphereBoundary::Reflecting);
    auto lh = line_positive_part(lball);
    double line_tv = 0.0;
    for (long v = 2; v <= 8; ++v)
        for (int ell = 1; ell < v; ++ell) {
            auto rep = conditioned_vs_hprocess(lop, lh, ell, {Measure{{lball->index_of(n(v)), 1.0}}});
            line_tv = std::max(line_tv, rep.tv[0]);
        }

    auto grid = make(GeneratorKind::Grid2d);
    auto gh = grid_reference_potential(make_ball(grid, 8));
    std::vector<double> tv;
    for (int r : {4, 8, 16}) {
        GreenOperator op(make_ball(grid, 2 * r));
        auto m = solve_minimax(op, r);
        tv.push_back(conditioned_vs_hprocess(op, gh, 3, {m.eta.as_measure()}).tv[0]);
    }
    const bool decreasing = tv[0] > tv[1] && tv[1] > tv[2];
    return {line_tv <= 1e-12 && decreasing,
            fmt("line max TV %.1e (tol 1e-12); grid TV(r=4,8,16) = %.3e, %.3e, %.3e", line_tv, tv[0], tv[1], tv[2])};
}

Outcome line_construction() {
    const auto t0 = Clock::now();
    AutoScheduleRequest req;
    req.levels = {1, 2, 3, 4, 5};
    auto e = escape_construct(make(GeneratorKind::Line), req);
    bool ok = e.certificate.passed && e.certificate.entries.size() == 5;
    std::string radii;
    for (std::size_t k = 0; k < e.certificate.entries.size(); ++k) {
        const int nn = int(k) + 1;
        const int r = e.certificate.entries[k].radius;
        radii += std::to_string(r) + (k + 1 < e.certificate.entries.size() ? "," : "");
        ok = ok && r == nn * (1 << (nn + 1)) && e.certificate.entries[k].sphere_pass &&
             e.certificate.entries[k].window_pass;
    }
    // h(x) = (1 - 2^-5)|x|/2
    const double slope = (1.0 - 1.0 / 32.0) / 2.0;
    double h_err = 0.0;
    for (std::size_t i = 0; i < e.h.ball().size(); ++i)
        h_err = std::max(h_err, std::abs(e.h.value(i) - slope * std::abs(std::stod(e.h.ball().label(i).label()))));
    ok = ok && h_err <= 1e-9;
    std::string sizes;
    for (int m : {1, 2, 3}) {
        std::size_t predicted = 0;
        for (long x = -e.h.ball().radius(); x <= e.h.ball().radius(); ++x)
            if (slope * std::abs(double(x)) < m)
                ++predicted;
        std::vector<double> level{double(m)};
        const auto row = sublevel_report(e.h, level).front();
        ok = ok && row.count == predicted && row.window_complete;
        sizes += fmt("%zu/%zu ", row.count, predicted);
    }
    const double line_s = seconds_since(t0);
    ok = ok && line_s < 30.0;

    std::string grid_detail;
    try {
        AutoScheduleRequest greq;
        greq.levels = {1, 2, 3, 4, 5};
        greq.r_max = 1000;
        escape_construct(make(GeneratorKind::Grid2d), greq);
        ok = false;
        grid_detail = "grid2d schedule unexpectedly feasible";
    } catch (const ScheduleInfeasibleError& err) {
        grid_detail = fmt("grid2d r_max=1000 infeasible at n=%d, target %.3g, achievable level %.4f", err.n(),
                          err.target(), err.achievable_level());
    }
    return {ok, fmt("line r_n = %s, window %d, certificate %s, |h - 31|x|/64| = %.1e, sizes %s(%.1fs); %s",
                    radii.c_str(), e.certificate.window_radius, e.certificate.passed ? "passed" : "failed", h_err,
                    sizes.c_str(), line_s, grid_detail.c_str())};
}

} // namespace

int main(int argc, char** argv) {
    // --expect-fail 5,7 marks criteria known to fail; the exit status is then
    // zero only if exactly that set fails.
    std::set<int> expected;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--expect-fail") {
            std::string list = argv[++i];
            for (std::size_t pos = 0; pos < list.size();) {
                std::size_t end = list.find(',', pos);
                if (end == std::string::npos)
                    end = list.size();
                expected.insert(std::stoi(list.substr(pos, end - pos)));
                pos = end + 1;
            }
        }

    criterion(1, "line closed forms", 5, line_closed_forms);
    criterion(2, "duality certification", 120, duality);
    criterion(3, "identity suite", 60, identities);
    criterion(4, "grid logarithmic growth", 300, grid_growth);
    criterion(5, "monotonicity battery", 120, monotonicity);
    criterion(6, "h-process escape", 60, escape_probability);
    criterion(7, "reversal inequality", 60, reversal_inequality);
    criterion(8, "conditioned convergence", 120, conditioned_convergence);
    criterion(9, "escape construction", 120, line_construction);

    std::string list;
    for (int id : failed)
        list += (list.empty() ? "" : ",") + std::to_string(id);
    std::printf("%zu of 9 criteria failed%s%s\n", failed.size(), list.empty() ? "" : ": ", list.c_str());
    if (!expected.empty()) {
        const bool match = failed == expected;
        std::printf("expected failures %s\n", match ? "match" : "DO NOT match");
        return match ? 0 : 1;
    }
    return failed.empty() ? 0 : 1;
}
