#include <doctest.h>

#include <cmath>

#include "netpot/ball.hpp"
#include "netpot/errors.hpp"
#include "netpot/network.hpp"
#include "netpot/solver.hpp"

using namespace netpot;

namespace {

NetworkSource line() { return generate(GeneratorSpec{}); }

NetworkSource grid() {
    GeneratorSpec s;
    s.kind = GeneratorKind::Grid2d;
    return generate(s);
}

std::size_t at(const Ball& b, long x) { return b.index_of(VertexId(std::to_string(x))); }

} // namespace

TEST_CASE("system dimensions") {
    auto lb = make_ball(line(), 4);
    DirichletSystem s(lb, {0});
    CHECK(s.free_size() == 6);
    auto gb = make_ball(grid(), 3);
    DirichletSystem g(gb, {0});
    CHECK(g.free_size() == 12);
}

TEST_CASE("root must be killed") {
    auto lb = make_ball(line(), 4);
    try {
        DirichletSystem s(lb, {at(*lb, 1)});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidArgument);
    }
}

TEST_CASE("linear boundary data") {
    auto b = make_ball(line(), 4);
    DirichletSystem s(b, {0});
    std::vector<double> src(b->size(), 0.0), bd(b->size(), 0.0);
    bd[at(*b, 4)] = 1.0;
    auto u = s.solve(src, bd);
    for (long x = -4; x <= 4; ++x)
        CHECK(u.values[at(*b, x)] == doctest::Approx(x > 0 ? x / 4.0 : 0.0).epsilon(1e-12));
    CHECK(u.residual < 1e-10);

    std::fill(bd.begin(), bd.end(), 0.0);
    auto zero = s.solve(src, bd);
    for (double v : zero.values)
        CHECK(v == 0.0);
}

TEST_CASE("unit source gives the interval Green function") {
    const long R = 4;
    auto b = make_ball(line(), R);
    DirichletSystem s(b, {0});
    std::vector<double> src(b->size(), 0.0), bd(b->size(), 0.0);
    src[at(*b, 1)] = 1.0;
    auto u = s.solve(src, bd);
    // G(x,1) = x(R-1)/R for 0 <= x <= 1, (R-x)/R for x >= 1; c_1 = 2
    for (long x = 0; x <= R; ++x) {
        double g = std::min(x, 1L) * (R - std::max(x, 1L)) / double(R);
        CHECK(u.values[at(*b, x)] == doctest::Approx(g).epsilon(1e-12));
    }
}

TEST_CASE("harmonic measure on the line") {
    auto b = make_ball(line(), 4);
    DirichletSystem s(b, {0});
    auto hm = harmonic_measure(s);
    auto col = [&](long w) {
        for (std::size_t k = 0; k < hm.columns.size(); ++k)
            if (hm.columns[k] == at(*b, w))
                return k;
        FAIL("missing column");
        return std::size_t(0);
    };
    auto row = [&](long x) {
        for (std::size_t k = 0; k < hm.rows.size(); ++k)
            if (hm.rows[k] == at(*b, x))
                return k;
        FAIL("missing row");
        return std::size_t(0);
    };
    CHECK(hm.values(row(2), col(4)) == doctest::Approx(0.5));
    CHECK(hm.values(row(2), col(-4)) == doctest::Approx(0.0));
    CHECK(hm.values(row(1), col(4)) == doctest::Approx(0.25));
}

TEST_CASE("harmonic measure conserves probability") {
    auto b = make_ball(grid(), 4);
    DirichletSystem s(b, {0});
    auto hm = harmonic_measure(s);
    // hit the sphere or the root: row sums plus P(root first) = 1
    std::vector<double> src(b->size(), 0.0), bd(b->size(), 0.0);
    bd[0] = 1.0;
    auto to_root = s.solve(src, bd);
    for (std::size_t k = 0; k < hm.rows.size(); ++k) {
        double total = hm.values.row(k).sum() + to_root.values[hm.rows[k]];
        if (hm.rows[k] != 0)
            CHECK(std::abs(total - 1.0) < 1e-10);
    }
}

TEST_CASE("effective resistance") {
    for (int R : {1, 3, 8, 20})
        CHECK(effective_resistance(line(), R) == doctest::Approx(R / 2.0).epsilon(1e-10));

    double prev = 0.0;
    for (int R : {2, 4, 8}) {
        double r = effective_resistance(grid(), R);
        CHECK(r >= prev);
        prev = r;
    }

    auto path = build_network({{VertexId("0"), VertexId("1"), 1.0}}, VertexId("0"));
    try {
        effective_resistance(path, 5);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ExhaustedBall);
    }
}

TEST_CASE("factorization is reused across right-hand sides") {
    auto b = make_ball(grid(), 6);
    DirichletSystem s(b, {0});
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(long(s.free_size()), 3);
    rhs(0, 0) = 1.0;
    rhs(5, 1) = 2.0;
    rhs(10, 2) = -1.0;
    double res = 1.0;
    auto sol = s.solve_free(rhs, &res);
    CHECK(res < 1e-10);
    // linearity across columns
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(long(s.free_size()), 1);
    sum.col(0) = rhs.col(0) + rhs.col(1) + rhs.col(2);
    auto joint = s.solve_free(sum);
    CHECK((joint.col(0) - sol.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-12);
}
