#include <doctest.h>

#include <cmath>

#include "netpot/ball.hpp"
#include "netpot/errors.hpp"
#include "netpot/minimax.hpp"
#include "netpot/network.hpp"
#include "netpot/simplex.hpp"
#include "netpot/solver.hpp"

using namespace netpot;

namespace {

NetworkSource make(GeneratorKind k) {
    GeneratorSpec s;
    s.kind = k;
    return generate(s);
}

VertexId n(long x) { return VertexId(std::to_string(x)); }

} // namespace

TEST_CASE("simplex on a small LP") {
    LinearProgram lp;
    lp.A.resize(2, 2);
    lp.A << 1, 2, 3, 1;
    lp.b.resize(2);
    lp.b << 4, 6;
    lp.c.resize(2);
    lp.c << 1, 1;
    auto r = solve_lp(lp);
    CHECK(r.x(0) == doctest::Approx(1.6));
    CHECK(r.x(1) == doctest::Approx(1.2));
    CHECK(r.primal == doctest::Approx(2.8));
    CHECK(r.dual == doctest::Approx(2.8));
    CHECK(r.y(0) == doctest::Approx(0.4));
    CHECK(r.y(1) == doctest::Approx(0.2));
}

TEST_CASE("simplex degenerate and unbounded") {
    LinearProgram lp;
    lp.A.resize(3, 2);
    lp.A << 1, 1, 1, -1, 0, 1;
    lp.b.resize(3);
    lp.b << 2, 0, 1;
    lp.c.resize(2);
    lp.c << 1, 1;
    auto r = solve_lp(lp);
    CHECK(r.primal == doctest::Approx(2.0));
    CHECK(std::abs(r.primal - r.dual) < 1e-12);

    LinearProgram ub;
    ub.A.resize(1, 2);
    ub.A << 1, -1;
    ub.b.resize(1);
    ub.b << 1;
    ub.c.resize(2);
    ub.c << 0, 1;
    try {
        solve_lp(ub);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::Unbounded);
    }
}

TEST_CASE("alpha weights on the line") {
    GreenOperator op(make_ball(make(GeneratorKind::Line), 4));
    auto a = alpha_weights(op);
    REQUIRE(a.alpha.size() == 2);
    CHECK(a.alpha[0] == doctest::Approx(0.25));
    CHECK(a.alpha[1] == doctest::Approx(0.25));
    CHECK(a.total == doctest::Approx(0.5));
    CHECK(a.escape_flux == doctest::Approx(0.5));
    CHECK(a.dropped.empty());
}

TEST_CASE("normalized sphere potentials have unit root mass") {
    auto ball = make_ball(make(GeneratorKind::Grid2d), 4);
    GreenOperator op(ball);
    auto a = alpha_weights(op);
    const auto& hm = op.harmonic_measure();
    std::vector<double> psi(ball->size());
    for (std::size_t k = 0; k < a.columns.size(); ++k) {
        std::size_t col = 0;
        while (hm.columns[col] != a.columns[k])
            ++col;
        for (std::size_t r = 0; r < hm.rows.size(); ++r)
            psi[hm.rows[r]] = hm.values(long(r), long(col)) / a.alpha[k];
        CHECK(std::abs(laplacian_apply(*ball, psi, std::size_t(0)) - 1.0) < 1e-9);
    }
}

TEST_CASE("minimax values on the line") {
    auto line = make(GeneratorKind::Line);
    auto m = solve_minimax(GreenOperator(make_ball(line, 4)), 2);
    CHECK(m.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.gap < 1e-8);
    CHECK(m.certified);
    for (long x = -4; x <= 4; ++x)
        CHECK(m.psi->value(n(x)) == doctest::Approx(std::abs(x) / 2.0).epsilon(1e-10));
    REQUIRE(m.eta.support.size() == 2);
    CHECK(m.eta.weights[0] == doctest::Approx(0.5));
    CHECK(m.eta.weights[1] == doctest::Approx(0.5));
    CHECK(pairing(*m.psi, m.eta) == doctest::Approx(1.0));

    CHECK(solve_minimax(GreenOperator(make_ball(line, 4)), 1).value == doctest::Approx(0.5));
    CHECK(solve_minimax(GreenOperator(make_ball(line, 8)), 2).value == doctest::Approx(1.0));
}

TEST_CASE("m curve on the line") {
    auto line = make(GeneratorKind::Line);
    auto c = m_curve(line, {2, 4, 8}, 2.0);
    REQUIRE(c.rows.size() == 3);
    for (const auto& row : c.rows) {
        CHECK(row.R == 2 * row.r);
        CHECK(row.value == doctest::Approx(row.r / 2.0).epsilon(1e-10));
    }
    CHECK(c.monotone);
    for (int R : {8, 16, 32})
        CHECK(solve_minimax(GreenOperator(make_ball(line, R)), 4).value ==
              doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("minimax on the grid") {
    auto grid = make(GeneratorKind::Grid2d);
    double prev = 0.0;
    for (int r : {2, 4, 8}) {
        auto m = solve_minimax(GreenOperator(make_ball(grid, 2 * r)), r);
        CHECK(m.gap <= 1e-8 * std::max(1.0, m.value));
        CHECK(m.value > prev);
        // bounded by the resistance to the inner sphere
        CHECK(m.value <= effective_resistance(grid, r) + 1e-9);
        CHECK(m.psi->validation().valid);
        prev = m.value;
    }
}

TEST_CASE("dead sphere vertices force value zero") {
    // a pendant vertex at distance 1 cannot reach the outer sphere
    auto net = build_network({{VertexId("o"), VertexId("p"), 1.0},
                              {VertexId("o"), VertexId("a"), 1.0},
                              {VertexId("a"), VertexId("b"), 1.0},
                              {VertexId("b"), VertexId("c"), 1.0}},
                             VertexId("o"));
    GreenOperator op(make_ball(net, 3));
    auto m = solve_minimax(op, 1);
    CHECK(m.value == 0.0);
    CHECK(m.eta.total() == doctest::Approx(1.0));
    for (std::size_t k = 0; k < m.eta.support.size(); ++k)
        if (m.eta.weights[k] > 0.0)
            CHECK(op.ball().label(m.eta.support[k]).label() == "p");
}

TEST_CASE("inner radius must be inside the ball") {
    GreenOperator op(make_ball(make(GeneratorKind::Line), 4));
    CHECK_THROWS_AS(solve_minimax(op, 4), Error);
    CHECK_THROWS_AS(solve_minimax(op, 0), Error);
}
