#include <doctest.h>

#include <cmath>

#include "netpot/ball.hpp"
#include "netpot/doob.hpp"
#include "netpot/errors.hpp"
#include "netpot/network.hpp"
#include "netpot/reference.hpp"

using namespace netpot;

namespace {

NetworkSource line() { return generate(GeneratorSpec{}); }

VertexId n(long x) { return VertexId(std::to_string(x)); }

double prob(const HTransformChain& c, std::size_t x, std::size_t y) {
    for (const auto& t : c.transitions(x))
        if (t.target == y)
            return t.probability;
    return 0.0;
}

} // namespace

TEST_CASE("transition probabilities of the positive-part transform") {
    auto b = make_ball(line(), 10);
    auto c = build_chain(line_positive_part(b));
    auto at = [&](long x) { return b->index_of(n(x)); };
    CHECK(prob(c, at(1), at(2)) == doctest::Approx(1.0));
    CHECK(prob(c, at(1), at(0)) == 0.0);
    for (long x = 2; x < 10; ++x) {
        CHECK(prob(c, at(x), at(x + 1)) == doctest::Approx((x + 1) / (2.0 * x)));
        CHECK(prob(c, at(x), at(x - 1)) == doctest::Approx((x - 1) / (2.0 * x)));
    }
    CHECK_FALSE(c.contains(at(-1)));
    CHECK(c.max_row_defect() < 1e-14);
    REQUIRE(c.initial().size() == 1);
    CHECK(c.initial()[0].first == at(1));
    CHECK(c.initial()[0].second == doctest::Approx(1.0));
    CHECK(c.initial_mass() == doctest::Approx(1.0));
}

TEST_CASE("path probabilities under the transform") {
    auto b = make_ball(line(), 10);
    auto c = build_chain(line_positive_part(b));
    std::vector<std::size_t> p{b->index_of(n(1)), b->index_of(n(2)), b->index_of(n(3))};
    CHECK(chain_path_probability(c, p) == doctest::Approx(0.75));
    std::vector<std::size_t> q{b->index_of(n(1)), b->index_of(n(0))};
    CHECK(chain_path_probability(c, q) == 0.0);
}

TEST_CASE("transformed Green function identities") {
    auto b = make_ball(line(), 8);
    auto c = build_chain(line_positive_part(b), SphereBoundary::Reflecting);
    HGreen g(c);
    auto id = g.check(b->index_of(n(2)), b->index_of(n(3)));
    CHECK(id.mu_transformed == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(id.mu_predicted == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(std::abs(id.transformed - id.predicted) < 1e-9);
    auto exact = h_green_exact(c, b->index_of(n(2)), b->index_of(n(3)));
    CHECK(exact.transformed == doctest::Approx(id.transformed));
    auto all = g.check_all();
    CHECK(all.pairs_error < 1e-9);
    CHECK(all.initial_error < 1e-9);

    try {
        g.check(b->index_of(n(2)), b->index_of(n(-3)));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NotInStateSpace);
    }
}

TEST_CASE("absorbing transform carries the sphere factor") {
    auto b = make_ball(line(), 8);
    auto c = build_chain(line_positive_part(b));
    HGreen g(c);
    auto id = g.check(b->index_of(n(2)), b->index_of(n(3)));
    // Z_3 = P_3(hit 0 before 8) = 5/8
    CHECK(id.mu_predicted == doctest::Approx(6.0 * 5.0 / 8.0));
    CHECK(std::abs(id.mu_transformed - id.mu_predicted) < 1e-9);
}

TEST_CASE("escape statistic") {
    auto b = make_ball(line(), 4);
    auto c = build_chain(line_positive_part(b));
    auto s = escape_statistic(c, b->index_of(n(1)), 2, 2.0, true);
    REQUIRE(s.exact);
    CHECK(*s.exact == doctest::Approx(0.75));

    auto big = make_ball(line(), 1100);
    auto cb = build_chain(line_positive_part(big));
    double prev = 0.0;
    for (long ell : {10, 100, 1000}) {
        auto e = escape_statistic(cb, big->index_of(n(1)), ell, 10.0, true);
        CHECK(*e.exact >= prev);
        prev = *e.exact;
    }
    CHECK(prev > 0.99);

    CHECK_THROWS_AS(escape_statistic(c, b->index_of(n(1)), 10, 2.0, true), Error);
}

TEST_CASE("monte carlo agrees with the exact value") {
    auto b = make_ball(line(), 200);
    auto c = build_chain(line_positive_part(b));
    auto s = escape_statistic(c, b->index_of(n(1)), 100, 10.0, true, McOptions{20000, 42});
    REQUIRE(s.mc);
    CHECK(s.mc->samples == 20000);
    CHECK(s.mc->rng == std::string(kMcStream));
    CHECK(std::abs(s.mc->estimate - *s.exact) < 3.0 * s.mc->std_error + 1e-12);
    CHECK(s.mc->ci_low <= s.mc->estimate);
    CHECK(s.mc->ci_high >= s.mc->estimate);
    auto again = escape_statistic(c, b->index_of(n(1)), 100, 10.0, false, McOptions{20000, 42});
    CHECK(again.mc->estimate == s.mc->estimate);
}

TEST_CASE("path enumeration") {
    auto b = make_ball(line(), 6);
    CHECK(enumerate_paths(*b, 1).size() == 2);
    CHECK(enumerate_paths(*b, 3).size() == 4);
    CHECK_THROWS_AS(enumerate_paths(*b, 12, 10), Error);
}

TEST_CASE("conditioned walk equals the transform on the line") {
    auto b = make_ball(line(), 12);
    GreenOperator op(b, SphereBoundary::Reflecting);
    auto h = line_positive_part(b);
    auto tv = conditioned_vs_hprocess(op, h, 3, {Measure{{b->index_of(n(6)), 1.0}}});
    CHECK(tv.tv[0] < 1e-12);
    for (long v : {2, 5, 9}) {
        auto one = conditioned_vs_hprocess(op, h, 1, {Measure{{b->index_of(n(v)), 1.0}}});
        CHECK(one.tv[0] < 1e-12);
    }
}

TEST_CASE("reversal bound on the line") {
    auto b = make_ball(line(), 12);
    GreenOperator op(b, SphereBoundary::Reflecting);
    auto h = line_positive_part(b);
    const auto v = b->index_of(n(6));
    auto r = reversal_bound_check(op, h, v, 2.0, 5);
    CHECK(r.probability == doctest::Approx(0.875).epsilon(1e-12));
    CHECK(r.bound == doctest::Approx(3.0));
    CHECK(r.pass);
    auto z = reversal_bound_check(op, h, v, 8.0, 5);
    CHECK(z.probability == 0.0);
    CHECK(z.bound == doctest::Approx(0.75));
    try {
        reversal_bound_check(op, h, v, 2.0, 6);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::EllTooLarge);
    }
}

TEST_CASE("escape fluxes agree under reversal") {
    auto net = random_network(42, 3);
    auto b = make_ball(net, *eccentricity(net, 1000) + 1);
    for (std::size_t v = 1; v < b->size(); v += 7) {
        auto r = path_reversal(b, v);
        CHECK(std::abs(r.from_root - r.from_target) < 1e-9);
    }
    auto lb = make_ball(line(), 8);
    auto r = path_reversal(lb, lb->index_of(n(3)));
    // both sides equal 2 (1/2)(1/3)
    CHECK(r.from_root == doctest::Approx(1.0 / 3.0));
    CHECK(r.from_target == doctest::Approx(r.from_root));
}

TEST_CASE("empty state space") {
    auto b = make_ball(line(), 4);
    PotentialOnBall zero(b, std::vector<double>(b->size(), 0.0), 0.0);
    try {
        build_chain(zero);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::EmptyStateSpace);
    }
}
