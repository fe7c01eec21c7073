#include <doctest.h>

#include "vgeo/catalog.hpp"
#include "vgeo/regularity.hpp"

#include <cmath>

using namespace vgeo;

TEST_CASE("super-regularity: parabola pair at eps = 1/3 reproduces the mirror witness") {
    SetOracle C = catalog("parabola-pair");
    RegularityVerdict v = check_super_regularity(C, Vec(Vec::Zero(2)), 1.0 / 3, 0.5);
    REQUIRE(v.violated());
    // first in-radius violating member of the family is k = 3
    CHECK(v.wx(0) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(v.lhs == doctest::Approx(2.0 / 9).epsilon(1e-13));
    CHECK(v.rhs == doctest::Approx(2.0 * std::sqrt(13.0) / 81).epsilon(1e-13));
    // re-evaluating the witness reproduces the strict inequality
    const double lhs = v.wv.dot(v.wxp - v.wx);
    const double rhs = v.eps * v.wv.norm() * (v.wxp - v.wx).norm();
    CHECK(lhs > rhs * (1 + 1e-9));
}

TEST_CASE("super-regularity: convex sets never violate") {
    SetOracle C = catalog("unit-ball");
    RegularityVerdict v = check_super_regularity(C, vec2(1, 0), 0.05, 0.3);
    CHECK(!v.violated());
    CHECK(v.samples > 0);
}

TEST_CASE("super-regularity: circle at small scale passes eps = 0.1") {
    SetOracle C = catalog("unit-circle");
    RegularityVerdict v = check_super_regularity(C, vec2(1, 0), 0.1, 0.05);
    CHECK(!v.violated());
}

TEST_CASE("uag: sawtooth holds at the origin, quartic cross fails") {
    SetOracle saw = catalog("sawtooth-graph");
    std::vector<std::pair<Vec, Vec>> pairs;
    for (int k = 2; k <= 6; ++k)
        pairs.emplace_back(Vec(Vec::Zero(2)), vec2(std::ldexp(1.0, -k), 0.0));
    RegularityVerdict v = check_uag(saw, Vec(Vec::Zero(2)), 0.3, 0.3, {}, &pairs);
    CHECK(!v.violated());

    SetOracle qc = catalog("quartic-cross");
    const double t = 0.5;
    std::vector<std::pair<Vec, Vec>> qpairs = {{vec2(t * t, t), vec2(-t * t, t)}};
    RegularityVerdict vq = check_uag(qc, Vec(Vec::Zero(2)), 0.5, 1.0, {}, &qpairs);
    CHECK(vq.violated());
}

TEST_CASE("uag: convex sets pass with the chord direction") {
    SetOracle C = catalog("halfplane");
    RegularityVerdict v = check_uag(C, Vec(Vec::Zero(2)), 0.1, 0.2);
    CHECK(!v.violated());
    CHECK(v.samples > 0);
}

TEST_CASE("intrinsic approximate convexity: parabola pair violated at eps = 1/2") {
    SetOracle C = catalog("parabola-pair");
    RegularityVerdict v = check_intrinsic_approx_convexity(C, Vec(Vec::Zero(2)), 0.5, 0.2);
    REQUIRE(v.violated());
    // witness re-evaluates: midpoint of a mirror pair sits ~a^2 off the set
    const Vec line = (1 - v.wt) * v.wx + v.wt * v.wxp;
    const double dist = (line - C.project_one(line)).norm();
    CHECK(dist > v.rhs * (1 + 1e-9));
}

TEST_CASE("intrinsic approximate convexity: convex and sawtooth epigraphs pass") {
    RegularityVerdict v1 =
        check_intrinsic_approx_convexity(catalog("unit-ball"), vec2(1, 0), 0.05, 0.2);
    CHECK(!v1.violated());
    RegularityVerdict v2 = check_intrinsic_approx_convexity(catalog("sawtooth-epigraph"),
                                                            Vec(Vec::Zero(2)), 0.25, 1.0 / 16);
    CHECK(!v2.violated());
}

TEST_CASE("function approximate convexity") {
    CheckOptions opts;
    opts.samples = 400;
    SUBCASE("convex functions pass at eps = 0") {
        RegularityVerdict v = check_function_approx_convexity(parse_expr("x1^2"),
                                                              Vec(Vec::Zero(1)), 0.0, 0.5, opts);
        CHECK(!v.violated());
    }
    SUBCASE("-|x| is violated at eps = 1") {
        RegularityVerdict v = check_function_approx_convexity(parse_expr("-abs(x1)"),
                                                              Vec(Vec::Zero(1)), 1.0, 0.5, opts);
        REQUIRE(v.violated());
        // witness carries both sides of the inequality
        CHECK(v.lhs > v.rhs);
    }
    SUBCASE("sawtooth passes once the radius matches eps") {
        // teeth below radius r have slopes at most 2r
        auto saw = [](const Vec& u) { return sawtooth(u(0)); };
        RegularityVerdict v = check_function_approx_convexity(saw, Vec(Vec::Zero(1)), 0.5,
                                                              1.0 / 16, opts);
        CHECK(!v.violated());
        RegularityVerdict v2 = check_function_approx_convexity(saw, Vec(Vec::Zero(1)), 0.125,
                                                               1.0 / 64, opts);
        CHECK(!v2.violated());
    }
}

TEST_CASE("prox-regularity probe: power32 violated at the cusp, band and ball clean") {
    RegularityVerdict v1 = probe_prox_regularity(catalog("power32-graph"), Vec(Vec::Zero(2)),
                                                 0.15, 12);
    REQUIRE(v1.violated());
    // witness projections are mirror images
    CHECK(v1.wxp(0) == doctest::Approx(-v1.wv(0)).epsilon(1e-4));

    RegularityVerdict v2 = probe_prox_regularity(catalog("parabola-band"), Vec(Vec::Zero(2)),
                                                 0.2, 10);
    CHECK(!v2.violated());

    RegularityVerdict v3 = probe_prox_regularity(catalog("unit-ball"), Vec(Vec::Zero(2)), 0.4, 8);
    CHECK(!v3.violated());
}

TEST_CASE("clarke verdicts from exact cones") {
    CHECK(!clarke_verdict_catalog("parabola-pair", vec2(0.3, 0.09)).violated());
    CHECK(!clarke_verdict_catalog("parabola-pair", Vec(Vec::Zero(2))).violated());
    // sawtooth apex (3/2^{k+2}, 1/2^{2k+2}) is not Clarke regular
    CHECK(clarke_verdict_catalog("sawtooth-graph", vec2(3.0 / 16, 1.0 / 64)).violated());
    CHECK(clarke_verdict_catalog("sawtooth-graph", vec2(3.0 / 8, 1.0 / 16)).violated());
    CHECK(!clarke_verdict_catalog("sawtooth-graph", vec2(0.3, sawtooth(0.3))).violated());
    CHECK(!clarke_verdict_catalog("halfplane", Vec(Vec::Zero(2))).violated());
    CHECK(!clarke_verdict_catalog("quartic-cross", Vec(Vec::Zero(2))).violated());
    CHECK_THROWS_AS(clarke_verdict_catalog("sawtooth-graph", vec2(0.3, 0.5)),
                    std::invalid_argument);
}

TEST_CASE("eps-path search: sawtooth candidates exceed 1/2, convex and circle pass") {
    SUBCASE("sawtooth") {
        SetOracle C = catalog("sawtooth-graph");
        std::vector<std::pair<Vec, Vec>> pairs;
        for (int k : {4, 5, 6}) pairs.emplace_back(Vec(Vec::Zero(2)), vec2(std::ldexp(1.0, -k), 0.0));
        RegularityVerdict v = search_eps_path_violation(C, Vec(Vec::Zero(2)), 0.5, pairs);
        CHECK(v.violated());
        CHECK(v.lhs > 0.5);
    }
    SUBCASE("convex") {
        SetOracle C = catalog("unit-ball");
        std::vector<std::pair<Vec, Vec>> pairs = {{vec2(-0.2, 0.1), vec2(0.3, -0.2)}};
        RegularityVerdict v = search_eps_path_violation(C, Vec(Vec::Zero(2)), 0.25, pairs);
        CHECK(!v.violated());
    }
    SUBCASE("circle small chord at eps = 0.05") {
        SetOracle C = catalog("unit-circle");
        const double th = 0.05;   // chord ~0.05, achieved ~0.025
        std::vector<std::pair<Vec, Vec>> pairs = {
            {vec2(1, 0), vec2(std::cos(th), std::sin(th))}};
        RegularityVerdict v = search_eps_path_violation(C, vec2(1, 0), 0.05, pairs);
        CHECK(!v.violated());
    }
}

TEST_CASE("corner-stop reparametrization basics") {
    // no corners: constant speed
    Polyline straight = {vec2(0, 0), vec2(0.5, 0), vec2(1, 0)};
    SampledCurve c = corner_stop_curve(straight, 257);
    for (int i = 0; i < c.size(); ++i) CHECK((c.deriv[i] - vec2(1, 0)).norm() < 1e-9);

    // one right-angle corner: speed dips to zero there
    Polyline bent = {vec2(0, 0), vec2(1, 0), vec2(1, 1)};
    SampledCurve b = corner_stop_curve(bent, 513);
    double vmin = 1e9;
    for (const auto& d : b.deriv) vmin = std::min(vmin, d.norm());
    CHECK(vmin < 1e-6);
}

TEST_CASE("verdicts are deterministic given the seed") {
    SetOracle C = catalog("parabola-pair");
    CheckOptions opts;
    opts.seed = 123;
    RegularityVerdict a = check_intrinsic_approx_convexity(C, Vec(Vec::Zero(2)), 0.5, 0.2, opts);
    RegularityVerdict b = check_intrinsic_approx_convexity(C, Vec(Vec::Zero(2)), 0.5, 0.2, opts);
    CHECK(a.violated() == b.violated());
    CHECK(a.margin_min == b.margin_min);
    CHECK(a.samples == b.samples);
}

TEST_CASE("hierarchy consistency: eps-path success implies the weaker properties hold") {
    // on the circle at a small scale every tested eps admits a path, so UAG,
    // super-regularity and intrinsic approximate convexity must be clean
    SetOracle C = catalog("unit-circle");
    const Vec base = vec2(1, 0);
    const double r = 0.02;
    std::vector<std::pair<Vec, Vec>> pairs;
    for (const Vec& m : C.sample_near(base, r, 6, 5))
        if ((m - base).norm() > 1e-9) pairs.emplace_back(base, m);
    bool all_paths = true;
    for (double eps : {0.5, 0.25}) {
        RegularityVerdict s = search_eps_path_violation(C, base, eps, pairs);
        all_paths = all_paths && !s.violated();
    }
    REQUIRE(all_paths);
    CHECK(!check_uag(C, base, 0.5, r).violated());
    CHECK(!check_super_regularity(C, base, 0.5, r).violated());
    CHECK(!check_intrinsic_approx_convexity(C, base, 0.5, r).violated());
}
