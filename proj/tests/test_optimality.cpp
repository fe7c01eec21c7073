#include <doctest.h>

#include "vgeo/catalog.hpp"
#include "vgeo/optimality.hpp"

#include <cmath>

using namespace vgeo;

TEST_CASE("check_first_order: f = y on the epigraph of |x| holds at the corner") {
    SetOracle C = catalog("epigraph:abs(x1)");
    FirstOrderResult r = check_first_order(parse_expr("x2"), C, Vec(Vec::Zero(2)));
    CHECK(r.holds);
    CHECK(r.directions_tested > 0);
}

TEST_CASE("check_first_order: f = x1 on the power32 graph fails toward (-1, 0)") {
    SetOracle C = catalog("power32-graph");
    AmenableRep rep = amenable_rep("power32-graph", Vec(Vec::Zero(2)));
    FirstOrderResult r = check_first_order(parse_expr("x1"), C, Vec(Vec::Zero(2)), {}, &rep);
    REQUIRE(!r.holds);
    CHECK(r.worst_slope == doctest::Approx(-1.0).epsilon(1e-3));
    CHECK(r.worst_direction(0) < -0.999);
    CHECK(std::abs(r.worst_direction(1)) < 1e-3);
}

TEST_CASE("check_first_order: symmetric objective on the circle is stationary at (1,0)") {
    SetOracle C = catalog("unit-circle");
    AmenableRep rep = amenable_rep("unit-circle", vec2(1, 0));
    FirstOrderResult r = check_first_order(parse_expr("x1^2 + x2^2"), C, vec2(1, 0), {}, &rep);
    CHECK(r.holds);
}

TEST_CASE("descent_path: power32 with objective x1 descends at unit rate") {
    SetOracle C = catalog("power32-graph");
    AmenableRep rep = amenable_rep("power32-graph", Vec(Vec::Zero(2)));
    DescentReport d = descent_path(parse_expr("x1"), C, Vec(Vec::Zero(2)), {}, &rep);
    CHECK(d.measured_slope <= -0.5);
    CHECK(d.t_star > 0);
    // curve feasible, objective strictly decreasing up to t*
    for (int i = 0; i < d.curve.size(); ++i) CHECK(C.membership(d.curve.points[i], 1e-6));
    for (int i = 1; i < d.curve.size() && d.curve.grid(i) <= d.t_star; ++i)
        CHECK(d.objective_values[i] < d.objective_values[0]);
    CHECK(d.eps_used == doctest::Approx(0.5).epsilon(1e-6));
    // proof-shaped slope bound, flat case
    CHECK(d.measured_slope <=
          d.predicted_slope + 2 * d.eps_used * d.gradient.norm() + 0.05);
}

TEST_CASE("descent_path: epigraph boundary slope matches -2/sqrt(5)") {
    SetOracle C = catalog("parabola-epigraph");
    AmenableRep rep = amenable_rep("parabola-epigraph", vec2(1, 1));
    FirstOrderOptions opts;
    DescentReport d = descent_path(parse_expr("x2"), C, vec2(1, 1), opts, &rep, 1.0 / 1024);
    CHECK(d.measured_slope == doctest::Approx(-2.0 / std::sqrt(5.0)).epsilon(1e-3));
    CHECK(d.t_star > 0);
}

TEST_CASE("descent_path refuses at a constrained minimizer") {
    SetOracle C = catalog("unit-ball");
    AmenableRep rep = amenable_rep("unit-ball", vec2(0, -1));
    // f = x2 has its constrained minimum on the ball at (0,-1)
    CHECK_THROWS_AS(descent_path(parse_expr("x2"), C, vec2(0, -1), {}, &rep),
                    std::runtime_error);
}

TEST_CASE("check_first_order holds at analytic minimizers of convex problems") {
    SetOracle ball = catalog("unit-ball");
    AmenableRep rep = amenable_rep("unit-ball", vec2(0, -1));
    FirstOrderResult r = check_first_order(parse_expr("x2"), ball, vec2(0, -1), {}, &rep);
    CHECK(r.holds);
    SetOracle hp = catalog("halfplane");
    FirstOrderResult r2 = check_first_order(parse_expr("x1^2 + x2^2"), hp, Vec(Vec::Zero(2)));
    CHECK(r2.holds);
}

TEST_CASE("backtracking line search lands on a decreasing node") {
    SetOracle C = catalog("power32-graph");
    AmenableRep rep = amenable_rep("power32-graph", Vec(Vec::Zero(2)));
    DescentReport d = descent_path(parse_expr("x1"), C, Vec(Vec::Zero(2)), {}, &rep);
    const double t = backtracking_t(d);
    CHECK(t > 0);
    const int i = static_cast<int>(std::round(t * (d.curve.size() - 1)));
    CHECK(d.objective_values[i] < d.objective_values[0]);
}
