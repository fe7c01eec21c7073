#include <doctest.h>

#include "vgeo/catalog.hpp"
#include "vgeo/report_io.hpp"

#include <json.hpp>

#include <sstream>

using namespace vgeo;

TEST_CASE("floats print with 17 significant digits and re-parse exactly") {
    for (double v : {1.0 / 3, 2.0 / 7, 1e-17, 3.141592653589793, -0.1}) {
        CHECK(std::stod(format_float(v)) == v);
    }
}

TEST_CASE("curve CSV round trip") {
    SampledCurve c = segment_curve(vec2(0, 0), vec2(1, -2), 17);
    std::stringstream ss;
    write_curve_csv(ss, c);
    SampledCurve back = read_curve_csv(ss);
    REQUIRE(back.size() == c.size());
    for (int i = 0; i < c.size(); ++i) {
        CHECK(back.grid(i) == c.grid(i));
        CHECK((back.points[i] - c.points[i]).norm() == 0.0);
        CHECK((back.deriv[i] - c.deriv[i]).norm() == 0.0);
    }
}

TEST_CASE("set spec JSON: preimage round trip") {
    const char* spec = R"({
        "kind": "preimage", "dim": 2,
        "F": ["x1^2 - x2"],
        "D": {"kind": "box", "lo": [-1e308], "hi": [0]},
        "center": [0, 0], "radius": 4.0, "name": "epi-x2"
    })";
    SetOracle s = parse_set_spec(spec);
    CHECK(s.kind == OracleKind::Preimage);
    CHECK(s.membership(vec2(1, 2), 1e-9));
    CHECK(!s.membership(vec2(1, 0.5), 1e-9));
    // serialized spec parses back to an equivalent oracle
    SetOracle s2 = parse_set_spec(set_spec_json(s));
    CHECK(s2.D.contains(Vec(Vec::Constant(1, -0.5))));
    CHECK(s2.membership(vec2(1, 2), 1e-9) == s.membership(vec2(1, 2), 1e-9));
}

TEST_CASE("set spec JSON: graph, epigraph, curve-union, catalog kinds") {
    SetOracle g = parse_set_spec(R"x({"kind": "graph", "f": "abs(x1)^(3/2)"})x");
    CHECK(g.membership(vec2(1, 1), 1e-9));
    SetOracle e = parse_set_spec(R"({"kind": "epigraph", "f": "x1^2"})");
    CHECK(e.membership(vec2(0.5, 0.3), 1e-9));
    SetOracle cu = parse_set_spec(R"({
        "kind": "curve-union", "dim": 2,
        "branches": [{"point": ["x1^2", "x1"], "t": [-1, 1]},
                     {"point": ["-x1^2", "x1"], "t": [-1, 1]}]
    })");
    CHECK(cu.membership(vec2(0.25, 0.5), 1e-7));
    SetOracle cat = parse_set_spec(R"({"kind": "catalog", "name": "unit-circle"})");
    CHECK(cat.membership(vec2(1, 0), 1e-9));
}

TEST_CASE("convex body JSON round trips") {
    auto ball = ConvexBody::ball(vec2(0.5, -1), 2.0);
    auto b2 = parse_body_json(body_json(ball));
    CHECK(b2.kind() == BodyKind::Ball);
    CHECK(b2.ball_radius == 2.0);

    auto prod = ConvexBody::product(
        {ConvexBody::nonpositive_halfline(), ConvexBody::singleton(Vec(Vec::Zero(1)))});
    auto p2 = parse_body_json(body_json(prod));
    CHECK(p2.kind() == BodyKind::Product);
    CHECK(p2.dim() == 2);
    CHECK(p2.contains(vec2(-1, 0)));
    CHECK(!p2.contains(vec2(-1, 0.5), 1e-9));
}

TEST_CASE("verdict CSV rows carry the documented columns") {
    RegularityVerdict v;
    v.property = "super-regularity";
    v.set_name = "parabola-pair";
    v.base = vec2(0, 0);
    v.eps = 1.0 / 3;
    v.radius = 0.5;
    v.verdict = Verdict::Violated;
    v.wx = vec2(1.0 / 3, 1.0 / 9);
    v.lhs = 2.0 / 9;
    const std::string row = verdict_csv_row(v);
    const auto cells = split_csv_line(row);
    const auto headers = split_csv_line(kVerdictCsvHeader);
    CHECK(cells.size() == headers.size());
    CHECK(cells[0] == "super-regularity");
    CHECK(cells[5] == "violated");
    CHECK(std::stod(cells[10]) == 2.0 / 9);
}

TEST_CASE("malformed set specs raise errors with byte positions") {
    CHECK_THROWS_AS(parse_set_spec("{\"kind\": \"preimage\""), nlohmann::json::parse_error);
}
