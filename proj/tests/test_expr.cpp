#include <doctest.h>

#include "vgeo/expr.hpp"

#include <cmath>
#include <random>

using namespace vgeo;

namespace {
Vec v1(double x) {
    Vec v(1);
    v(0) = x;
    return v;
}
}  // namespace

TEST_CASE("abs(x1)^(3/2) at 4") {
    ScalarExpr e = parse_expr("abs(x1)^(3/2)");
    CHECK(e.eval(v1(4.0)) == doctest::Approx(8.0).epsilon(1e-14));
}

TEST_CASE("x1^2 - x2 at (1,0)") {
    ScalarExpr e = parse_expr("x1^2 - x2");
    CHECK(e.eval(vec2(1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("min(x1^2, -x1^2) + x2 has 5 internal nodes") {
    ScalarExpr e = parse_expr("min(x1^2, -x1^2) + x2");
    CHECK(e.internal_nodes() == 5);
    CHECK(e.arity() == 2);
}

TEST_CASE("precedence and right-associative power") {
    CHECK(parse_expr("2 + 3 * 4").eval(Vec(0)) == doctest::Approx(14.0));
    CHECK(parse_expr("2^3^2").eval(Vec(0)) == doctest::Approx(512.0));
    CHECK(parse_expr("-x1^2").eval(v1(3)) == doctest::Approx(-9.0));
    CHECK(parse_expr("(2 + 3) * 4").eval(Vec(0)) == doctest::Approx(20.0));
    CHECK(parse_expr("max(1, 2) / 4").eval(Vec(0)) == doctest::Approx(0.5));
}

TEST_CASE("syntax errors carry a position") {
    CHECK_THROWS_AS(parse_expr("x1 + "), ParseError);
    CHECK_THROWS_AS(parse_expr("foo(x1)"), ParseError);
    CHECK_THROWS_AS(parse_expr("(x1"), ParseError);
    CHECK_THROWS_AS(parse_expr(""), ParseError);
    try {
        parse_expr("x1 + @");
    } catch (const ParseError& e) {
        CHECK(e.position == 5);
    }
}

TEST_CASE("rational power of a negative base is an evaluation error") {
    ScalarExpr e = parse_expr("x1^(3/2)");
    CHECK_THROWS_AS(e.eval(v1(-1.0)), EvalError);
    CHECK(parse_expr("x1^2").eval(v1(-3.0)) == doctest::Approx(9.0));  // integer powers fine
    CHECK(parse_expr("abs(x1)^(3/2)").eval(v1(-4.0)) == doctest::Approx(8.0));
}

TEST_CASE("parse-print round trip is stable") {
    for (const char* src : {"abs(x1)^(3/2)", "x1^2 - x2", "min(x1^2, -x1^2) + x2",
                            "1 / (x1 + 2) * max(x2, 0.5)"}) {
        ScalarExpr e = parse_expr(src);
        ScalarExpr e2 = parse_expr(e.print());
        CHECK(e2.print() == e.print());
    }
}

namespace {
// reference interpreter: independent recursive evaluation over the tree
double ref_eval(const ExprNode& n, const Vec& x) {
    switch (n.op) {
        case ExprOp::Const: return n.value;
        case ExprOp::Var: return x(n.var);
        case ExprOp::Add: return ref_eval(*n.a, x) + ref_eval(*n.b, x);
        case ExprOp::Sub: return ref_eval(*n.a, x) - ref_eval(*n.b, x);
        case ExprOp::Mul: return ref_eval(*n.a, x) * ref_eval(*n.b, x);
        case ExprOp::Div: return ref_eval(*n.a, x) / ref_eval(*n.b, x);
        case ExprOp::Neg: return -ref_eval(*n.a, x);
        case ExprOp::Pow: return std::pow(ref_eval(*n.a, x), ref_eval(*n.b, x));
        case ExprOp::Abs: return std::abs(ref_eval(*n.a, x));
        case ExprOp::Min: return std::min(ref_eval(*n.a, x), ref_eval(*n.b, x));
        case ExprOp::Max: return std::max(ref_eval(*n.a, x), ref_eval(*n.b, x));
    }
    return 0;
}

std::string random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 8);
    std::uniform_real_distribution<double> cst(0.1, 3.0);
    switch (pick(rng)) {
        case 0: return "x" + std::to_string(1 + static_cast<int>(rng() % 2));
        case 1: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.3f", cst(rng));
            return buf;
        }
        case 2: return "(" + random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1) + ")";
        case 3: return "(" + random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1) + ")";
        case 4: return "(" + random_expr(rng, depth - 1) + " * " + random_expr(rng, depth - 1) + ")";
        case 5: return "abs(" + random_expr(rng, depth - 1) + ")";
        case 6:
            return "min(" + random_expr(rng, depth - 1) + ", " + random_expr(rng, depth - 1) + ")";
        case 7:
            return "max(" + random_expr(rng, depth - 1) + ", " + random_expr(rng, depth - 1) + ")";
        default: return "abs(" + random_expr(rng, depth - 1) + ")^2";
    }
}
}  // namespace

TEST_CASE("fuzz: parser evaluation matches the reference interpreter") {
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    int done = 0;
    while (done < 1000) {
        const std::string src = random_expr(rng, 4);
        ScalarExpr e = parse_expr(src);
        Vec x = vec2(coord(rng), coord(rng));
        double got;
        try {
            got = e.eval(x);
        } catch (const EvalError&) {
            continue;
        }
        const double want = ref_eval(*e.root(), x);
        if (std::isfinite(want)) {
            CHECK(got == doctest::Approx(want).epsilon(1e-12));
            ++done;
        }
    }
}

TEST_CASE("gradient by finite differences") {
    ScalarExpr e = parse_expr("x1^2 - x2");
    Vec g = e.gradient(vec2(1, 0));
    CHECK(std::abs(g(0) - 2.0) < 1e-6);
    CHECK(std::abs(g(1) + 1.0) < 1e-6);
}
