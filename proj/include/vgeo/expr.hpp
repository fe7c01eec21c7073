#pragma once

#include "vgeo/geometry.hpp"

#include <memory>
#include <stdexcept>
#include <string>

namespace vgeo {

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

enum class ExprOp { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Abs, Min, Max };

struct ExprNode {
    ExprOp op = ExprOp::Const;
    double value = 0.0;   // Const
    int var = 0;          // Var, zero-based
    ExprPtr a, b;
};

struct ParseError : std::runtime_error {
    size_t position;
    ParseError(const std::string& msg, size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}
};

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Scalar expression over variables x1..xn with +, -, *, /, ^ (right
/// associative), abs, min, max. Rational powers of negative bases are an
/// evaluation error; route them through abs().
class ScalarExpr {
public:
    ScalarExpr() = default;
    explicit ScalarExpr(ExprPtr root, int arity) : root_(std::move(root)), arity_(arity) {}

    double eval(const Vec& x) const;
    double operator()(const Vec& x) const { return eval(x); }

    Vec gradient(const Vec& x, double h = 0.0) const;

    int arity() const { return arity_; }
    int internal_nodes() const;
    std::string print() const;
    const ExprPtr& root() const { return root_; }
    bool valid() const { return root_ != nullptr; }

private:
    ExprPtr root_;
    int arity_ = 0;
};

ScalarExpr parse_expr(const std::string& src);

}  // namespace vgeo
