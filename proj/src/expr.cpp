#include "vgeo/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace vgeo {

namespace {

double eval_node(const ExprNode& n, const Vec& x) {
    switch (n.op) {
        case ExprOp::Const: return n.value;
        case ExprOp::Var:
            if (n.var >= x.size()) throw EvalError("variable x" + std::to_string(n.var + 1) + " out of range");
            return x(n.var);
        case ExprOp::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
        case ExprOp::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
        case ExprOp::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
        case ExprOp::Div: {
            const double d = eval_node(*n.b, x);
            if (d == 0.0) throw EvalError("division by zero");
            return eval_node(*n.a, x) / d;
        }
        case ExprOp::Neg: return -eval_node(*n.a, x);
        case ExprOp::Pow: {
            const double base = eval_node(*n.a, x);
            const double e = eval_node(*n.b, x);
            if (base < 0.0 && std::abs(e - std::round(e)) > 1e-12)
                throw EvalError("rational power of negative base; use abs()");
            return std::pow(base, e);
        }
        case ExprOp::Abs: return std::abs(eval_node(*n.a, x));
        case ExprOp::Min: return std::min(eval_node(*n.a, x), eval_node(*n.b, x));
        case ExprOp::Max: return std::max(eval_node(*n.a, x), eval_node(*n.b, x));
    }
    throw EvalError("corrupt expression node");
}

int count_internal(const ExprNode& n) {
    if (n.op == ExprOp::Const || n.op == ExprOp::Var) return 0;
    int c = 1;
    if (n.a) c += count_internal(*n.a);
    if (n.b) c += count_internal(*n.b);
    return c;
}

void print_node(const ExprNode& n, std::ostream& os) {
    switch (n.op) {
        case ExprOp::Const: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << n.value;
            os << tmp.str();
            return;
        }
        case ExprOp::Var: os << "x" << (n.var + 1); return;
        case ExprOp::Add: os << "("; print_node(*n.a, os); os << " + "; print_node(*n.b, os); os << ")"; return;
        case ExprOp::Sub: os << "("; print_node(*n.a, os); os << " - "; print_node(*n.b, os); os << ")"; return;
        case ExprOp::Mul: os << "("; print_node(*n.a, os); os << " * "; print_node(*n.b, os); os << ")"; return;
        case ExprOp::Div: os << "("; print_node(*n.a, os); os << " / "; print_node(*n.b, os); os << ")"; return;
        case ExprOp::Neg: os << "(-"; print_node(*n.a, os); os << ")"; return;
        case ExprOp::Pow: os << "("; print_node(*n.a, os); os << "^"; print_node(*n.b, os); os << ")"; return;
        case ExprOp::Abs: os << "abs("; print_node(*n.a, os); os << ")"; return;
        case ExprOp::Min: os << "min("; print_node(*n.a, os); os << ", "; print_node(*n.b, os); os << ")"; return;
        case ExprOp::Max: os << "max("; print_node(*n.a, os); os << ", "; print_node(*n.b, os); os << ")"; return;
    }
}

class Parser {
public:
    explicit Parser(const std::string& src) : src_(src) {}

    ScalarExpr parse() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("empty expression", 0);
        ExprPtr e = expr();
        skip_ws();
        if (pos_ < src_.size()) throw ParseError("unexpected trailing input", pos_);
        return ScalarExpr(e, max_var_);
    }

private:
    const std::string& src_;
    size_t pos_ = 0;
    int max_var_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    static ExprPtr make(ExprOp op, ExprPtr a = nullptr, ExprPtr b = nullptr) {
        auto n = std::make_shared<ExprNode>();
        n->op = op;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    ExprPtr expr() {
        ExprPtr left = term();
        while (true) {
            if (eat('+')) left = make(ExprOp::Add, left, term());
            else if (eat('-')) left = make(ExprOp::Sub, left, term());
            else return left;
        }
    }

    ExprPtr term() {
        ExprPtr left = unary();
        while (true) {
            if (eat('*')) left = make(ExprOp::Mul, left, unary());
            else if (eat('/')) left = make(ExprOp::Div, left, unary());
            else return left;
        }
    }

    ExprPtr unary() {
        if (eat('-')) return make(ExprOp::Neg, unary());
        return power();
    }

    ExprPtr power() {
        ExprPtr base = primary();
        if (eat('^')) return make(ExprOp::Pow, base, unary());  // right associative
        return base;
    }

    ExprPtr primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr e = expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    ExprPtr number() {
        size_t end = 0;
        double v;
        try {
            v = std::stod(src_.substr(pos_), &end);
        } catch (const std::exception&) {
            throw ParseError("malformed number", pos_);
        }
        pos_ += end;
        auto n = std::make_shared<ExprNode>();
        n->op = ExprOp::Const;
        n->value = v;
        return n;
    }

    ExprPtr ident() {
        const size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string name = src_.substr(start, pos_ - start);
        if (name == "abs" || name == "min" || name == "max") {
            if (!eat('(')) throw ParseError("expected '(' after " + name, pos_);
            ExprPtr a = expr();
            if (name == "abs") {
                if (!eat(')')) throw ParseError("expected ')'", pos_);
                return make(ExprOp::Abs, a);
            }
            if (!eat(',')) throw ParseError("expected ',' in " + name, pos_);
            ExprPtr b = expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return make(name == "min" ? ExprOp::Min : ExprOp::Max, a, b);
        }
        if (name.size() >= 2 && name[0] == 'x') {
            bool digits = true;
            for (size_t i = 1; i < name.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
            if (digits) {
                const int idx = std::stoi(name.substr(1));
                if (idx < 1) throw ParseError("variable index must be >= 1", start);
                max_var_ = std::max(max_var_, idx);
                auto n = std::make_shared<ExprNode>();
                n->op = ExprOp::Var;
                n->var = idx - 1;
                return n;
            }
        }
        throw ParseError("unknown identifier '" + name + "'", start);
    }
};

}  // namespace

double ScalarExpr::eval(const Vec& x) const {
    if (!root_) throw EvalError("empty expression");
    return eval_node(*root_, x);
}

Vec ScalarExpr::gradient(const Vec& x, double h) const {
    auto f = [this](const Vec& y) {
        Vec r(1);
        r(0) = eval(y);
        return r;
    };
    return fd_jacobian(f, x, h).row(0).transpose();
}

int ScalarExpr::internal_nodes() const { return root_ ? count_internal(*root_) : 0; }

std::string ScalarExpr::print() const {
    std::ostringstream os;
    if (root_) print_node(*root_, os);
    return os.str();
}

ScalarExpr parse_expr(const std::string& src) {
    Parser p(src);
    return p.parse();
}

}  // namespace vgeo
