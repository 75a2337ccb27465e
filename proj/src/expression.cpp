#include "mpps/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "mpps/errors.hpp"

namespace mpps::expr {

struct Expression::Node {
    enum class Kind { Number, Time, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp };
    Kind kind;
    double value = 0.0;
    std::shared_ptr<const Node> a, b;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind k, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->value = v;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

double eval(const Node& n, double t) {
    switch (n.kind) {
    case Node::Kind::Number: return n.value;
    case Node::Kind::Time: return t;
    case Node::Kind::Add: return eval(*n.a, t) + eval(*n.b, t);
    case Node::Kind::Sub: return eval(*n.a, t) - eval(*n.b, t);
    case Node::Kind::Mul: return eval(*n.a, t) * eval(*n.b, t);
    case Node::Kind::Div: return eval(*n.a, t) / eval(*n.b, t);
    case Node::Kind::Pow: return std::pow(eval(*n.a, t), eval(*n.b, t));
    case Node::Kind::Neg: return -eval(*n.a, t);
    case Node::Kind::Sin: return std::sin(eval(*n.a, t));
    case Node::Kind::Cos: return std::cos(eval(*n.a, t));
    case Node::Kind::Exp: return std::exp(eval(*n.a, t));
    }
    return 0.0; // unreachable
}

class Parser {
public:
    explicit Parser(const std::string& src) : src_(src) {}

    NodePtr run() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    const std::string& src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("expression error at position " + std::to_string(pos_) + " in \"" +
                          src_ + "\": " + what);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
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

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = make(Node::Kind::Add, lhs, parse_term());
            else if (accept('-'))
                lhs = make(Node::Kind::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = make(Node::Kind::Mul, lhs, parse_unary());
            else if (accept('/'))
                lhs = make(Node::Kind::Div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make(Node::Kind::Neg, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (accept('^')) return make(Node::Kind::Pow, base, parse_unary());
        return base;
    }

    NodePtr parse_primary() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            if (!accept(')')) fail("missing ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_name();
        fail(c ? std::string("unexpected character '") + c + "'" : "unexpected end of input");
    }

    NodePtr parse_number() {
        const char* begin = src_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return make(Node::Kind::Number, nullptr, nullptr, v);
    }

    NodePtr parse_name() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               std::isalnum(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        std::string name = src_.substr(start, pos_ - start);
        if (name == "t") return make(Node::Kind::Time);
        if (name == "pi") return make(Node::Kind::Number, nullptr, nullptr, 3.14159265358979323846);
        Node::Kind fn;
        if (name == "sin")
            fn = Node::Kind::Sin;
        else if (name == "cos")
            fn = Node::Kind::Cos;
        else if (name == "exp")
            fn = Node::Kind::Exp;
        else {
            pos_ = start;
            fail("unknown name \"" + name + "\" (allowed: t, pi, sin, cos, exp)");
        }
        if (!accept('(')) fail("expected '(' after \"" + name + "\"");
        NodePtr arg = parse_expr();
        if (!accept(')')) fail("missing ')'");
        return make(fn, arg);
    }
};

} // namespace

Expression Expression::parse(const std::string& source) {
    Expression e;
    e.src_ = source;
    e.root_ = Parser(source).run();
    return e;
}

double Expression::operator()(double t) const {
    if (!root_) throw ConfigError("evaluating an empty expression");
    return eval(*root_, t);
}

} // namespace mpps::expr
