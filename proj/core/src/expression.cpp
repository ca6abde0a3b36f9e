#include "symh/expression.hpp"
#include "symh/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace symh {

double smoothstep01(double s) {
    if (s <= 0) return 0;
    if (s >= 1) return 1;
    return s * s * (3 - 2 * s);
}

double bump_profile(double x, double c, double w) {
    double u = (x - c) / w;
    double d = 1 - u * u;
    if (d <= 0) return 0;
    return std::exp(1.0 - 1.0 / d);
}

double plateau_profile(double x, double c, double hw, double taper) {
    double s = (std::fabs(x - c) - hw) / taper;
    return 1.0 - smoothstep01(s);
}

namespace {

enum class Kind { Num, VarQ, VarP, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Bump, Plateau };

} // namespace

struct Expression::Node {
    Kind kind;
    double num = 0;
    std::vector<std::shared_ptr<const Node>> args;
};

double Expression::eval(double q, double p) const {
    // small explicit stack machine is overkill; recursion depth equals AST depth
    struct Ev {
        static double run(const Node* n, double q, double p) {
            switch (n->kind) {
                case Kind::Num: return n->num;
                case Kind::VarQ: return q;
                case Kind::VarP: return p;
                case Kind::Add: return run(n->args[0].get(), q, p) + run(n->args[1].get(), q, p);
                case Kind::Sub: return run(n->args[0].get(), q, p) - run(n->args[1].get(), q, p);
                case Kind::Mul: return run(n->args[0].get(), q, p) * run(n->args[1].get(), q, p);
                case Kind::Div: return run(n->args[0].get(), q, p) / run(n->args[1].get(), q, p);
                case Kind::Pow: return std::pow(run(n->args[0].get(), q, p), run(n->args[1].get(), q, p));
                case Kind::Neg: return -run(n->args[0].get(), q, p);
                case Kind::Sin: return std::sin(run(n->args[0].get(), q, p));
                case Kind::Cos: return std::cos(run(n->args[0].get(), q, p));
                case Kind::Exp: return std::exp(run(n->args[0].get(), q, p));
                case Kind::Bump:
                    return bump_profile(run(n->args[0].get(), q, p), run(n->args[1].get(), q, p),
                                        run(n->args[2].get(), q, p));
                case Kind::Plateau:
                    return plateau_profile(run(n->args[0].get(), q, p), run(n->args[1].get(), q, p),
                                           run(n->args[2].get(), q, p), run(n->args[3].get(), q, p));
            }
            return 0;
        }
    };
    return Ev::run(root_.get(), q, p);
}

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make_node(Kind k, std::vector<NodePtr> args = {}, double num = 0) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = k;
    n->num = num;
    n->args = std::move(args);
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        skip_ws();
        if (pos_ >= s_.size()) fail("empty expression");
        NodePtr e = expr();
        skip_ws();
        if (pos_ < s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw domain_error("syntax error at offset " + std::to_string(pos_) + ": " + msg);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (eat('+')) lhs = make_node(Kind::Add, {lhs, term()});
            else if (eat('-')) lhs = make_node(Kind::Sub, {lhs, term()});
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (eat('*')) lhs = make_node(Kind::Mul, {lhs, factor()});
            else if (eat('/')) lhs = make_node(Kind::Div, {lhs, factor()});
            else return lhs;
        }
    }

    // right associative power binds tighter than unary minus on the left arg
    NodePtr factor() {
        NodePtr base = unary();
        if (eat('^')) return make_node(Kind::Pow, {base, factor()});
        return base;
    }

    NodePtr unary() {
        if (eat('-')) return make_node(Kind::Neg, {unary()});
        if (eat('+')) return unary();
        return primary();
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= s_.size()) fail("expected operand");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return make_node(Kind::Num, {}, v);
    }

    NodePtr identifier() {
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        std::string name = s_.substr(start, pos_ - start);
        if (name == "q") return make_node(Kind::VarQ);
        if (name == "p") return make_node(Kind::VarP);
        if (name == "pi") return make_node(Kind::Num, {}, 3.14159265358979323846);
        Kind k;
        std::size_t arity;
        if (name == "sin") { k = Kind::Sin; arity = 1; }
        else if (name == "cos") { k = Kind::Cos; arity = 1; }
        else if (name == "exp") { k = Kind::Exp; arity = 1; }
        else if (name == "bump") { k = Kind::Bump; arity = 3; }
        else if (name == "plateau") { k = Kind::Plateau; arity = 4; }
        else {
            pos_ = start;
            fail("unknown identifier '" + name + "'");
        }
        if (!eat('(')) fail("expected '(' after '" + name + "'");
        std::vector<NodePtr> args;
        args.push_back(expr());
        while (args.size() < arity) {
            if (!eat(',')) fail("expected ',' in argument list of '" + name + "'");
            args.push_back(expr());
        }
        if (!eat(')')) fail("expected ')' closing '" + name + "'");
        return make_node(k, std::move(args));
    }
};

} // namespace

Expression parse_expression(const std::string& text) {
    if (text.empty()) throw domain_error("syntax error at offset 0: empty expression");
    Parser parser(text);
    Expression e(parser.parse());
    e.text_ = text;
    return e;
}

} // namespace symh
