#pragma once

#include <memory>
#include <string>

namespace symh {

// Parsed analytic test function of (q, p). Grammar: + - * / ^ with the usual
// precedence, unary minus, parentheses, variables q and p, the constant pi,
// and the functions sin, cos, exp, bump(x,center,width) and
// plateau(x,center,half_width,taper). bump is the standard smooth compactly
// supported profile exp(1 - 1/(1-u^2)) with u=(x-center)/width, zero for
// |u| >= 1 and 1 at the center. plateau is 1 on |x-center| <= half_width and
// decays to 0 over the taper width through a cubic smoothstep.
class Expression {
public:
    struct Node;
    explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

    double eval(double q, double p) const;
    const std::string& text() const { return text_; }

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
    friend Expression parse_expression(const std::string&);
};

// Throws domain_error with a byte offset for malformed input or unknown names.
Expression parse_expression(const std::string& text);

// The profile shapes used by the expression builtins, also useful directly
// when constructing fields in code.
double smoothstep01(double s);
double bump_profile(double x, double center, double width);
double plateau_profile(double x, double center, double half_width, double taper);

} // namespace symh
