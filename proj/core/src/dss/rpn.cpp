#include "mcdist/dss/rpn.hpp"

#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "mcdist/common/errors.hpp"
#include "mcdist/dss/statement.hpp"

namespace mcdist::dss {

std::optional<double> try_parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

double parse_rpn(std::string_view expr) {
    std::string_view body = trim(expr);
    if (body.size() < 2 || body.front() != '(' || body.back() != ')') {
        throw ParseError("RPN expression must be parenthesized: '" + std::string(expr) + "'");
    }
    body = body.substr(1, body.size() - 2);

    std::vector<double> stack;
    auto pop = [&](const std::string& op) {
        if (stack.empty()) throw ParseError("RPN stack underflow at '" + op + "' in '" + std::string(expr) + "'");
        double v = stack.back();
        stack.pop_back();
        return v;
    };

    for (const std::string& tok : split_items(body)) {
        if (auto v = try_parse_double(tok)) {
            stack.push_back(*v);
            continue;
        }
        const std::string op = to_lower(tok);
        if (op == "+" || op == "-" || op == "*" || op == "/") {
            double b = pop(op);
            double a = pop(op);
            switch (op[0]) {
                case '+': stack.push_back(a + b); break;
                case '-': stack.push_back(a - b); break;
                case '*': stack.push_back(a * b); break;
                default:
                    if (b == 0.0) throw ParseError("RPN division by zero in '" + std::string(expr) + "'");
                    stack.push_back(a / b);
            }
        } else if (op == "sqrt") {
            double a = pop(op);
            if (a < 0.0) throw ParseError("RPN sqrt of negative value in '" + std::string(expr) + "'");
            stack.push_back(std::sqrt(a));
        } else if (op == "sqr") {
            double a = pop(op);
            stack.push_back(a * a);
        } else if (op == "inv") {
            double a = pop(op);
            if (a == 0.0) throw ParseError("RPN division by zero in '" + std::string(expr) + "'");
            stack.push_back(1.0 / a);
        } else {
            throw ParseError("unknown RPN operator '" + tok + "' in '" + std::string(expr) + "'");
        }
    }
    if (stack.empty()) throw ParseError("empty RPN expression '" + std::string(expr) + "'");
    if (stack.size() > 1) {
        throw ParseError("RPN expression leaves " + std::to_string(stack.size()) + " values on the stack: '" +
                         std::string(expr) + "'");
    }
    return stack.back();
}

double parse_number(std::string_view text) {
    std::string_view t = trim(text);
    if (t.size() >= 2 && (t.front() == '"' || t.front() == '\'') && t.back() == t.front()) {
        t = trim(t.substr(1, t.size() - 2));
    }
    if (!t.empty() && t.front() == '(') return parse_rpn(t);
    if (auto v = try_parse_double(t)) return *v;
    throw ParseError("expected a number, got '" + std::string(text) + "'");
}

}  // namespace mcdist::dss
