#include "stieltjes/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <vector>

#include "stieltjes/errors.hpp"

namespace stieltjes {

namespace {

using Fn = std::function<double(double)>;

class Parser {
  public:
    explicit Parser(const std::string& text) : s_(text) {}

    Fn parse() {
        Fn e = sum();
        skip_ws();
        if (pos_ != s_.size()) fail("trailing input");
        return e;
    }

  private:
    [[noreturn]] void fail(const std::string& why) const {
        throw SchemaError("bad expression at offset " + std::to_string(pos_) + ": " + why);
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

    Fn sum() {
        Fn lhs = product();
        for (;;) {
            if (eat('+')) {
                Fn rhs = product();
                lhs = [lhs, rhs](double t) { return lhs(t) + rhs(t); };
            } else if (eat('-')) {
                Fn rhs = product();
                lhs = [lhs, rhs](double t) { return lhs(t) - rhs(t); };
            } else {
                return lhs;
            }
        }
    }

    Fn product() {
        Fn lhs = unary();
        for (;;) {
            if (eat('*')) {
                Fn rhs = unary();
                lhs = [lhs, rhs](double t) { return lhs(t) * rhs(t); };
            } else if (eat('/')) {
                Fn rhs = unary();
                lhs = [lhs, rhs](double t) { return lhs(t) / rhs(t); };
            } else {
                return lhs;
            }
        }
    }

    Fn unary() {
        if (eat('-')) {
            Fn e = unary();
            return [e](double t) { return -e(t); };
        }
        return power();
    }

    Fn power() {
        Fn base = atom();
        if (eat('^')) {
            Fn exp = unary();  // right associative
            return [base, exp](double t) { return std::pow(base(t), exp(t)); };
        }
        return base;
    }

    Fn atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end");
        const char c = s_[pos_];

        if (c == '(') {
            ++pos_;
            Fn e = sum();
            if (!eat(')')) fail("missing ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return name();
        fail("unexpected character");
    }

    Fn number() {
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("bad number");
        pos_ += static_cast<std::size_t>(end - begin);
        return [v](double) { return v; };
    }

    Fn name() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        const std::string id = s_.substr(start, pos_ - start);

        if (id == "t") return [](double t) { return t; };
        if (id == "pi") return [](double) { return 3.14159265358979323846; };
        if (id == "e") return [](double) { return 2.71828182845904523536; };

        static const struct {
            const char* name;
            double (*fn)(double);
        } unary_fns[] = {{"sin", std::sin},   {"cos", std::cos},     {"tan", std::tan},
                         {"exp", std::exp},   {"log", std::log},     {"sqrt", std::sqrt},
                         {"abs", std::fabs},  {"floor", std::floor}};
        for (const auto& u : unary_fns) {
            if (id == u.name) {
                if (!eat('(')) fail("expected '(' after function name");
                Fn arg = sum();
                if (!eat(')')) fail("missing ')'");
                auto fn = u.fn;
                return [fn, arg](double t) { return fn(arg(t)); };
            }
        }

        if (id == "min" || id == "max" || id == "pow") {
            if (!eat('(')) fail("expected '(' after function name");
            Fn a = sum();
            if (!eat(',')) fail("expected ','");
            Fn b = sum();
            if (!eat(')')) fail("missing ')'");
            if (id == "min") return [a, b](double t) { return std::min(a(t), b(t)); };
            if (id == "max") return [a, b](double t) { return std::max(a(t), b(t)); };
            return [a, b](double t) { return std::pow(a(t), b(t)); };
        }
        fail("unknown identifier '" + id + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace

std::function<double(double)> compile_expression(const std::string& text) {
    Parser p(text);
    return p.parse();
}

}  // namespace stieltjes
