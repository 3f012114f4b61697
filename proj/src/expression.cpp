#include "gtm/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

namespace gtm {

namespace {

class Parser {
 public:
  Parser(std::string_view text, const NameResolver& resolve) : text_(text), resolve_(resolve) {}

  double parse() {
    const double v = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ExpressionError(what, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double expression() {
    double v = term();
    for (;;) {
      if (accept('+'))
        v += term();
      else if (accept('-'))
        v -= term();
      else
        return v;
    }
  }

  double term() {
    double v = unary();
    for (;;) {
      if (accept('*')) {
        v *= unary();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        const double d = unary();
        if (d == 0.0) throw ExpressionError("division by zero", at);
        v /= d;
      } else {
        return v;
      }
    }
  }

  double unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  double power() {
    const double base = primary();
    if (accept('^')) return std::pow(base, unary());
    return base;
  }

  double primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (accept('(')) {
      const double v = expression();
      if (!accept(')')) fail("expected ')'");
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  double number() {
    const std::string rest(text_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    return v;
  }

  double identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      const double arg = expression();
      if (!accept(')')) fail("expected ')'");
      if (name == "sqrt") {
        if (arg < 0.0) throw ExpressionError("sqrt of negative value", start);
        return std::sqrt(arg);
      }
      if (name == "sin") return std::sin(arg);
      if (name == "cos") return std::cos(arg);
      throw ExpressionError("unknown function '" + std::string(name) + "'", start);
    }

    if (name == "pi") return std::numbers::pi;
    if (name == "gm") return golden_mean;
    if (name == "sqrt2") return std::numbers::sqrt2;
    if (name == "sqrt3") return std::numbers::sqrt3;
    if (resolve_) {
      if (auto v = resolve_(name)) return *v;
    }
    throw ExpressionError("unknown name '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  const NameResolver& resolve_;
  std::size_t pos_ = 0;
};

}  // namespace

double evaluate_expression(std::string_view text, const NameResolver& resolve) {
  Parser p(text, resolve);
  const double v = p.parse();
  if (!std::isfinite(v)) throw ExpressionError("expression is not finite", 0);
  return v;
}

}  // namespace gtm
