#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hjj {

/// Raised on malformed expression text; position() is the 0-based offset of
/// the offending character.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string const& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A compiled arithmetic expression over a fixed set of named variables.
///
/// Grammar: literals, the declared variables, + - * / ^ (right associative,
/// binds tighter than unary minus), parentheses, and the functions
/// abs, exp, sin, cos (one argument) and min, max (two arguments).
/// Compilation produces a flat postfix program, so evaluation is
/// allocation-free and safe to call concurrently.
class Expression {
 public:
  Expression(std::string_view source, std::vector<std::string> variables);

  double operator()(std::span<double const> values) const;

  std::string const& source() const noexcept { return source_; }
  std::vector<std::string> const& variables() const noexcept { return variables_; }

  enum class Op : unsigned char {
    Const, Var, Add, Sub, Mul, Div, Pow, PowInt, Neg,
    Abs, Exp, Sin, Cos, Min, Max
  };

  struct Instr {
    Op op;
    int index = 0;   // variable index or integer exponent
    double value = 0.0;
  };

 private:
  std::string source_;
  std::vector<std::string> variables_;
  std::vector<Instr> program_;
  std::size_t max_depth_ = 0;
};

}  // namespace hjj
