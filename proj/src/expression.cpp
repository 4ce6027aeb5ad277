#include "hjj/expression.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

namespace hjj {
namespace {

using Op = Expression::Op;
using Instr = Expression::Instr;

struct Function {
  std::string_view name;
  Op op;
  int arity;
};

constexpr std::array<Function, 6> kFunctions{{
    {"abs", Op::Abs, 1},
    {"exp", Op::Exp, 1},
    {"sin", Op::Sin, 1},
    {"cos", Op::Cos, 1},
    {"min", Op::Min, 2},
    {"max", Op::Max, 2},
}};

// Recursive-descent parser emitting postfix code directly.
class Parser {
 public:
  Parser(std::string_view src, std::vector<std::string> const& vars)
      : src_(src), vars_(vars) {}

  std::vector<Instr> parse() {
    skip_space();
    if (pos_ == src_.size()) {
      throw ParseError("empty expression", pos_);
    }
    expr();
    skip_space();
    if (pos_ != src_.size()) {
      throw ParseError(std::string("unexpected character '") + src_[pos_] + "'", pos_);
    }
    return std::move(code_);
  }

 private:
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  void expr() {
    term();
    for (;;) {
      if (accept('+')) {
        term();
        code_.push_back({Op::Add});
      } else if (accept('-')) {
        term();
        code_.push_back({Op::Sub});
      } else {
        return;
      }
    }
  }

  void term() {
    unary();
    for (;;) {
      if (accept('*')) {
        unary();
        code_.push_back({Op::Mul});
      } else if (accept('/')) {
        unary();
        code_.push_back({Op::Div});
      } else {
        return;
      }
    }
  }

  void unary() {
    if (accept('-')) {
      unary();
      code_.push_back({Op::Neg});
    } else if (accept('+')) {
      unary();
    } else {
      power();
    }
  }

  void power() {
    primary();
    if (accept('^')) {
      auto const start = code_.size();
      unary();
      // Small integer exponents are common ((p-1)^2); avoid std::pow there.
      if (code_.size() == start + 1 && code_.back().op == Op::Const) {
        double const e = code_.back().value;
        if (e == std::floor(e) && std::abs(e) <= 8.0 && e >= 1.0) {
          code_.back() = Instr{Op::PowInt, static_cast<int>(e)};
          return;
        }
      }
      code_.push_back({Op::Pow});
    }
  }

  void primary() {
    skip_space();
    if (pos_ >= src_.size()) {
      throw ParseError("unexpected end of expression", pos_);
    }
    char const c = src_[pos_];
    if (c == '(') {
      ++pos_;
      expr();
      expect(')');
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      identifier();
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  void number() {
    auto const begin = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      auto save = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
        ++pos_;
      }
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          ++pos_;
        }
      } else {
        pos_ = save;
      }
    }
    // std::from_chars for double is available in libstdc++ 11.
    double value = 0.0;
    auto const* first = src_.data() + begin;
    auto const* last = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      throw ParseError("malformed number", begin);
    }
    code_.push_back({Op::Const, 0, value});
  }

  void identifier() {
    auto const begin = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    std::string_view const name = src_.substr(begin, pos_ - begin);

    auto const fn = std::find_if(kFunctions.begin(), kFunctions.end(),
                                 [&](Function const& f) { return f.name == name; });
    if (fn != kFunctions.end()) {
      expect('(');
      int args = 0;
      if (!accept(')')) {
        do {
          expr();
          ++args;
        } while (accept(','));
        expect(')');
      }
      if (args != fn->arity) {
        throw ParseError("function '" + std::string(name) + "' expects " +
                             std::to_string(fn->arity) + " argument(s), got " +
                             std::to_string(args),
                         begin);
      }
      code_.push_back({fn->op});
      return;
    }

    auto const var = std::find(vars_.begin(), vars_.end(), name);
    if (var == vars_.end()) {
      throw ParseError("unknown identifier '" + std::string(name) + "'", begin);
    }
    code_.push_back({Op::Var, static_cast<int>(var - vars_.begin())});
  }

  std::string_view src_;
  std::vector<std::string> const& vars_;
  std::size_t pos_ = 0;
  std::vector<Instr> code_;
};

std::size_t stack_depth(std::vector<Instr> const& code) {
  std::size_t depth = 0;
  std::size_t max_depth = 0;
  for (auto const& in : code) {
    switch (in.op) {
      case Op::Const:
      case Op::Var:
        ++depth;
        break;
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
      case Op::Pow:
      case Op::Min:
      case Op::Max:
        --depth;
        break;
      default:
        break;
    }
    max_depth = std::max(max_depth, depth);
  }
  return max_depth;
}

}  // namespace

Expression::Expression(std::string_view source, std::vector<std::string> variables)
    : source_(source), variables_(std::move(variables)) {
  program_ = Parser(source_, variables_).parse();
  max_depth_ = stack_depth(program_);
}

double Expression::operator()(std::span<double const> values) const {
  constexpr std::size_t kInline = 32;
  std::array<double, kInline> small{};
  std::vector<double> large;
  double* stack = small.data();
  if (max_depth_ > kInline) {
    large.resize(max_depth_);
    stack = large.data();
  }

  std::size_t top = 0;
  for (auto const& in : program_) {
    switch (in.op) {
      case Op::Const:
        stack[top++] = in.value;
        break;
      case Op::Var:
        stack[top++] = values[static_cast<std::size_t>(in.index)];
        break;
      case Op::Add:
        --top;
        stack[top - 1] += stack[top];
        break;
      case Op::Sub:
        --top;
        stack[top - 1] -= stack[top];
        break;
      case Op::Mul:
        --top;
        stack[top - 1] *= stack[top];
        break;
      case Op::Div:
        --top;
        stack[top - 1] /= stack[top];
        break;
      case Op::Pow:
        --top;
        stack[top - 1] = std::pow(stack[top - 1], stack[top]);
        break;
      case Op::PowInt: {
        double const b = stack[top - 1];
        double r = b;
        for (int k = 1; k < in.index; ++k) {
          r *= b;
        }
        stack[top - 1] = r;
        break;
      }
      case Op::Neg:
        stack[top - 1] = -stack[top - 1];
        break;
      case Op::Abs:
        stack[top - 1] = std::abs(stack[top - 1]);
        break;
      case Op::Exp:
        stack[top - 1] = std::exp(stack[top - 1]);
        break;
      case Op::Sin:
        stack[top - 1] = std::sin(stack[top - 1]);
        break;
      case Op::Cos:
        stack[top - 1] = std::cos(stack[top - 1]);
        break;
      case Op::Min:
        --top;
        stack[top - 1] = std::min(stack[top - 1], stack[top]);
        break;
      case Op::Max:
        --top;
        stack[top - 1] = std::max(stack[top - 1], stack[top]);
        break;
    }
  }
  return stack[0];
}

}  // namespace hjj
