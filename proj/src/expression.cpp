#include "kfbem/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "kfbem/error.hpp"

namespace kfbem {

class ExpressionParser {
 public:
  explicit ExpressionParser(const std::string& s) : s_(s) {}

  Expression run() {
    expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    Expression e;
    e.program_ = std::move(prog_);
    e.text_ = s_;
    e.constant_ = true;
    int depth = 0;
    for (const auto& in : e.program_) {
      if (in.op == Expression::Op::X1 || in.op == Expression::Op::X2) e.constant_ = false;
      switch (in.op) {
        case Expression::Op::Push:
        case Expression::Op::X1:
        case Expression::Op::X2:
          ++depth;
          break;
        case Expression::Op::Add:
        case Expression::Op::Sub:
        case Expression::Op::Mul:
        case Expression::Op::Div:
        case Expression::Op::Pow:
          --depth;
          break;
        default:
          break;
      }
      e.max_depth_ = std::max(e.max_depth_, depth);
    }
    return e;
  }

 private:
  using Op = Expression::Op;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::Parse, what + " at position " + std::to_string(pos_) + " in \"" + s_ + "\"");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void emit(Op op, double v = 0.0) { prog_.push_back({op, v}); }

  void expr() {
    term();
    for (;;) {
      if (accept('+')) {
        term();
        emit(Op::Add);
      } else if (accept('-')) {
        term();
        emit(Op::Sub);
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
        emit(Op::Mul);
      } else if (accept('/')) {
        unary();
        emit(Op::Div);
      } else {
        return;
      }
    }
  }
  void unary() {
    if (accept('-')) {
      unary();
      emit(Op::Neg);
    } else if (accept('+')) {
      unary();
    } else {
      power();
    }
  }
  void power() {
    primary();
    if (accept('^')) {
      unary();  // right associative, binds looser than unary minus on the exponent
      emit(Op::Pow);
    }
  }
  void primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (accept('(')) {
      expr();
      if (!accept(')')) fail("expected ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("malformed number");
      }
      pos_ += used;
      emit(Op::Push, v);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        ++pos_;
      }
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "x1" || id == "x") return emit(Op::X1);
      if (id == "x2" || id == "y") return emit(Op::X2);
      if (id == "pi") return emit(Op::Push, std::numbers::pi);
      if (id == "e") return emit(Op::Push, std::numbers::e);
      Op f;
      if (id == "sin") f = Op::Sin;
      else if (id == "cos") f = Op::Cos;
      else if (id == "tan") f = Op::Tan;
      else if (id == "exp") f = Op::Exp;
      else if (id == "log") f = Op::Log;
      else if (id == "sqrt") f = Op::Sqrt;
      else if (id == "abs") f = Op::Abs;
      else {
        pos_ = start;
        fail("unknown identifier '" + id + "'");
      }
      if (!accept('(')) fail("expected '(' after " + id);
      expr();
      if (!accept(')')) fail("expected ')'");
      emit(f);
      return;
    }
    fail("unexpected character");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  std::vector<Expression::Instr> prog_;
};

Expression::Expression(double constant) {
  program_.push_back({Op::Push, constant});
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", constant);
  text_ = buf;
}

Expression Expression::parse(const std::string& text) { return ExpressionParser(text).run(); }

double Expression::operator()(Point2 x) const {
  if (program_.empty()) return 0.0;
  double small[16];
  std::vector<double> big;
  double* st = small;
  if (max_depth_ > 16) {
    big.resize(max_depth_);
    st = big.data();
  }
  int sp = 0;
  for (const auto& in : program_) {
    switch (in.op) {
      case Op::Push: st[sp++] = in.value; break;
      case Op::X1: st[sp++] = x.x; break;
      case Op::X2: st[sp++] = x.y; break;
      case Op::Add: --sp; st[sp - 1] += st[sp]; break;
      case Op::Sub: --sp; st[sp - 1] -= st[sp]; break;
      case Op::Mul: --sp; st[sp - 1] *= st[sp]; break;
      case Op::Div: --sp; st[sp - 1] /= st[sp]; break;
      case Op::Pow: --sp; st[sp - 1] = std::pow(st[sp - 1], st[sp]); break;
      case Op::Neg: st[sp - 1] = -st[sp - 1]; break;
      case Op::Sin: st[sp - 1] = std::sin(st[sp - 1]); break;
      case Op::Cos: st[sp - 1] = std::cos(st[sp - 1]); break;
      case Op::Tan: st[sp - 1] = std::tan(st[sp - 1]); break;
      case Op::Exp: st[sp - 1] = std::exp(st[sp - 1]); break;
      case Op::Log: st[sp - 1] = std::log(st[sp - 1]); break;
      case Op::Sqrt: st[sp - 1] = std::sqrt(st[sp - 1]); break;
      case Op::Abs: st[sp - 1] = std::abs(st[sp - 1]); break;
    }
  }
  return st[0];
}

}  // namespace kfbem
