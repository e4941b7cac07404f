#pragma once

#include <string>
#include <vector>

#include "kfbem/types.hpp"

namespace kfbem {

/// Real arithmetic expression in x1, x2 (aliases x, y) with constants pi, e,
/// operators + - * / ^ and functions sin cos tan exp log sqrt abs.
/// Compiled once to a postfix program.
class Expression {
 public:
  Expression() = default;
  explicit Expression(double constant);

  /// Throws Error(Parse) with the offending position.
  static Expression parse(const std::string& text);

  double operator()(Point2 x) const;

  bool is_constant() const { return constant_; }
  const std::string& text() const { return text_; }

 private:
  enum class Op : unsigned char { Push, X1, X2, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Tan, Exp, Log, Sqrt, Abs };
  struct Instr {
    Op op;
    double value;
  };
  friend class ExpressionParser;

  std::vector<Instr> program_;
  std::string text_;
  bool constant_ = true;
  int max_depth_ = 1;
};

}  // namespace kfbem
