#pragma once

// Scalar expression language for coefficient fields, boundary data and exact
// solutions.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | variable | func '(' expr ')' | '(' expr ')'
//
// Variables: x y z t tag pi. Functions: sin cos tan exp log sqrt abs.
// `tag` is the entity tag of the element the point belongs to, which gives
// piecewise definitions per region.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "femtet/types.hpp"

namespace femtet {

enum class ExprOp : std::uint8_t {
  Number,
  X,
  Y,
  Z,
  T,
  Tag,
  Pi,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Sin,
  Cos,
  Tan,
  Exp,
  Log,
  Sqrt,
  Abs,
};

struct ExprNode {
  ExprOp op = ExprOp::Number;
  double value = 0.0;  // Number only

  friend bool operator==(const ExprNode&, const ExprNode&) = default;
};

class Expr {
 public:
  /// The constant 0.
  Expr();

  static Expr parse(std::string_view src);
  static Expr constant(double value);

  /// Evaluates at one point. IEEE semantics: no exception on NaN/Inf.
  double eval(const Vec3& x, double t = 0.0, double tag = 0.0) const;

  /// Fully parenthesized rendering that parses back to an equal tree.
  std::string to_string() const;

  bool is_constant() const;
  bool uses_time() const;
  /// Value of a constant expression.
  double constant_value() const;

  const std::vector<ExprNode>& postfix() const { return nodes_; }

  friend bool operator==(const Expr& a, const Expr& b) {
    return a.nodes_ == b.nodes_;
  }

 private:
  explicit Expr(std::vector<ExprNode> nodes);

  std::vector<ExprNode> nodes_;  // postfix order
  int max_stack_ = 1;
};

/// Pointwise evaluation over a batch; throws NonFiniteValue if any result is
/// NaN or infinite.
std::vector<double> eval_batch(const Expr& e, std::span<const Vec3> points,
                               double t, std::span<const int> tags);

enum class FieldShape { Scalar, Vector3, Matrix3 };

/// A PDE coefficient: one expression per component (row-major for matrices).
class CoefficientField {
 public:
  CoefficientField();  // scalar zero

  static CoefficientField scalar(Expr e);
  static CoefficientField scalar(std::string_view src);
  static CoefficientField vector3(std::array<Expr, 3> e);
  static CoefficientField matrix3(std::array<Expr, 9> e);
  /// k·I from a scalar expression.
  static CoefficientField isotropic(Expr k);

  FieldShape shape() const { return shape_; }
  int size() const { return static_cast<int>(entries_.size()); }
  const Expr& entry(int i) const { return entries_[i]; }

  bool is_constant() const;
  /// True when every component is the literal constant 0.
  bool is_zero() const;
  bool uses_time() const;

  /// Evaluates all components; throws NonFiniteValue on NaN/Inf.
  void eval(const Vec3& x, double t, int tag, std::span<double> out) const;

 private:
  FieldShape shape_ = FieldShape::Scalar;
  std::vector<Expr> entries_;
};

}  // namespace femtet
