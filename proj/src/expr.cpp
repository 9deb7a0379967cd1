#include "femtet/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "femtet/error.hpp"

namespace femtet {
namespace {

int arity(ExprOp op) {
  switch (op) {
    case ExprOp::Number:
    case ExprOp::X:
    case ExprOp::Y:
    case ExprOp::Z:
    case ExprOp::T:
    case ExprOp::Tag:
    case ExprOp::Pi:
      return 0;
    case ExprOp::Add:
    case ExprOp::Sub:
    case ExprOp::Mul:
    case ExprOp::Div:
    case ExprOp::Pow:
      return 2;
    default:
      return 1;
  }
}

const char* function_name(ExprOp op) {
  switch (op) {
    case ExprOp::Sin: return "sin";
    case ExprOp::Cos: return "cos";
    case ExprOp::Tan: return "tan";
    case ExprOp::Exp: return "exp";
    case ExprOp::Log: return "log";
    case ExprOp::Sqrt: return "sqrt";
    case ExprOp::Abs: return "abs";
    default: return nullptr;
  }
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  std::vector<ExprNode> run() {
    skip_ws();
    if (pos_ >= src_.size()) fail("empty expression");
    parse_expr();
    skip_ws();
    if (pos_ < src_.size()) {
      fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    }
    return std::move(out_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::SyntaxError,
                "at byte offset " + std::to_string(pos_) + ": " + what +
                    " in \"" + std::string(src_) + "\"");
  }

  void skip_ws() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
            src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void emit(ExprOp op, double value = 0.0) { out_.push_back({op, value}); }

  void parse_expr() {
    parse_term();
    while (true) {
      if (accept('+')) {
        parse_term();
        emit(ExprOp::Add);
      } else if (accept('-')) {
        parse_term();
        emit(ExprOp::Sub);
      } else {
        return;
      }
    }
  }

  void parse_term() {
    parse_unary();
    while (true) {
      if (accept('*')) {
        parse_unary();
        emit(ExprOp::Mul);
      } else if (accept('/')) {
        parse_unary();
        emit(ExprOp::Div);
      } else {
        return;
      }
    }
  }

  void parse_unary() {
    if (accept('-')) {
      parse_unary();
      emit(ExprOp::Neg);
    } else if (accept('+')) {
      parse_unary();
    } else {
      parse_power();
    }
  }

  void parse_power() {
    parse_primary();
    if (accept('^')) {
      parse_unary();
      emit(ExprOp::Pow);
    }
  }

  void parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      parse_expr();
      if (!accept(')')) fail("expected ')'");
      return;
    }
    if ((c >= '0' && c <= '9') || c == '.') {
      parse_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      parse_identifier();
      return;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  void parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') {
        digits();
      } else {
        pos_ = save;
      }
    }
    double v = 0.0;
    auto [p, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (ec != std::errc() || p != src_.data() + pos_ || !std::isfinite(v)) {
      pos_ = start;
      fail("invalid number");
    }
    emit(ExprOp::Number, v);
  }

  void parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = src_.substr(start, pos_ - start);
    static constexpr std::pair<std::string_view, ExprOp> kVars[] = {
        {"x", ExprOp::X}, {"y", ExprOp::Y},     {"z", ExprOp::Z},
        {"t", ExprOp::T}, {"tag", ExprOp::Tag}, {"pi", ExprOp::Pi}};
    static constexpr std::pair<std::string_view, ExprOp> kFuncs[] = {
        {"sin", ExprOp::Sin},   {"cos", ExprOp::Cos}, {"tan", ExprOp::Tan},
        {"exp", ExprOp::Exp},   {"log", ExprOp::Log}, {"sqrt", ExprOp::Sqrt},
        {"abs", ExprOp::Abs}};
    for (const auto& [n, op] : kVars) {
      if (n == name) {
        emit(op);
        return;
      }
    }
    for (const auto& [n, op] : kFuncs) {
      if (n == name) {
        if (!accept('(')) fail("expected '(' after " + std::string(name));
        parse_expr();
        if (!accept(')')) fail("expected ')'");
        emit(op);
        return;
      }
    }
    throw Error(ErrorKind::UnknownIdentifier,
                "'" + std::string(name) + "' at byte offset " +
                    std::to_string(start) + " in \"" + std::string(src_) +
                    "\"");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::vector<ExprNode> out_;
};

int stack_depth(const std::vector<ExprNode>& nodes) {
  int depth = 0;
  int max_depth = 1;
  for (const auto& n : nodes) {
    depth += 1 - arity(n.op);
    max_depth = std::max(max_depth, depth);
  }
  return max_depth;
}

double apply(ExprOp op, double a, double b) {
  switch (op) {
    case ExprOp::Neg: return -a;
    case ExprOp::Add: return a + b;
    case ExprOp::Sub: return a - b;
    case ExprOp::Mul: return a * b;
    case ExprOp::Div: return a / b;
    case ExprOp::Pow: return std::pow(a, b);
    case ExprOp::Sin: return std::sin(a);
    case ExprOp::Cos: return std::cos(a);
    case ExprOp::Tan: return std::tan(a);
    case ExprOp::Exp: return std::exp(a);
    case ExprOp::Log: return std::log(a);
    case ExprOp::Sqrt: return std::sqrt(a);
    case ExprOp::Abs: return std::abs(a);
    default: return 0.0;
  }
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // Shortest representation that still round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) {
      s = buf;
      break;
    }
  }
  return s;
}

}  // namespace

Expr::Expr() : nodes_{{ExprOp::Number, 0.0}} {}

Expr::Expr(std::vector<ExprNode> nodes)
    : nodes_(std::move(nodes)), max_stack_(stack_depth(nodes_)) {}

Expr Expr::parse(std::string_view src) { return Expr(Parser(src).run()); }

Expr Expr::constant(double value) {
  return Expr(std::vector<ExprNode>{{ExprOp::Number, value}});
}

double Expr::eval(const Vec3& x, double t, double tag) const {
  constexpr int kInline = 32;
  double inline_stack[kInline] = {};
  std::vector<double> heap;
  double* stack = inline_stack;
  if (max_stack_ > kInline) {
    heap.resize(max_stack_);
    stack = heap.data();
  }
  int sp = 0;
  for (const ExprNode& n : nodes_) {
    switch (n.op) {
      case ExprOp::Number: stack[sp++] = n.value; break;
      case ExprOp::X: stack[sp++] = x[0]; break;
      case ExprOp::Y: stack[sp++] = x[1]; break;
      case ExprOp::Z: stack[sp++] = x[2]; break;
      case ExprOp::T: stack[sp++] = t; break;
      case ExprOp::Tag: stack[sp++] = tag; break;
      case ExprOp::Pi: stack[sp++] = std::numbers::pi; break;
      case ExprOp::Add:
      case ExprOp::Sub:
      case ExprOp::Mul:
      case ExprOp::Div:
      case ExprOp::Pow:
        --sp;
        stack[sp - 1] = apply(n.op, stack[sp - 1], stack[sp]);
        break;
      default:
        stack[sp - 1] = apply(n.op, stack[sp - 1], 0.0);
        break;
    }
  }
  return stack[0];
}

std::string Expr::to_string() const {
  std::vector<std::string> stack;
  for (const ExprNode& n : nodes_) {
    switch (n.op) {
      case ExprOp::Number:
        stack.push_back(n.value < 0 ? "(-" + format_number(-n.value) + ")"
                                    : format_number(n.value));
        break;
      case ExprOp::X: stack.emplace_back("x"); break;
      case ExprOp::Y: stack.emplace_back("y"); break;
      case ExprOp::Z: stack.emplace_back("z"); break;
      case ExprOp::T: stack.emplace_back("t"); break;
      case ExprOp::Tag: stack.emplace_back("tag"); break;
      case ExprOp::Pi: stack.emplace_back("pi"); break;
      case ExprOp::Neg: stack.back() = "(-" + stack.back() + ")"; break;
      case ExprOp::Add:
      case ExprOp::Sub:
      case ExprOp::Mul:
      case ExprOp::Div:
      case ExprOp::Pow: {
        static constexpr char kSym[] = {'+', '-', '*', '/', '^'};
        const char sym = kSym[static_cast<int>(n.op) - static_cast<int>(ExprOp::Add)];
        std::string rhs = std::move(stack.back());
        stack.pop_back();
        stack.back() = "(" + stack.back() + " " + sym + " " + rhs + ")";
        break;
      }
      default:
        stack.back() = std::string(function_name(n.op)) + "(" + stack.back() + ")";
        break;
    }
  }
  return stack.back();
}

bool Expr::is_constant() const {
  for (const auto& n : nodes_) {
    if (n.op == ExprOp::X || n.op == ExprOp::Y || n.op == ExprOp::Z ||
        n.op == ExprOp::T || n.op == ExprOp::Tag) {
      return false;
    }
  }
  return true;
}

bool Expr::uses_time() const {
  for (const auto& n : nodes_) {
    if (n.op == ExprOp::T) return true;
  }
  return false;
}

double Expr::constant_value() const { return eval({0.0, 0.0, 0.0}); }

std::vector<double> eval_batch(const Expr& e, std::span<const Vec3> points,
                               double t, std::span<const int> tags) {
  if (!tags.empty() && tags.size() != points.size()) {
    throw Error(ErrorKind::ShapeMismatch, "tags and points differ in length");
  }
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    out[i] = e.eval(points[i], t, tags.empty() ? 0.0 : tags[i]);
    if (!std::isfinite(out[i])) {
      throw Error(ErrorKind::NonFiniteValue,
                  e.to_string() + " evaluates to " + std::to_string(out[i]) +
                      " at point " + std::to_string(i + 1));
    }
  }
  return out;
}

CoefficientField::CoefficientField() : entries_{Expr()} {}

CoefficientField CoefficientField::scalar(Expr e) {
  CoefficientField f;
  f.entries_ = {std::move(e)};
  return f;
}

CoefficientField CoefficientField::scalar(std::string_view src) {
  return scalar(Expr::parse(src));
}

CoefficientField CoefficientField::vector3(std::array<Expr, 3> e) {
  CoefficientField f;
  f.shape_ = FieldShape::Vector3;
  f.entries_.assign(e.begin(), e.end());
  return f;
}

CoefficientField CoefficientField::matrix3(std::array<Expr, 9> e) {
  CoefficientField f;
  f.shape_ = FieldShape::Matrix3;
  f.entries_.assign(e.begin(), e.end());
  return f;
}

CoefficientField CoefficientField::isotropic(Expr k) {
  std::array<Expr, 9> e;
  e[0] = k;
  e[4] = k;
  e[8] = k;
  return matrix3(e);
}

bool CoefficientField::is_constant() const {
  for (const auto& e : entries_) {
    if (!e.is_constant()) return false;
  }
  return true;
}

bool CoefficientField::is_zero() const {
  for (const auto& e : entries_) {
    const auto& nodes = e.postfix();
    if (nodes.size() != 1 || nodes[0].op != ExprOp::Number ||
        nodes[0].value != 0.0) {
      return false;
    }
  }
  return true;
}

bool CoefficientField::uses_time() const {
  for (const auto& e : entries_) {
    if (e.uses_time()) return true;
  }
  return false;
}

void CoefficientField::eval(const Vec3& x, double t, int tag,
                            std::span<double> out) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    out[i] = entries_[i].eval(x, t, tag);
    if (!std::isfinite(out[i])) {
      throw Error(ErrorKind::NonFiniteValue,
                  entries_[i].to_string() + " evaluates to " +
                      std::to_string(out[i]) + " at (" + std::to_string(x[0]) +
                      ", " + std::to_string(x[1]) + ", " +
                      std::to_string(x[2]) + ")");
    }
  }
}

}  // namespace femtet
