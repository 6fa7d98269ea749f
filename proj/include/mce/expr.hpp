#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "mce/geom.hpp"
#include "mce/types.hpp"

namespace mce {

/// Byte range [begin, end) into the original source text.
struct SourceSpan {
  int begin = 0;
  int end = 0;
};

struct ParseError : std::runtime_error {
  SourceSpan span;
  ParseError(const std::string& message, SourceSpan s)
      : std::runtime_error(message), span(s) {}
};

struct EvalDomainError : std::runtime_error {
  SourceSpan span;
  EvalDomainError(const std::string& message, SourceSpan s)
      : std::runtime_error(message), span(s) {}
};

enum class NodeKind { Constant, Var, Unary, Binary, PowInt };

enum class UnaryOp { Neg, Sin, Cos, Sinh, Cosh, Tanh, Exp, Log, Sqrt };

enum class BinaryOp { Add, Sub, Mul, Div };

struct ExprNode {
  NodeKind kind;
  SourceSpan span;
  double constant = 0.0;  // Constant
  int var_index = -1;     // Var
  UnaryOp uop{};
  BinaryOp bop{};
  int exponent = 0;  // PowInt
  std::unique_ptr<ExprNode> lhs, rhs;  // Unary/PowInt use lhs only
};

/// One parsed coordinate expression over variables u1..un.
struct ExprAst {
  std::unique_ptr<ExprNode> root;
  int n_vars = 0;
  std::string source;
};

/// Second-order jet: value, gradient, symmetric Hessian.
struct Jet2 {
  double value = 0.0;
  ParamVec grad;
  ParamMat hess;

  explicit Jet2(int n = 0) {
    grad.setZero(n);
    hess.setZero(n, n);
  }
  static Jet2 constant(double v, int n) {
    Jet2 j(n);
    j.value = v;
    return j;
  }
  static Jet2 variable(double v, int index, int n) {
    Jet2 j(n);
    j.value = v;
    j.grad[index] = 1.0;
    return j;
  }
};

/// Parses a semicolon-separated list of `ambient_dim` expressions over
/// u1..un (aliases: u, v, w for n <= 3). Throws ParseError with a source
/// span on malformed input.
std::vector<ExprAst> parse_immersion(const std::string& source, int n, int ambient_dim);

/// Parses a single expression.
ExprAst parse_expression(const std::string& source, int n);

/// Forward-mode evaluation of the full 2-jet. Division by zero and log/sqrt
/// domain violations throw EvalDomainError carrying the node's span.
Jet2 eval_jet2(const ExprAst& ast, const ParamVec& u);

/// Canonical text form; parse(pretty_print(ast)) is structurally equal to ast.
std::string pretty_print(const ExprAst& ast);

/// Structural equality (spans ignored).
bool structurally_equal(const ExprAst& a, const ExprAst& b);

/// Wraps per-coordinate ASTs into a chart with the 2-jet interface.
ImmersionChart chart_from_expressions(std::vector<ExprAst> asts,
                                      std::vector<AxisRange> domain,
                                      const std::string& label);

}  // namespace mce
