#include "mce/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <sstream>

#include "mce/util.hpp"

namespace mce {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

enum class TokKind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Semi, End };

struct Token {
  TokKind kind;
  SourceSpan span;
  double number = 0.0;
  bool number_is_integer = false;
  std::string text;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const int begin = static_cast<int>(pos_);
    if (pos_ >= src_.size()) return {TokKind::End, {begin, begin}, 0.0, false, ""};

    const char c = src_[pos_];
    switch (c) {
      case '+': return simple(TokKind::Plus);
      case '-': return simple(TokKind::Minus);
      case '*': return simple(TokKind::Star);
      case '/': return simple(TokKind::Slash);
      case '^': return simple(TokKind::Caret);
      case '(': return simple(TokKind::LParen);
      case ')': return simple(TokKind::RParen);
      case ';': return simple(TokKind::Semi);
      default: break;
    }

    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number(begin);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return lex_ident(begin);

    throw ParseError(std::string("unexpected character '") + c + "'",
                     {begin, begin + 1});
  }

 private:
  Token simple(TokKind kind) {
    const int begin = static_cast<int>(pos_);
    ++pos_;
    return {kind, {begin, begin + 1}, 0.0, false, std::string(1, src_[begin])};
  }

  Token lex_number(int begin) {
    bool saw_dot = false, saw_exp = false;
    std::size_t p = pos_;
    while (p < src_.size()) {
      const char c = src_[p];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        ++p;
      } else if (c == '.' && !saw_dot && !saw_exp) {
        saw_dot = true;
        ++p;
      } else if ((c == 'e' || c == 'E') && !saw_exp && p > pos_) {
        saw_exp = true;
        ++p;
        if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
        if (p >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[p])))
          throw ParseError("malformed numeric literal",
                           {begin, static_cast<int>(p)});
      } else {
        break;
      }
    }
    const std::string text = src_.substr(pos_, p - pos_);
    char* endp = nullptr;
    const double value = std::strtod(text.c_str(), &endp);
    if (endp != text.c_str() + text.size())
      throw ParseError("malformed numeric literal", {begin, static_cast<int>(p)});
    pos_ = p;
    return {TokKind::Number, {begin, static_cast<int>(p)}, value, !saw_dot && !saw_exp, text};
  }

  Token lex_ident(int begin) {
    std::size_t p = pos_;
    while (p < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[p])) || src_[p] == '_'))
      ++p;
    const std::string text = src_.substr(pos_, p - pos_);
    pos_ = p;
    return {TokKind::Ident, {begin, static_cast<int>(p)}, 0.0, false, text};
  }

  const std::string& src_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Parser: precedence  ^  >  unary -  >  * /  >  + -
// ---------------------------------------------------------------------------

const std::map<std::string, UnaryOp>& function_table() {
  static const std::map<std::string, UnaryOp> table = {
      {"sin", UnaryOp::Sin},   {"cos", UnaryOp::Cos},   {"sinh", UnaryOp::Sinh},
      {"cosh", UnaryOp::Cosh}, {"tanh", UnaryOp::Tanh}, {"exp", UnaryOp::Exp},
      {"log", UnaryOp::Log},   {"sqrt", UnaryOp::Sqrt},
  };
  return table;
}

class Parser {
 public:
  Parser(const std::string& src, int n) : src_(src), lexer_(src), n_(n) { advance(); }

  std::unique_ptr<ExprNode> parse_full() {
    auto node = parse_sum();
    expect_one_of({TokKind::End, TokKind::Semi}, "expected end of expression");
    return node;
  }

  // Parses a ;-separated list.
  std::vector<std::unique_ptr<ExprNode>> parse_list() {
    std::vector<std::unique_ptr<ExprNode>> nodes;
    nodes.push_back(parse_sum());
    while (tok_.kind == TokKind::Semi) {
      advance();
      nodes.push_back(parse_sum());
    }
    if (tok_.kind != TokKind::End)
      throw ParseError("unexpected token '" + tok_.text + "'", tok_.span);
    return nodes;
  }

 private:
  void advance() { tok_ = lexer_.next(); }

  void expect_one_of(std::initializer_list<TokKind> kinds, const std::string& message) {
    for (TokKind k : kinds)
      if (tok_.kind == k) return;
    throw ParseError(message, tok_.span);
  }

  std::unique_ptr<ExprNode> parse_sum() {
    auto lhs = parse_term();
    while (tok_.kind == TokKind::Plus || tok_.kind == TokKind::Minus) {
      const BinaryOp op = tok_.kind == TokKind::Plus ? BinaryOp::Add : BinaryOp::Sub;
      advance();
      auto rhs = parse_term();
      lhs = make_binary(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  std::unique_ptr<ExprNode> parse_term() {
    auto lhs = parse_unary();
    while (tok_.kind == TokKind::Star || tok_.kind == TokKind::Slash) {
      const BinaryOp op = tok_.kind == TokKind::Star ? BinaryOp::Mul : BinaryOp::Div;
      advance();
      auto rhs = parse_unary();
      lhs = make_binary(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  std::unique_ptr<ExprNode> parse_unary() {
    if (tok_.kind == TokKind::Minus) {
      const SourceSpan start = tok_.span;
      advance();
      auto operand = parse_unary();
      auto node = std::make_unique<ExprNode>();
      node->kind = NodeKind::Unary;
      node->uop = UnaryOp::Neg;
      node->span = {start.begin, operand->span.end};
      node->lhs = std::move(operand);
      return node;
    }
    return parse_power();
  }

  std::unique_ptr<ExprNode> parse_power() {
    auto base = parse_atom();
    while (tok_.kind == TokKind::Caret) {
      advance();
      int sign = 1;
      SourceSpan exp_span = tok_.span;
      if (tok_.kind == TokKind::Minus) {
        sign = -1;
        advance();
      }
      if (tok_.kind != TokKind::Number || !tok_.number_is_integer)
        throw ParseError("exponent must be a constant integer literal", tok_.span);
      if (std::abs(tok_.number) > 64)
        throw ParseError("exponent magnitude limited to 64", tok_.span);
      const int k = sign * static_cast<int>(tok_.number);
      exp_span.end = tok_.span.end;
      advance();
      auto node = std::make_unique<ExprNode>();
      node->kind = NodeKind::PowInt;
      node->exponent = k;
      node->span = {base->span.begin, exp_span.end};
      node->lhs = std::move(base);
      base = std::move(node);
    }
    return base;
  }

  std::unique_ptr<ExprNode> parse_atom() {
    switch (tok_.kind) {
      case TokKind::Number: {
        auto node = std::make_unique<ExprNode>();
        node->kind = NodeKind::Constant;
        node->constant = tok_.number;
        node->span = tok_.span;
        advance();
        return node;
      }
      case TokKind::LParen: {
        advance();
        auto inner = parse_sum();
        if (tok_.kind != TokKind::RParen)
          throw ParseError(tok_.kind == TokKind::End ? "unexpected end of input: unbalanced '('"
                                                     : "expected ')'",
                           tok_.span);
        advance();
        return inner;
      }
      case TokKind::Ident:
        return parse_ident();
      case TokKind::End:
        throw ParseError("unexpected end of input", tok_.span);
      default:
        throw ParseError("unexpected token '" + tok_.text + "'", tok_.span);
    }
  }

  std::unique_ptr<ExprNode> parse_ident() {
    const Token ident = tok_;
    advance();

    if (ident.text == "pi") {
      auto node = std::make_unique<ExprNode>();
      node->kind = NodeKind::Constant;
      node->constant = M_PI;
      node->span = ident.span;
      return node;
    }

    if (auto it = function_table().find(ident.text); it != function_table().end()) {
      if (tok_.kind != TokKind::LParen)
        throw ParseError("function '" + ident.text + "' requires parenthesized argument",
                         tok_.span);
      advance();
      auto arg = parse_sum();
      if (tok_.kind != TokKind::RParen)
        throw ParseError(tok_.kind == TokKind::End ? "unexpected end of input: unbalanced '('"
                                                   : "expected ')'",
                         tok_.span);
      const SourceSpan close = tok_.span;
      advance();
      auto node = std::make_unique<ExprNode>();
      node->kind = NodeKind::Unary;
      node->uop = it->second;
      node->span = {ident.span.begin, close.end};
      node->lhs = std::move(arg);
      return node;
    }

    const int index = variable_index(ident.text);
    if (index < 0)
      throw ParseError("unknown identifier '" + ident.text + "'", ident.span);
    if (index >= n_)
      throw ParseError("variable '" + ident.text + "' exceeds declared dimension n = " +
                           std::to_string(n_),
                       ident.span);
    auto node = std::make_unique<ExprNode>();
    node->kind = NodeKind::Var;
    node->var_index = index;
    node->span = ident.span;
    return node;
  }

  // u1..u9 plus aliases u, v, w.
  static int variable_index(const std::string& name) {
    if (name == "u") return 0;
    if (name == "v") return 1;
    if (name == "w") return 2;
    if (name.size() == 2 && name[0] == 'u' && name[1] >= '1' && name[1] <= '9')
      return name[1] - '1';
    return -1;
  }

  std::unique_ptr<ExprNode> make_binary(BinaryOp op, std::unique_ptr<ExprNode> lhs,
                                        std::unique_ptr<ExprNode> rhs) {
    auto node = std::make_unique<ExprNode>();
    node->kind = NodeKind::Binary;
    node->bop = op;
    node->span = {lhs->span.begin, rhs->span.end};
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    return node;
  }

  const std::string& src_;
  Lexer lexer_;
  int n_;
  Token tok_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Parse entry points
// ---------------------------------------------------------------------------

std::vector<ExprAst> parse_immersion(const std::string& source, int n, int ambient_dim) {
  if (n < 1 || n > kMaxParamDim)
    throw ParseError("dimension n must be in [1, " + std::to_string(kMaxParamDim) + "]", {0, 0});
  if (ambient_dim <= n || ambient_dim > kMaxAmbientDim)
    throw ParseError("ambient dimension must satisfy n < ambient <= " +
                         std::to_string(kMaxAmbientDim),
                     {0, 0});
  Parser parser(source, n);
  auto nodes = parser.parse_list();
  if (static_cast<int>(nodes.size()) != ambient_dim)
    throw ParseError("expected " + std::to_string(ambient_dim) + " expressions, got " +
                         std::to_string(nodes.size()),
                     {0, static_cast<int>(source.size())});
  std::vector<ExprAst> asts;
  asts.reserve(nodes.size());
  for (auto& node : nodes) {
    ExprAst ast;
    ast.root = std::move(node);
    ast.n_vars = n;
    ast.source = source;
    asts.push_back(std::move(ast));
  }
  return asts;
}

ExprAst parse_expression(const std::string& source, int n) {
  Parser parser(source, n);
  ExprAst ast;
  ast.root = parser.parse_full();
  ast.n_vars = n;
  ast.source = source;
  return ast;
}

// ---------------------------------------------------------------------------
// Second-order forward AD
// ---------------------------------------------------------------------------

namespace {

Jet2 jet_binary(BinaryOp op, const Jet2& a, const Jet2& b, const SourceSpan& span) {
  const int n = static_cast<int>(a.grad.size());
  Jet2 out(n);
  switch (op) {
    case BinaryOp::Add:
      out.value = a.value + b.value;
      out.grad = a.grad + b.grad;
      out.hess = a.hess + b.hess;
      return out;
    case BinaryOp::Sub:
      out.value = a.value - b.value;
      out.grad = a.grad - b.grad;
      out.hess = a.hess - b.hess;
      return out;
    case BinaryOp::Mul:
      out.value = a.value * b.value;
      out.grad = a.value * b.grad + b.value * a.grad;
      out.hess = a.value * b.hess + b.value * a.hess + a.grad * b.grad.transpose() +
                 b.grad * a.grad.transpose();
      return out;
    case BinaryOp::Div: {
      if (b.value == 0.0) throw EvalDomainError("division by zero", span);
      const double inv = 1.0 / b.value;
      out.value = a.value * inv;
      out.grad = (a.grad - out.value * b.grad) * inv;
      out.hess = (a.hess - out.value * b.hess - out.grad * b.grad.transpose() -
                  b.grad * out.grad.transpose()) *
                 inv;
      return out;
    }
  }
  throw std::logic_error("unreachable binary op");
}

// f(g) with value/first/second derivative of f at g.value.
Jet2 jet_chain(double f, double fp, double fpp, const Jet2& g) {
  const int n = static_cast<int>(g.grad.size());
  Jet2 out(n);
  out.value = f;
  out.grad = fp * g.grad;
  out.hess = fp * g.hess + fpp * (g.grad * g.grad.transpose());
  return out;
}

Jet2 jet_unary(UnaryOp op, const Jet2& g, const SourceSpan& span) {
  const double v = g.value;
  switch (op) {
    case UnaryOp::Neg: {
      Jet2 out(static_cast<int>(g.grad.size()));
      out.value = -v;
      out.grad = -g.grad;
      out.hess = -g.hess;
      return out;
    }
    case UnaryOp::Sin: return jet_chain(std::sin(v), std::cos(v), -std::sin(v), g);
    case UnaryOp::Cos: return jet_chain(std::cos(v), -std::sin(v), -std::cos(v), g);
    case UnaryOp::Sinh: return jet_chain(std::sinh(v), std::cosh(v), std::sinh(v), g);
    case UnaryOp::Cosh: return jet_chain(std::cosh(v), std::sinh(v), std::cosh(v), g);
    case UnaryOp::Tanh: {
      const double t = std::tanh(v);
      const double sech2 = 1.0 - t * t;
      return jet_chain(t, sech2, -2.0 * t * sech2, g);
    }
    case UnaryOp::Exp: {
      const double e = std::exp(v);
      return jet_chain(e, e, e, g);
    }
    case UnaryOp::Log:
      if (!(v > 0.0)) throw EvalDomainError("log of non-positive value", span);
      return jet_chain(std::log(v), 1.0 / v, -1.0 / (v * v), g);
    case UnaryOp::Sqrt: {
      if (!(v > 0.0)) throw EvalDomainError("sqrt of non-positive value", span);
      const double s = std::sqrt(v);
      return jet_chain(s, 0.5 / s, -0.25 / (s * v), g);
    }
  }
  throw std::logic_error("unreachable unary op");
}

Jet2 jet_pow_int(const Jet2& g, int k, const SourceSpan& span) {
  const double v = g.value;
  if (k == 0) return Jet2::constant(1.0, static_cast<int>(g.grad.size()));
  if (v == 0.0 && k < 0) throw EvalDomainError("zero raised to a negative power", span);
  const double f = std::pow(v, k);
  const double fp = k * std::pow(v, k - 1);
  const double fpp = (k == 1) ? 0.0 : static_cast<double>(k) * (k - 1) * std::pow(v, k - 2);
  return jet_chain(f, fp, fpp, g);
}

Jet2 eval_node(const ExprNode& node, const ParamVec& u) {
  const int n = static_cast<int>(u.size());
  switch (node.kind) {
    case NodeKind::Constant: return Jet2::constant(node.constant, n);
    case NodeKind::Var: return Jet2::variable(u[node.var_index], node.var_index, n);
    case NodeKind::Unary: return jet_unary(node.uop, eval_node(*node.lhs, u), node.span);
    case NodeKind::Binary:
      return jet_binary(node.bop, eval_node(*node.lhs, u), eval_node(*node.rhs, u), node.span);
    case NodeKind::PowInt: return jet_pow_int(eval_node(*node.lhs, u), node.exponent, node.span);
  }
  throw std::logic_error("unreachable node kind");
}

}  // namespace

Jet2 eval_jet2(const ExprAst& ast, const ParamVec& u) {
  if (static_cast<int>(u.size()) != ast.n_vars)
    throw std::invalid_argument("eval_jet2: point dimension does not match AST");
  return eval_node(*ast.root, u);
}

// ---------------------------------------------------------------------------
// Pretty-printing and structural equality
// ---------------------------------------------------------------------------

namespace {

int node_precedence(const ExprNode& node) {
  switch (node.kind) {
    case NodeKind::Constant:
    case NodeKind::Var: return 100;
    case NodeKind::PowInt: return 40;
    case NodeKind::Unary: return node.uop == UnaryOp::Neg ? 30 : 100;
    case NodeKind::Binary:
      return (node.bop == BinaryOp::Mul || node.bop == BinaryOp::Div) ? 20 : 10;
  }
  return 0;
}

const char* unary_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::Neg: return "-";
    case UnaryOp::Sin: return "sin";
    case UnaryOp::Cos: return "cos";
    case UnaryOp::Sinh: return "sinh";
    case UnaryOp::Cosh: return "cosh";
    case UnaryOp::Tanh: return "tanh";
    case UnaryOp::Exp: return "exp";
    case UnaryOp::Log: return "log";
    case UnaryOp::Sqrt: return "sqrt";
  }
  return "?";
}

void print_node(const ExprNode& node, int parent_prec, bool rhs_of_nonassoc,
                std::string& out) {
  const int prec = node_precedence(node);
  const bool parens = prec < parent_prec || (rhs_of_nonassoc && prec == parent_prec);
  if (parens) out += '(';
  switch (node.kind) {
    case NodeKind::Constant:
      out += format_g17(node.constant);
      break;
    case NodeKind::Var:
      out += node.var_index == 0 ? "u" : (node.var_index == 1 ? "v" : "w");
      break;
    case NodeKind::Unary:
      if (node.uop == UnaryOp::Neg) {
        out += '-';
        print_node(*node.lhs, 30, false, out);
      } else {
        out += unary_name(node.uop);
        out += '(';
        print_node(*node.lhs, 0, false, out);
        out += ')';
      }
      break;
    case NodeKind::PowInt:
      print_node(*node.lhs, 41, false, out);
      out += '^';
      if (node.exponent < 0) {
        out += '-';
        out += std::to_string(-node.exponent);
      } else {
        out += std::to_string(node.exponent);
      }
      break;
    case NodeKind::Binary: {
      const char* op = nullptr;
      bool nonassoc = false;
      switch (node.bop) {
        case BinaryOp::Add: op = "+"; break;
        case BinaryOp::Sub: op = "-"; nonassoc = true; break;
        case BinaryOp::Mul: op = "*"; break;
        case BinaryOp::Div: op = "/"; nonassoc = true; break;
      }
      print_node(*node.lhs, prec, false, out);
      out += op;
      print_node(*node.rhs, prec, nonassoc, out);
      break;
    }
  }
  if (parens) out += ')';
}

bool nodes_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Constant: return a.constant == b.constant;
    case NodeKind::Var: return a.var_index == b.var_index;
    case NodeKind::Unary:
      return a.uop == b.uop && nodes_equal(*a.lhs, *b.lhs);
    case NodeKind::PowInt:
      return a.exponent == b.exponent && nodes_equal(*a.lhs, *b.lhs);
    case NodeKind::Binary:
      return a.bop == b.bop && nodes_equal(*a.lhs, *b.lhs) && nodes_equal(*a.rhs, *b.rhs);
  }
  return false;
}

}  // namespace

std::string pretty_print(const ExprAst& ast) {
  std::string out;
  print_node(*ast.root, 0, false, out);
  return out;
}

bool structurally_equal(const ExprAst& a, const ExprAst& b) {
  return a.n_vars == b.n_vars && nodes_equal(*a.root, *b.root);
}

// ---------------------------------------------------------------------------
// Chart assembly
// ---------------------------------------------------------------------------

ImmersionChart chart_from_expressions(std::vector<ExprAst> asts,
                                      std::vector<AxisRange> domain,
                                      const std::string& label) {
  if (asts.empty()) throw std::invalid_argument("chart_from_expressions: no coordinates");
  const int n = asts.front().n_vars;
  if (static_cast<int>(domain.size()) != n)
    throw std::invalid_argument("chart_from_expressions: domain size does not match n");
  const int ambient = static_cast<int>(asts.size());

  auto shared = std::make_shared<const std::vector<ExprAst>>(std::move(asts));
  ImmersionChart chart;
  chart.label = label;
  chart.domain = std::move(domain);
  chart.ambient_dim = ambient;
  chart.jet = [shared, n, ambient](const ParamVec& u) {
    ChartJet jet;
    jet.resize(ambient, n);
    for (int a = 0; a < ambient; ++a) {
      const Jet2 j = eval_jet2((*shared)[a], u);
      jet.position[a] = j.value;
      for (int i = 0; i < n; ++i) {
        jet.jacobian(a, i) = j.grad[i];
        for (int k = 0; k < n; ++k) jet.hess(a, i, k) = j.hess(i, k);
      }
    }
    return jet;
  };
  return chart;
}

}  // namespace mce
