// Expression DSL for user-defined paths.
//
// Grammar (whitespace insensitive):
//   expression := term { ('+' | '-') term }
//   term       := unary { ('*' | '/') unary }
//   unary      := '-' unary | power
//   power      := primary { '^' integer }        integer >= 0, literal only
//   primary    := number | name | name '(' expression ')' | '(' expression ')'
// Functions: neg, sin, cos, tan, exp, ln, sqrt.  Any other name must be a
// declared variable or parameter.  Parameters are bound to numbers before a
// path is built, so compiled paths only see the runtime variables (x, y for
// implicit paths; w for parametric ones).
//
// Evaluation runs on Dual2 scalars, so one pass yields the value, two first
// derivatives and one mixed/second derivative.  ASTs are immutable and shared;
// evaluation is pure and safe to run concurrently.
#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gvf/dual2.hpp"
#include "gvf/errors.hpp"

namespace gvf {

enum class ExprKind { kConstant, kVariable, kParameter, kUnary, kBinary, kPow };
enum class UnaryOp { kNeg, kSin, kCos, kTan, kExp, kLn, kSqrt };
enum class BinaryOp { kAdd, kSub, kMul, kDiv };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprKind kind;
  std::size_t pos = 0;  // byte offset into the source text
  double constant = 0.0;
  std::string name;  // variable / parameter nodes
  UnaryOp uop = UnaryOp::kNeg;
  BinaryOp bop = BinaryOp::kAdd;
  int exponent = 0;  // pow nodes
  ExprPtr a, b;      // operands (unary and pow use only `a`)
};

struct ExprAst {
  ExprPtr root;
};

using Bindings = std::map<std::string, double>;

namespace detail {

struct Token {
  enum Type { kNumber, kIdent, kPlus, kMinus, kStar, kSlash, kCaret, kLParen, kRParen, kEnd };
  Type type;
  double number = 0.0;
  std::string text;
  std::size_t pos = 0;
};

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.'))
        ++j;
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          ++k;
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      const std::string text(src.substr(start, j - start));
      char* end = nullptr;
      const double v = std::strtod(text.c_str(), &end);
      if (end != text.c_str() + text.size())
        throw ParseError("malformed number '" + text + "'", start);
      out.push_back({Token::kNumber, v, text, start});
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      out.push_back({Token::kIdent, 0.0, std::string(src.substr(start, j - start)), start});
      i = j;
      continue;
    }
    switch (c) {
      case '+': out.push_back({Token::kPlus, 0.0, "+", start}); break;
      case '-': out.push_back({Token::kMinus, 0.0, "-", start}); break;
      case '*': out.push_back({Token::kStar, 0.0, "*", start}); break;
      case '/': out.push_back({Token::kSlash, 0.0, "/", start}); break;
      case '^': out.push_back({Token::kCaret, 0.0, "^", start}); break;
      case '(': out.push_back({Token::kLParen, 0.0, "(", start}); break;
      case ')': out.push_back({Token::kRParen, 0.0, ")", start}); break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
    ++i;
  }
  out.push_back({Token::kEnd, 0.0, "", src.size()});
  return out;
}

inline bool lookup_unary(const std::string& name, UnaryOp* op) {
  if (name == "neg") *op = UnaryOp::kNeg;
  else if (name == "sin") *op = UnaryOp::kSin;
  else if (name == "cos") *op = UnaryOp::kCos;
  else if (name == "tan") *op = UnaryOp::kTan;
  else if (name == "exp") *op = UnaryOp::kExp;
  else if (name == "ln") *op = UnaryOp::kLn;
  else if (name == "sqrt") *op = UnaryOp::kSqrt;
  else return false;
  return true;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const std::vector<std::string>& variables,
         const std::vector<std::string>& parameters)
      : tokens_(std::move(tokens)), variables_(variables), parameters_(parameters) {}

  ExprPtr parse() {
    ExprPtr e = expression();
    if (peek().type != Token::kEnd)
      throw ParseError("unexpected trailing input '" + peek().text + "'", peek().pos);
    return e;
  }

 private:
  const Token& peek() const { return tokens_[cursor_]; }
  Token take() { return tokens_[cursor_++]; }

  ExprPtr expression() {
    ExprPtr lhs = term();
    while (peek().type == Token::kPlus || peek().type == Token::kMinus) {
      const Token op = take();
      ExprPtr rhs = term();
      lhs = binary(op.type == Token::kPlus ? BinaryOp::kAdd : BinaryOp::kSub, op.pos, lhs, rhs);
    }
    return lhs;
  }

  ExprPtr term() {
    ExprPtr lhs = unary();
    while (peek().type == Token::kStar || peek().type == Token::kSlash) {
      const Token op = take();
      ExprPtr rhs = unary();
      lhs = binary(op.type == Token::kStar ? BinaryOp::kMul : BinaryOp::kDiv, op.pos, lhs, rhs);
    }
    return lhs;
  }

  ExprPtr unary() {
    if (peek().type == Token::kMinus) {
      const Token op = take();
      auto node = std::make_shared<ExprNode>();
      node->kind = ExprKind::kUnary;
      node->uop = UnaryOp::kNeg;
      node->pos = op.pos;
      node->a = unary();
      return node;
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    while (peek().type == Token::kCaret) {
      const Token op = take();
      const Token exp = take();
      if (exp.type != Token::kNumber || exp.number < 0.0 ||
          exp.number != static_cast<double>(static_cast<int>(exp.number)) ||
          exp.text.find_first_of(".eE") != std::string::npos)
        throw ParseError("exponent must be a nonnegative integer constant", exp.pos);
      auto node = std::make_shared<ExprNode>();
      node->kind = ExprKind::kPow;
      node->pos = op.pos;
      node->exponent = static_cast<int>(exp.number);
      node->a = base;
      base = node;
    }
    return base;
  }

  ExprPtr primary() {
    const Token t = take();
    if (t.type == Token::kNumber) {
      auto node = std::make_shared<ExprNode>();
      node->kind = ExprKind::kConstant;
      node->constant = t.number;
      node->pos = t.pos;
      return node;
    }
    if (t.type == Token::kLParen) {
      ExprPtr inner = expression();
      expect(Token::kRParen, ")");
      return inner;
    }
    if (t.type == Token::kIdent) {
      if (peek().type == Token::kLParen) {
        UnaryOp op;
        if (!lookup_unary(t.text, &op))
          throw ParseError("unknown function '" + t.text + "'", t.pos);
        take();  // '('
        ExprPtr arg = expression();
        expect(Token::kRParen, ")");
        auto node = std::make_shared<ExprNode>();
        node->kind = ExprKind::kUnary;
        node->uop = op;
        node->pos = t.pos;
        node->a = arg;
        return node;
      }
      auto node = std::make_shared<ExprNode>();
      node->pos = t.pos;
      node->name = t.text;
      if (contains(variables_, t.text)) {
        node->kind = ExprKind::kVariable;
      } else if (contains(parameters_, t.text)) {
        node->kind = ExprKind::kParameter;
      } else {
        throw ParseError("undeclared identifier '" + t.text + "'", t.pos);
      }
      return node;
    }
    throw ParseError("unexpected token '" + (t.type == Token::kEnd ? std::string("end of input") : t.text) + "'",
                     t.pos);
  }

  void expect(Token::Type type, const char* what) {
    const Token t = take();
    if (t.type != type) throw ParseError(std::string("expected '") + what + "'", t.pos);
  }

  static bool contains(const std::vector<std::string>& v, const std::string& s) {
    for (const auto& e : v)
      if (e == s) return true;
    return false;
  }

  static ExprPtr binary(BinaryOp op, std::size_t pos, ExprPtr a, ExprPtr b) {
    auto node = std::make_shared<ExprNode>();
    node->kind = ExprKind::kBinary;
    node->bop = op;
    node->pos = pos;
    node->a = std::move(a);
    node->b = std::move(b);
    return node;
  }

  std::vector<Token> tokens_;
  std::size_t cursor_ = 0;
  const std::vector<std::string>& variables_;
  const std::vector<std::string>& parameters_;
};

}  // namespace detail

// Parse `src` over the given symbol sets.  Every identifier must be declared
// either as a variable (seedable in eval_second_order) or as a parameter
// (bound to a constant before evaluation).
inline ExprAst parse_expression(std::string_view src, const std::vector<std::string>& variables,
                                const std::vector<std::string>& parameters = {}) {
  detail::Parser parser(detail::lex(src), variables, parameters);
  return {parser.parse()};
}

namespace detail {

inline void print_node(const ExprPtr& n, std::string& out) {
  char buf[40];
  switch (n->kind) {
    case ExprKind::kConstant:
      std::snprintf(buf, sizeof buf, "%.17g", std::fabs(n->constant));
      // A bare leading minus would rebind when the constant is a power base
      // (-c^2 parses as -(c^2)), so negative values print as explicit
      // negations.
      if (std::signbit(n->constant)) {
        out += "(-";
        out += buf;
        out += ")";
      } else {
        out += buf;
      }
      break;
    case ExprKind::kVariable:
    case ExprKind::kParameter:
      out += n->name;
      break;
    case ExprKind::kUnary: {
      static const char* names[] = {"neg", "sin", "cos", "tan", "exp", "ln", "sqrt"};
      if (n->uop == UnaryOp::kNeg) {
        out += "(-";
        print_node(n->a, out);
        out += ")";
      } else {
        out += names[static_cast<int>(n->uop)];
        out += "(";
        print_node(n->a, out);
        out += ")";
      }
      break;
    }
    case ExprKind::kBinary: {
      static const char ops[] = {'+', '-', '*', '/'};
      out += "(";
      print_node(n->a, out);
      out += " ";
      out += ops[static_cast<int>(n->bop)];
      out += " ";
      print_node(n->b, out);
      out += ")";
      break;
    }
    case ExprKind::kPow:
      out += "(";
      print_node(n->a, out);
      out += "^";
      out += std::to_string(n->exponent);
      out += ")";
      break;
  }
}

}  // namespace detail

// Canonical text form; parsing it back evaluates identically to the original.
inline std::string to_string(const ExprAst& ast) {
  std::string out;
  detail::print_node(ast.root, out);
  return out;
}

// Replace every parameter node with its bound constant.  The result contains
// only constants, variables and operators.
inline ExprAst bind_parameters(const ExprAst& ast, const Bindings& values) {
  struct Rebind {
    const Bindings& values;
    ExprPtr walk(const ExprPtr& n) {
      if (n->kind == ExprKind::kParameter) {
        auto it = values.find(n->name);
        if (it == values.end())
          throw ValidationError("parameter '" + n->name + "' has no bound value");
        auto c = std::make_shared<ExprNode>();
        c->kind = ExprKind::kConstant;
        c->constant = it->second;
        c->pos = n->pos;
        return c;
      }
      if (!n->a) return n;
      auto copy = std::make_shared<ExprNode>(*n);
      copy->a = walk(n->a);
      if (n->b) copy->b = walk(n->b);
      return copy;
    }
  } rebind{values};
  return {rebind.walk(ast.root)};
}

namespace detail {

inline Dual2 eval_node(const ExprPtr& n, const Bindings& bindings, std::string_view dir_a,
                       std::string_view dir_b) {
  switch (n->kind) {
    case ExprKind::kConstant:
      return Dual2::constant(n->constant);
    case ExprKind::kParameter:
    case ExprKind::kVariable: {
      auto it = bindings.find(n->name);
      if (it == bindings.end()) throw EvalError("unbound identifier '" + n->name + "'", n->pos);
      if (n->kind == ExprKind::kParameter) return Dual2::constant(it->second);
      return Dual2::variable(it->second, n->name == dir_a ? 1.0 : 0.0,
                             n->name == dir_b ? 1.0 : 0.0);
    }
    case ExprKind::kUnary: {
      const Dual2 u = eval_node(n->a, bindings, dir_a, dir_b);
      switch (n->uop) {
        case UnaryOp::kNeg: return -u;
        case UnaryOp::kSin: return sin(u);
        case UnaryOp::kCos: return cos(u);
        case UnaryOp::kTan: return tan(u);
        case UnaryOp::kExp: return exp(u);
        case UnaryOp::kLn:
          if (u.value <= 0.0) throw EvalError("ln of nonpositive value", n->pos);
          return log(u);
        case UnaryOp::kSqrt:
          if (u.value < 0.0) throw EvalError("sqrt of negative value", n->pos);
          return sqrt(u);
      }
      break;
    }
    case ExprKind::kBinary: {
      const Dual2 a = eval_node(n->a, bindings, dir_a, dir_b);
      const Dual2 b = eval_node(n->b, bindings, dir_a, dir_b);
      switch (n->bop) {
        case BinaryOp::kAdd: return a + b;
        case BinaryOp::kSub: return a - b;
        case BinaryOp::kMul: return a * b;
        case BinaryOp::kDiv:
          if (b.value == 0.0) throw EvalError("division by zero", n->pos);
          return a / b;
      }
      break;
    }
    case ExprKind::kPow:
      return pow_int(eval_node(n->a, bindings, dir_a, dir_b), n->exponent);
  }
  throw EvalError("corrupt expression node", n->pos);
}

}  // namespace detail

// Evaluate with derivative seeds along variables dir_a and dir_b.  The result
// carries value, d/d dir_a, d/d dir_b and the mixed partial; passing the same
// variable twice puts the plain second derivative in d12.
inline Dual2 eval_second_order(const ExprAst& ast, const Bindings& bindings,
                               std::string_view dir_a, std::string_view dir_b) {
  return detail::eval_node(ast.root, bindings, dir_a, dir_b);
}

inline double eval_value(const ExprAst& ast, const Bindings& bindings) {
  return detail::eval_node(ast.root, bindings, "", "").value;
}

}  // namespace gvf
