// SPDX-License-Identifier: Apache-2.0
#include "drop/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <utility>
#include <vector>

namespace drop {

namespace {

enum class Op {
  kLiteral,
  kSymS,
  kSymP,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kSqrt,
  kExp,
  kPow,
};

}  // namespace

struct CoeffExpr::Node {
  Op op = Op::kLiteral;
  Cplx value;                    // kLiteral
  int param = 0;                 // kSymP, 1-based
  long long pow_num = 1;         // kPow
  long long pow_den = 1;         // kPow, >= 1, gcd(num, den) == 1
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const CoeffExpr::Node>;
using Node = CoeffExpr::Node;

NodePtr make_literal(Cplx v) {
  auto n = std::make_shared<Node>();
  n->op = Op::kLiteral;
  n->value = v;
  return n;
}

NodePtr make_unary(Op op, NodePtr child) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(child);
  return n;
}

NodePtr make_binary(Op op, NodePtr l, NodePtr r) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

// ---------------------------------------------------------------------------
// Parser: recursive descent over a string_view, tracking byte offsets.

class Parser {
 public:
  Parser(std::string_view text, int max_param)
      : text_(text), max_param_(max_param) {}

  NodePtr parse() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      skip_ws();
      if (accept('+'))
        lhs = make_binary(Op::kAdd, lhs, parse_term());
      else if (accept('-'))
        lhs = make_binary(Op::kSub, lhs, parse_term());
      else
        return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      skip_ws();
      if (accept('*'))
        lhs = make_binary(Op::kMul, lhs, parse_unary());
      else if (accept('/'))
        lhs = make_binary(Op::kDiv, lhs, parse_unary());
      else
        return lhs;
    }
  }

  NodePtr parse_unary() {
    skip_ws();
    if (accept('-')) return make_unary(Op::kNeg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    skip_ws();
    if (!accept('^')) return base;
    auto [num, den] = parse_exponent();
    auto n = std::make_shared<Node>();
    n->op = Op::kPow;
    n->lhs = std::move(base);
    n->pow_num = num;
    n->pow_den = den;
    return n;
  }

  std::pair<long long, long long> parse_exponent() {
    skip_ws();
    bool paren = accept('(');
    skip_ws();
    bool negative = accept('-');
    skip_ws();
    long long num = parse_integer("exponent");
    long long den = 1;
    skip_ws();
    if (paren && accept('/')) {
      skip_ws();
      den = parse_integer("exponent denominator");
      if (den == 0) throw ParseError("zero exponent denominator", pos_);
    }
    if (paren) {
      skip_ws();
      expect(')');
    }
    if (negative) num = -num;
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    return {num, den};
  }

  long long parse_integer(const char* what) {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ == start)
      throw ParseError(std::string(what) + " must be an integer or rational literal", start);
    long long v = 0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc())
      throw ParseError(std::string(what) + " out of range", start);
    return v;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    char c = text_[pos_];

    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      skip_ws();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
          ++pos_;
      } else {
        pos_ = mark;  // "e" belonged to something else; not a valid exponent
      }
    }
    double v = 0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_)
      throw ParseError("malformed number", start);
    return make_literal(Cplx(v, 0.0));
  }

  NodePtr parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string_view name = text_.substr(start, pos_ - start);

    if (name == "s") {
      auto n = std::make_shared<Node>();
      n->op = Op::kSymS;
      return n;
    }
    if (name == "i") return make_literal(Cplx(0.0, 1.0));
    if (name == "sqrt" || name == "exp" || name == "neg") {
      skip_ws();
      expect('(');
      NodePtr arg = parse_expr();
      skip_ws();
      expect(')');
      Op op = name == "sqrt" ? Op::kSqrt : name == "exp" ? Op::kExp : Op::kNeg;
      return make_unary(op, std::move(arg));
    }
    if (name.size() >= 2 && name[0] == 'p' &&
        std::isdigit(static_cast<unsigned char>(name[1]))) {
      int idx = 0;
      auto res = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      if (res.ec == std::errc() && res.ptr == name.data() + name.size() && idx >= 1) {
        if (max_param_ >= 0 && idx > max_param_)
          throw ParseError("parameter p" + std::to_string(idx) +
                               " exceeds declared parameter count " +
                               std::to_string(max_param_),
                           start);
        auto n = std::make_shared<Node>();
        n->op = Op::kSymP;
        n->param = idx;
        return n;
      }
    }
    throw ParseError("unknown symbol '" + std::string(name) + "'", start);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c))
      throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  std::string_view text_;
  int max_param_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluation

Cplx int_pow(Cplx z, long long e) {
  if (e < 0) {
    if (z == Cplx(0.0, 0.0)) throw EvalError("negative power of zero");
    return Cplx(1.0, 0.0) / int_pow(z, -e);
  }
  Cplx result(1.0, 0.0);
  while (e > 0) {
    if (e & 1) result *= z;
    z *= z;
    e >>= 1;
  }
  return result;
}

Cplx eval_node(const Node& n, Cplx s, std::span<const double> p) {
  switch (n.op) {
    case Op::kLiteral:
      return n.value;
    case Op::kSymS:
      return s;
    case Op::kSymP:
      if (static_cast<std::size_t>(n.param) > p.size())
        throw EvalError("parameter p" + std::to_string(n.param) +
                        " not supplied (got " + std::to_string(p.size()) + ")");
      return Cplx(p[n.param - 1], 0.0);
    case Op::kAdd:
      return eval_node(*n.lhs, s, p) + eval_node(*n.rhs, s, p);
    case Op::kSub:
      return eval_node(*n.lhs, s, p) - eval_node(*n.rhs, s, p);
    case Op::kMul:
      return eval_node(*n.lhs, s, p) * eval_node(*n.rhs, s, p);
    case Op::kDiv: {
      Cplx den = eval_node(*n.rhs, s, p);
      if (den == Cplx(0.0, 0.0)) throw EvalError("division by zero");
      return eval_node(*n.lhs, s, p) / den;
    }
    case Op::kNeg:
      return -eval_node(*n.lhs, s, p);
    case Op::kSqrt:
      return std::sqrt(eval_node(*n.lhs, s, p));  // principal branch
    case Op::kExp:
      return std::exp(eval_node(*n.lhs, s, p));
    case Op::kPow: {
      Cplx base = eval_node(*n.lhs, s, p);
      if (n.pow_den == 1) return int_pow(base, n.pow_num);
      if (base == Cplx(0.0, 0.0)) {
        if (n.pow_num > 0) return Cplx(0.0, 0.0);
        throw EvalError("nonpositive rational power of zero");
      }
      double q = static_cast<double>(n.pow_num) / static_cast<double>(n.pow_den);
      return std::exp(q * std::log(base));  // principal branch
    }
  }
  throw EvalError("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Printing. Precedence levels: add/sub 1, mul/div 2, neg 3, pow 4, atom 5.

int precedence(const Node& n) {
  switch (n.op) {
    case Op::kAdd:
    case Op::kSub:
      return 1;
    case Op::kMul:
    case Op::kDiv:
      return 2;
    case Op::kNeg:
      return 3;
    case Op::kPow:
      return 4;
    default:
      return 5;
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& child, int parent_prec, bool tight, std::string& out) {
  // `tight` parenthesizes at equal precedence (right operands of - and /).
  bool paren = precedence(child) < parent_prec ||
               (tight && precedence(child) == parent_prec);
  if (paren) out += '(';
  print_node(child, out);
  if (paren) out += ')';
}

void print_node(const Node& n, std::string& out) {
  switch (n.op) {
    case Op::kLiteral: {
      double re = n.value.real(), im = n.value.imag();
      if (im == 0.0) {
        if (re < 0) {
          out += '(';
          out += format_double(re);
          out += ')';
        } else {
          out += format_double(re);
        }
      } else {
        out += '(';
        out += format_double(re);
        out += im < 0 ? '-' : '+';
        out += format_double(im < 0 ? -im : im);
        out += "*i)";
      }
      return;
    }
    case Op::kSymS:
      out += 's';
      return;
    case Op::kSymP:
      out += 'p';
      out += std::to_string(n.param);
      return;
    case Op::kAdd:
      print_child(*n.lhs, 1, false, out);
      out += '+';
      print_child(*n.rhs, 1, true, out);
      return;
    case Op::kSub:
      print_child(*n.lhs, 1, false, out);
      out += '-';
      print_child(*n.rhs, 1, true, out);
      return;
    case Op::kMul:
      print_child(*n.lhs, 2, false, out);
      out += '*';
      print_child(*n.rhs, 2, true, out);
      return;
    case Op::kDiv:
      print_child(*n.lhs, 2, false, out);
      out += '/';
      print_child(*n.rhs, 2, true, out);
      return;
    case Op::kNeg:
      out += '-';
      print_child(*n.lhs, 3, false, out);
      return;
    case Op::kSqrt:
    case Op::kExp: {
      out += n.op == Op::kSqrt ? "sqrt(" : "exp(";
      print_node(*n.lhs, out);
      out += ')';
      return;
    }
    case Op::kPow: {
      if (precedence(*n.lhs) < 5) {
        out += '(';
        print_node(*n.lhs, out);
        out += ')';
      } else {
        print_node(*n.lhs, out);
      }
      out += '^';
      if (n.pow_den == 1 && n.pow_num >= 0) {
        out += std::to_string(n.pow_num);
      } else {
        out += '(';
        out += std::to_string(n.pow_num);
        if (n.pow_den != 1) {
          out += '/';
          out += std::to_string(n.pow_den);
        }
        out += ')';
      }
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Static AST properties

struct Props {
  int max_param = 0;
  bool depends_on_s = false;
  bool branch_cut = false;
  bool real_literals = true;
};

void collect_props(const Node& n, Props& p) {
  switch (n.op) {
    case Op::kLiteral:
      if (n.value.imag() != 0.0) p.real_literals = false;
      return;
    case Op::kSymS:
      p.depends_on_s = true;
      return;
    case Op::kSymP:
      p.max_param = std::max(p.max_param, n.param);
      return;
    case Op::kSqrt:
      p.branch_cut = true;
      collect_props(*n.lhs, p);
      return;
    case Op::kPow:
      if (n.pow_den != 1) p.branch_cut = true;
      collect_props(*n.lhs, p);
      return;
    default:
      if (n.lhs) collect_props(*n.lhs, p);
      if (n.rhs) collect_props(*n.rhs, p);
      return;
  }
}

}  // namespace

CoeffExpr::CoeffExpr(std::shared_ptr<const Node> root) : root_(std::move(root)) {
  Props p;
  collect_props(*root_, p);
  max_param_ = p.max_param;
  depends_on_s_ = p.depends_on_s;
  has_branch_cut_ = p.branch_cut;
  real_literals_ = p.real_literals;
}

CoeffExpr CoeffExpr::parse(std::string_view text, int max_param) {
  Parser parser(text, max_param);
  return CoeffExpr(parser.parse());
}

Cplx CoeffExpr::eval(Cplx s, std::span<const double> p) const {
  if (!root_) throw EvalError("empty expression");
  return eval_node(*root_, s, p);
}

std::string CoeffExpr::to_string() const {
  if (!root_) return "";
  std::string out;
  print_node(*root_, out);
  return out;
}

}  // namespace drop
