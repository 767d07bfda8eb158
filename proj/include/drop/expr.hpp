// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "drop/types.hpp"

namespace drop {

/// Raised on malformed coefficient text. Carries the byte offset of the
/// offending token within the input string.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Raised when evaluation hits an undefined operation at the requested
/// point: division by zero, or a nonpositive power of zero.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scalar coefficient function of the frequency `s` and parameters
/// `p1..pd`, parsed from a small textual DSL.
///
/// Grammar (EBNF, standard precedence `^` > unary > `* /` > `+ -`):
///
///     expr     = term { ("+" | "-") term } ;
///     term     = unary { ("*" | "/") unary } ;
///     unary    = { "-" | "+" } power ;
///     power    = atom [ "^" exponent ] ;
///     atom     = number | "i" | "s" | param | func "(" expr ")"
///              | "(" expr ")" ;
///     func     = "sqrt" | "exp" | "neg" ;
///     param    = "p" digits ;                      (* 1-based index *)
///     exponent = [ "-" ] digits
///              | "(" [ "-" ] digits [ "/" digits ] ")" ;
///
/// Exponents are restricted to integer or rational literals; they are kept
/// as exact integer pairs so that e.g. s^(1/2) and s^2 compose without
/// floating-point exponent drift. `sqrt` and rational powers evaluate on
/// the principal branch (argument in (-pi, pi]). Whitespace is ignored.
///
/// CoeffExpr is immutable after parsing; eval() is pure and safe to call
/// from many threads concurrently.
class CoeffExpr {
 public:
  struct Node;  // opaque AST node

  CoeffExpr() = default;

  /// Parse coefficient text. `max_param` > 0 rejects parameter symbols
  /// above that index; pass 0 to forbid parameters entirely, -1 to accept
  /// any index.
  static CoeffExpr parse(std::string_view text, int max_param = -1);

  /// Evaluate at frequency s with parameter vector p. Throws EvalError on
  /// division by zero (a pole hit: callers should perturb the sample
  /// point) and when p is shorter than the largest parameter index used.
  Cplx eval(Cplx s, std::span<const double> p = {}) const;

  /// Round-trippable text form: parse(to_string()) evaluates identically
  /// at every point.
  std::string to_string() const;

  bool empty() const { return root_ == nullptr; }
  /// Largest parameter index referenced (0 when parameter-free).
  int max_param_index() const { return max_param_; }
  bool depends_on_s() const { return depends_on_s_; }
  /// True when the expression contains `sqrt` or a non-integer power and
  /// therefore a branch cut.
  bool has_branch_cut() const { return has_branch_cut_; }
  /// True when every literal in the tree is real.
  bool real_literals() const { return real_literals_; }

  /// Identical AST object (reduced systems share their parent's
  /// coefficient expressions; this is the structure-preservation check).
  bool same_ast(const CoeffExpr& other) const { return root_ == other.root_; }

 private:
  explicit CoeffExpr(std::shared_ptr<const Node> root);

  std::shared_ptr<const Node> root_;
  int max_param_ = 0;
  bool depends_on_s_ = false;
  bool has_branch_cut_ = false;
  bool real_literals_ = true;
};

inline CoeffExpr parse_coeff(std::string_view text, int max_param = -1) {
  return CoeffExpr::parse(text, max_param);
}

inline Cplx eval_coeff(const CoeffExpr& e, Cplx s, std::span<const double> p = {}) {
  return e.eval(s, p);
}

}  // namespace drop
