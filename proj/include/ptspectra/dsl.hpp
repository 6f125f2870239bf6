#pragma once

// Operator-expression language over x_i, p_i.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' INTEGER)*
//   primary := NUMBER | 'i' | IDENT | '(' expr ')'
//
// Position symbols x1..x3 (aliases x, y, z), momentum symbols p1..p3 (aliases
// px, py, pz, and p for p1). 'i' is the imaginary unit. Every other identifier
// is a real parameter bound at compile time. Division is allowed only by
// scalar-valued expressions. U+2212 is accepted as a minus sign.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ptspectra/basis.hpp"
#include "ptspectra/error.hpp"
#include "ptspectra/matrix.hpp"
#include "ptspectra/operators.hpp"
#include "ptspectra/phase.hpp"

namespace ptspectra::dsl {

struct SourceSpan {
  std::size_t begin = 0;  // byte offsets into the source, half-open
  std::size_t end = 0;
};

class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, const std::string& message, SourceSpan span);
  SourceSpan span() const noexcept { return span_; }

 private:
  SourceSpan span_;
};

enum class SymbolKind { Position, Momentum };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Type { Sum, Product, Power, Scalar, Param, Symbol, Reciprocal };

  Type type = Type::Scalar;
  std::vector<NodePtr> children;  // Sum, Product: operands; Power, Reciprocal: one child
  unsigned exponent = 1;          // Power
  Complex value;                  // Scalar
  std::string name;               // Param
  SymbolKind kind = SymbolKind::Position;  // Symbol
  std::size_t mode = 0;                    // Symbol
  SourceSpan span;

  static NodePtr scalar(Complex v, SourceSpan s = {});
  static NodePtr param(std::string name, SourceSpan s = {});
  static NodePtr symbol(SymbolKind k, std::size_t mode, SourceSpan s = {});
  static NodePtr sum(std::vector<NodePtr> terms, SourceSpan s = {});
  static NodePtr product(std::vector<NodePtr> factors, SourceSpan s = {});
  static NodePtr power(NodePtr base, unsigned exponent, SourceSpan s = {});
  static NodePtr reciprocal(NodePtr denominator, SourceSpan s = {});
};

struct OperatorAst {
  NodePtr root;
  std::size_t modes = 0;
};

OperatorAst parse(std::string_view src, std::size_t modes);

// Re-parseable text; numbers carry 17 significant digits.
std::string print(const OperatorAst& ast);
std::string print(const NodePtr& node);

// Canonical expansion: a sum of monomials coeff * params * reciprocals * ops,
// with operator order preserved inside each monomial.
struct NormalForm;

struct Reciprocal {
  std::shared_ptr<const NormalForm> denominator;
  std::string key;  // printed denominator; orders and identifies the factor
};

struct Op {
  SymbolKind kind;
  std::size_t mode;
  friend auto operator<=>(const Op&, const Op&) = default;
};

struct Monomial {
  Complex coeff = 1.0;
  std::map<std::string, int> params;  // exponent may be negative
  std::vector<Reciprocal> reciprocals;      // sorted by key
  std::vector<Op> ops;
};

struct NormalForm {
  std::vector<Monomial> terms;  // sorted, merged, no zero coefficients
  std::size_t modes = 0;

  bool empty() const noexcept { return terms.empty(); }
};

bool operator==(const NormalForm& a, const NormalForm& b);

NormalForm normalize(const OperatorAst& ast);
OperatorAst to_ast(const NormalForm& nf);
NormalForm difference(const NormalForm& a, const NormalForm& b);

// Parity substitution, then time reversal (conjugate scalars, p -> -p).
// Throws Error(InvalidInput) when the variant does not fit the mode count.
NormalForm pt_transform(const NormalForm& nf, ParityVariant v);
OperatorAst pt_transform(const OperatorAst& ast, ParityVariant v);

struct PtCheckReport {
  ParityVariant variant;
  bool symmetric = false;
  std::optional<OperatorAst> normalized_difference;  // PT(a) - a; empty iff symmetric
};

PtCheckReport pt_check(const OperatorAst& ast, ParityVariant v);

using Bindings = std::map<std::string, double>;

// Throws Error(Binding) for unbound parameters and Error(InvalidBasis) when the
// basis has fewer modes than the expression declares.
TensorOperator compile_terms(const OperatorAst& ast, const BasisSpec& basis, const Bindings& bindings);
OperatorMatrix compile(const OperatorAst& ast, const BasisSpec& basis, const Bindings& bindings);

// Names of all parameters referenced by the expression, sorted.
std::vector<std::string> parameters(const OperatorAst& ast);

}  // namespace ptspectra::dsl
