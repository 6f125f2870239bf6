#include "ptspectra/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <utility>

namespace ptspectra::dsl {

ParseError::ParseError(ErrorKind kind, const std::string& message, SourceSpan span)
    : Error(kind, message + " at " + std::to_string(span.begin) + ".." + std::to_string(span.end)),
      span_(span) {}

NodePtr Node::scalar(Complex v, SourceSpan s) {
  auto n = std::make_shared<Node>();
  n->type = Type::Scalar;
  n->value = v;
  n->span = s;
  return n;
}

NodePtr Node::param(std::string name, SourceSpan s) {
  auto n = std::make_shared<Node>();
  n->type = Type::Param;
  n->name = std::move(name);
  n->span = s;
  return n;
}

NodePtr Node::symbol(SymbolKind k, std::size_t mode, SourceSpan s) {
  auto n = std::make_shared<Node>();
  n->type = Type::Symbol;
  n->kind = k;
  n->mode = mode;
  n->span = s;
  return n;
}

NodePtr Node::sum(std::vector<NodePtr> terms, SourceSpan s) {
  auto n = std::make_shared<Node>();
  n->type = Type::Sum;
  n->children = std::move(terms);
  n->span = s;
  return n;
}

NodePtr Node::product(std::vector<NodePtr> factors, SourceSpan s) {
  auto n = std::make_shared<Node>();
  n->type = Type::Product;
  n->children = std::move(factors);
  n->span = s;
  return n;
}

NodePtr Node::power(NodePtr base, unsigned exponent, SourceSpan s) {
  auto n = std::make_shared<Node>();
  n->type = Type::Power;
  n->children = {std::move(base)};
  n->exponent = exponent;
  n->span = s;
  return n;
}

NodePtr Node::reciprocal(NodePtr denominator, SourceSpan s) {
  auto n = std::make_shared<Node>();
  n->type = Type::Reciprocal;
  n->children = {std::move(denominator)};
  n->span = s;
  return n;
}

namespace {

// ---------------------------------------------------------------- lexer

struct Token {
  enum class Kind { Number, Ident, Punct, End };
  Kind kind = Kind::End;
  double number = 0.0;
  bool integer = false;
  std::string text;
  char punct = 0;
  SourceSpan span;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = src.size();
  while (i < n) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.span.begin = i;
    if (digit(c) || (c == '.' && i + 1 < n && digit(src[i + 1]))) {
      std::size_t j = i;
      bool integer = true;
      while (j < n && digit(src[j])) ++j;
      if (j < n && src[j] == '.') {
        integer = false;
        ++j;
        while (j < n && digit(src[j])) ++j;
      }
      if (j < n && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < n && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < n && digit(src[k])) {
          integer = false;
          j = k;
          while (j < n && digit(src[j])) ++j;
        }
      }
      const std::string text(src.substr(i, j - i));
      t.kind = Token::Kind::Number;
      t.number = std::strtod(text.c_str(), nullptr);
      t.integer = integer;
      t.text = text;
      i = j;
    } else if (ident_start(c)) {
      std::size_t j = i;
      while (j < n && ident_char(src[j])) ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(src.substr(i, j - i));
      i = j;
    } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^' || c == '(' || c == ')') {
      t.kind = Token::Kind::Punct;
      t.punct = c;
      ++i;
    } else if (src.substr(i, 3) == "\xE2\x88\x92") {  // U+2212 MINUS SIGN
      t.kind = Token::Kind::Punct;
      t.punct = '-';
      i += 3;
    } else {
      throw ParseError(ErrorKind::Lexical, std::string("unexpected character '") + c + "'",
                       {i, i + 1});
    }
    t.span.end = i;
    out.push_back(std::move(t));
  }
  Token end;
  end.span = {n, n};
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------- parser

bool has_symbol(const NodePtr& n) {
  if (n->type == Node::Type::Symbol) return true;
  return std::any_of(n->children.begin(), n->children.end(), has_symbol);
}

NodePtr negate(const NodePtr& n, SourceSpan s) {
  if (n->type == Node::Type::Product) {
    std::vector<NodePtr> f{Node::scalar(-1.0, s)};
    f.insert(f.end(), n->children.begin(), n->children.end());
    return Node::product(std::move(f), {s.begin, n->span.end});
  }
  return Node::product({Node::scalar(-1.0, s), n}, {s.begin, n->span.end});
}

class Parser {
 public:
  Parser(std::string_view src, std::size_t modes) : tokens_(lex(src)), modes_(modes) {}

  NodePtr parse_all() {
    auto e = expr();
    if (peek().kind != Token::Kind::End) throw ParseError(ErrorKind::Syntax, "unexpected token", peek().span);
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  bool at_punct(char c) const { return peek().kind == Token::Kind::Punct && peek().punct == c; }
  const Token& advance() { return tokens_[pos_++]; }

  NodePtr expr() {
    auto first = term();
    std::vector<NodePtr> terms{first};
    while (at_punct('+') || at_punct('-')) {
      const auto op = advance();
      auto rhs = term();
      terms.push_back(op.punct == '-' ? negate(rhs, op.span) : rhs);
    }
    if (terms.size() == 1) return first;
    return Node::sum(std::move(terms), {first->span.begin, terms.back()->span.end});
  }

  NodePtr term() {
    auto first = unary();
    std::vector<NodePtr> factors{first};
    while (at_punct('*') || at_punct('/')) {
      const auto op = advance();
      auto rhs = unary();
      if (op.punct == '/') {
        if (has_symbol(rhs))
          throw ParseError(ErrorKind::DivisionByOperator, "division by an operator-valued expression",
                           rhs->span);
        if (rhs->type == Node::Type::Scalar && rhs->value == Complex{})
          throw ParseError(ErrorKind::InvalidInput, "division by zero", rhs->span);
        rhs = Node::reciprocal(rhs, {op.span.begin, rhs->span.end});
      }
      factors.push_back(rhs);
    }
    if (factors.size() == 1) return first;
    return Node::product(std::move(factors), {first->span.begin, factors.back()->span.end});
  }

  NodePtr unary() {
    if (at_punct('-')) {
      const auto op = advance();
      return negate(unary(), op.span);
    }
    if (at_punct('+')) {
      advance();
      return unary();
    }
    return power();
  }

  NodePtr power() {
    auto base = primary();
    while (at_punct('^')) {
      advance();
      const Token& t = peek();
      if (t.kind == Token::Kind::End) throw ParseError(ErrorKind::Syntax, "missing exponent", t.span);
      if (t.kind != Token::Kind::Number || !t.integer || t.number < 1.0 || t.number > 1e6)
        throw ParseError(ErrorKind::NonIntegerExponent, "exponent must be a positive integer literal",
                         t.span);
      advance();
      base = Node::power(base, static_cast<unsigned>(t.number), {base->span.begin, t.span.end});
    }
    return base;
  }

  NodePtr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::Number:
        advance();
        return Node::scalar(t.number, t.span);
      case Token::Kind::Ident:
        advance();
        return identifier(t);
      case Token::Kind::Punct:
        if (t.punct == '(') {
          advance();
          auto inner = expr();
          if (!at_punct(')')) throw ParseError(ErrorKind::Syntax, "expected ')'", peek().span);
          advance();
          return inner;
        }
        throw ParseError(ErrorKind::Syntax, std::string("unexpected '") + t.punct + "'", t.span);
      case Token::Kind::End:
        break;
    }
    throw ParseError(ErrorKind::Syntax, "unexpected end of input", t.span);
  }

  NodePtr identifier(const Token& t) {
    const std::string& s = t.text;
    if (s == "i") return Node::scalar(Complex(0.0, 1.0), t.span);
    std::optional<std::pair<SymbolKind, std::size_t>> sym;
    if (s == "x") sym = {SymbolKind::Position, 0};
    else if (s == "y") sym = {SymbolKind::Position, 1};
    else if (s == "z") sym = {SymbolKind::Position, 2};
    else if (s == "p" || s == "px") sym = {SymbolKind::Momentum, 0};
    else if (s == "py") sym = {SymbolKind::Momentum, 1};
    else if (s == "pz") sym = {SymbolKind::Momentum, 2};
    else if (s.size() >= 2 && (s[0] == 'x' || s[0] == 'p') &&
             std::all_of(s.begin() + 1, s.end(), digit)) {
      const auto k = std::strtoul(s.c_str() + 1, nullptr, 10);
      if (k < 1 || k > 3 || s.size() > 2)
        throw ParseError(ErrorKind::UnknownSymbol, "unknown symbol '" + s + "'", t.span);
      sym = {s[0] == 'x' ? SymbolKind::Position : SymbolKind::Momentum, k - 1};
    }
    if (!sym) return Node::param(s, t.span);
    if (sym->second >= modes_)
      throw ParseError(ErrorKind::UnknownSymbol,
                       "symbol '" + s + "' needs mode " + std::to_string(sym->second + 1) + " but only " +
                           std::to_string(modes_) + " declared",
                       t.span);
    return Node::symbol(sym->first, sym->second, t.span);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t modes_;
};

// ---------------------------------------------------------------- printer

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string print_scalar(Complex v) {
  if (v.imag() == 0.0) {
    const auto s = number(v.real());
    return v.real() < 0.0 || std::signbit(v.real()) ? "(" + s + ")" : s;
  }
  if (v.real() == 0.0) return "(" + number(v.imag()) + "*i)";
  return "(" + number(v.real()) + " + " + number(v.imag()) + "*i)";
}

const char* symbol_name(SymbolKind k, std::size_t mode) {
  static const char* names[2][3] = {{"x1", "x2", "x3"}, {"p1", "p2", "p3"}};
  return names[k == SymbolKind::Position ? 0 : 1][mode];
}

std::string print_node(const NodePtr& n, bool wrap_sum) {
  switch (n->type) {
    case Node::Type::Scalar: return print_scalar(n->value);
    case Node::Type::Param: return n->name;
    case Node::Type::Symbol: return symbol_name(n->kind, n->mode);
    case Node::Type::Sum: {
      std::string s;
      for (std::size_t k = 0; k < n->children.size(); ++k) {
        if (k) s += " + ";
        s += print_node(n->children[k], false);
      }
      return wrap_sum ? "(" + s + ")" : s;
    }
    case Node::Type::Product: {
      std::string s;
      for (std::size_t k = 0; k < n->children.size(); ++k) {
        if (k) s += "*";
        s += print_node(n->children[k], true);
      }
      return s;
    }
    case Node::Type::Power: {
      const auto& b = n->children[0];
      std::string base = print_node(b, true);
      if (b->type == Node::Type::Product || b->type == Node::Type::Power) base = "(" + base + ")";
      return base + "^" + std::to_string(n->exponent);
    }
    case Node::Type::Reciprocal:
      return "(1/(" + print_node(n->children[0], false) + "))";
  }
  return "";
}

// ---------------------------------------------------------------- normal form

int compare_keys(const Monomial& a, const Monomial& b) {
  if (a.ops != b.ops) return a.ops < b.ops ? -1 : 1;
  if (a.params != b.params) return a.params < b.params ? -1 : 1;
  const auto n = std::min(a.reciprocals.size(), b.reciprocals.size());
  for (std::size_t k = 0; k < n; ++k) {
    const int c = a.reciprocals[k].key.compare(b.reciprocals[k].key);
    if (c != 0) return c < 0 ? -1 : 1;
  }
  if (a.reciprocals.size() != b.reciprocals.size()) return a.reciprocals.size() < b.reciprocals.size() ? -1 : 1;
  return 0;
}

std::vector<Monomial> canonical(std::vector<Monomial> terms) {
  std::stable_sort(terms.begin(), terms.end(),
                   [](const Monomial& a, const Monomial& b) { return compare_keys(a, b) < 0; });
  std::vector<Monomial> out;
  for (auto& t : terms) {
    if (!out.empty() && compare_keys(out.back(), t) == 0) {
      out.back().coeff += t.coeff;
    } else {
      out.push_back(std::move(t));
    }
  }
  std::erase_if(out, [](const Monomial& m) { return m.coeff == Complex{}; });
  return out;
}

Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial m;
  m.coeff = a.coeff * b.coeff;
  m.params = a.params;
  for (const auto& [name, e] : b.params) {
    if ((m.params[name] += e) == 0) m.params.erase(name);
  }
  m.reciprocals = a.reciprocals;
  m.reciprocals.insert(m.reciprocals.end(), b.reciprocals.begin(), b.reciprocals.end());
  std::stable_sort(m.reciprocals.begin(), m.reciprocals.end(),
                   [](const Reciprocal& x, const Reciprocal& y) { return x.key < y.key; });
  m.ops = a.ops;
  m.ops.insert(m.ops.end(), b.ops.begin(), b.ops.end());
  // Operators on different modes commute; order within a mode is kept.
  std::stable_sort(m.ops.begin(), m.ops.end(), [](const Op& x, const Op& y) { return x.mode < y.mode; });
  return m;
}

std::vector<Monomial> multiply(const std::vector<Monomial>& a, const std::vector<Monomial>& b) {
  std::vector<Monomial> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(multiply(x, y));
  return canonical(std::move(out));
}

std::vector<Monomial> one() { return {Monomial{}}; }

Reciprocal make_reciprocal(NormalForm den) {
  Reciprocal r;
  r.key = print(to_ast(den));
  r.denominator = std::make_shared<const NormalForm>(std::move(den));
  return r;
}

std::vector<Monomial> invert(const NormalForm& d, SourceSpan span) {
  if (d.terms.empty()) throw ParseError(ErrorKind::InvalidInput, "division by zero", span);
  if (d.terms.size() == 1 && d.terms[0].ops.empty()) {
    const auto& t = d.terms[0];
    Monomial inv;
    inv.coeff = 1.0 / t.coeff;
    for (const auto& [name, e] : t.params) inv.params[name] = -e;
    std::vector<Monomial> out{inv};
    for (const auto& r : t.reciprocals) out = multiply(out, r.denominator->terms);
    return out;
  }
  Monomial m;
  m.reciprocals.push_back(make_reciprocal(d));
  return {m};
}

std::vector<Monomial> normalize_node(const NodePtr& n, std::size_t modes) {
  switch (n->type) {
    case Node::Type::Scalar: {
      Monomial m;
      m.coeff = n->value;
      return canonical({m});
    }
    case Node::Type::Param: {
      Monomial m;
      m.params[n->name] = 1;
      return {m};
    }
    case Node::Type::Symbol: {
      Monomial m;
      m.ops.push_back({n->kind, n->mode});
      return {m};
    }
    case Node::Type::Sum: {
      std::vector<Monomial> all;
      for (const auto& c : n->children) {
        auto t = normalize_node(c, modes);
        all.insert(all.end(), t.begin(), t.end());
      }
      return canonical(std::move(all));
    }
    case Node::Type::Product: {
      auto acc = one();
      for (const auto& c : n->children) acc = multiply(acc, normalize_node(c, modes));
      return acc;
    }
    case Node::Type::Power: {
      const auto base = normalize_node(n->children[0], modes);
      auto acc = one();
      for (unsigned k = 0; k < n->exponent; ++k) acc = multiply(acc, base);
      return acc;
    }
    case Node::Type::Reciprocal: {
      NormalForm d{normalize_node(n->children[0], modes), modes};
      if (std::any_of(d.terms.begin(), d.terms.end(), [](const Monomial& m) { return !m.ops.empty(); }))
        throw ParseError(ErrorKind::DivisionByOperator, "division by an operator-valued expression",
                         n->span);
      return invert(d, n->span);
    }
  }
  return {};
}

NodePtr param_power(const std::string& name, int e) {
  NodePtr p = Node::param(name);
  return e == 1 ? p : Node::power(p, static_cast<unsigned>(e));
}

NormalForm conjugate_scalars(const NormalForm& nf) {
  NormalForm out = nf;
  for (auto& t : out.terms) {
    t.coeff = std::conj(t.coeff);
    for (auto& r : t.reciprocals) r = make_reciprocal(conjugate_scalars(*r.denominator));
  }
  out.terms = canonical(std::move(out.terms));
  return out;
}

void require_variant_fits(ParityVariant v, std::size_t modes) {
  const bool ok = (v == ParityVariant::P1) || (v == ParityVariant::P2 && modes >= 2) ||
                  (v == ParityVariant::P3 && modes == 2) ||
                  (v == ParityVariant::SpaceInversion3D && modes == 3);
  if (!ok)
    throw Error(ErrorKind::InvalidInput, std::string(to_string(v)) + " does not apply to a " +
                                             std::to_string(modes) + "-mode expression");
}

// ---------------------------------------------------------------- compiler

struct Value {
  Complex scalar = 1.0;
  std::optional<TensorOperator> op;  // when set, the value is op (scalar unused)
};

Value times(Value a, const Value& b) {
  if (!a.op && !b.op) return {a.scalar * b.scalar, std::nullopt};
  if (!a.op) {
    TensorOperator r = *b.op;
    r *= a.scalar;
    return {1.0, std::move(r)};
  }
  if (!b.op) {
    *a.op *= b.scalar;
    return a;
  }
  return {1.0, (*a.op) * (*b.op)};
}

Value evaluate(const NodePtr& n, const BasisSpec& basis, const Bindings& bindings) {
  switch (n->type) {
    case Node::Type::Scalar:
      return {n->value, std::nullopt};
    case Node::Type::Param: {
      const auto it = bindings.find(n->name);
      if (it == bindings.end()) throw Error(ErrorKind::Binding, "unbound parameter '" + n->name + "'");
      return {it->second, std::nullopt};
    }
    case Node::Type::Symbol:
      return {1.0, n->kind == SymbolKind::Position ? TensorOperator::position(basis, n->mode)
                                                   : TensorOperator::momentum(basis, n->mode)};
    case Node::Type::Sum: {
      Complex s = 0.0;
      std::optional<TensorOperator> op;
      for (const auto& c : n->children) {
        auto v = evaluate(c, basis, bindings);
        if (!v.op) {
          s += v.scalar;
        } else if (op) {
          *op += *v.op;
        } else {
          op = std::move(v.op);
        }
      }
      if (!op) return {s, std::nullopt};
      if (s != Complex{}) *op += s * TensorOperator::identity(basis);
      return {1.0, std::move(op)};
    }
    case Node::Type::Product: {
      Value acc;
      for (const auto& c : n->children) acc = times(std::move(acc), evaluate(c, basis, bindings));
      return acc;
    }
    case Node::Type::Power: {
      const auto base = evaluate(n->children[0], basis, bindings);
      Value acc;
      for (unsigned k = 0; k < n->exponent; ++k) acc = times(std::move(acc), base);
      return acc;
    }
    case Node::Type::Reciprocal: {
      const auto d = evaluate(n->children[0], basis, bindings);
      if (d.op) throw Error(ErrorKind::DivisionByOperator, "division by an operator-valued expression");
      if (d.scalar == Complex{}) throw Error(ErrorKind::InvalidInput, "division by zero");
      return {1.0 / d.scalar, std::nullopt};
    }
  }
  return {};
}

void collect_params(const NodePtr& n, std::set<std::string>& out) {
  if (n->type == Node::Type::Param) out.insert(n->name);
  for (const auto& c : n->children) collect_params(c, out);
}

}  // namespace

OperatorAst parse(std::string_view src, std::size_t modes) {
  if (modes < 1 || modes > 3) throw Error(ErrorKind::InvalidInput, "mode count must be 1, 2 or 3");
  if (std::all_of(src.begin(), src.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }))
    throw ParseError(ErrorKind::Syntax, "empty expression", {0, src.size()});
  return {Parser(src, modes).parse_all(), modes};
}

std::string print(const NodePtr& node) { return print_node(node, false); }
std::string print(const OperatorAst& ast) { return print(ast.root); }

bool operator==(const NormalForm& a, const NormalForm& b) {
  if (a.terms.size() != b.terms.size()) return false;
  for (std::size_t k = 0; k < a.terms.size(); ++k)
    if (compare_keys(a.terms[k], b.terms[k]) != 0 || a.terms[k].coeff != b.terms[k].coeff) return false;
  return true;
}

NormalForm normalize(const OperatorAst& ast) { return {normalize_node(ast.root, ast.modes), ast.modes}; }

OperatorAst to_ast(const NormalForm& nf) {
  std::vector<NodePtr> terms;
  for (const auto& t : nf.terms) {
    std::vector<NodePtr> f{Node::scalar(t.coeff)};
    for (const auto& [name, e] : t.params)
      if (e > 0) f.push_back(param_power(name, e));
    for (const auto& [name, e] : t.params)
      if (e < 0) f.push_back(Node::reciprocal(param_power(name, -e)));
    for (const auto& r : t.reciprocals) f.push_back(Node::reciprocal(to_ast(*r.denominator).root));
    for (const auto& op : t.ops) f.push_back(Node::symbol(op.kind, op.mode));
    terms.push_back(f.size() == 1 ? f[0] : Node::product(std::move(f)));
  }
  if (terms.empty()) return {Node::scalar(0.0), nf.modes};
  if (terms.size() == 1) return {terms[0], nf.modes};
  return {Node::sum(std::move(terms)), nf.modes};
}

NormalForm difference(const NormalForm& a, const NormalForm& b) {
  std::vector<Monomial> all = a.terms;
  for (auto t : b.terms) {
    t.coeff = -t.coeff;
    all.push_back(std::move(t));
  }
  return {canonical(std::move(all)), std::max(a.modes, b.modes)};
}

NormalForm pt_transform(const NormalForm& nf, ParityVariant v) {
  require_variant_fits(v, nf.modes);
  NormalForm out = nf;
  for (auto& t : out.terms) {
    double sign = 1.0;
    for (auto& op : t.ops) {
      switch (v) {
        case ParityVariant::P1:
          if (op.mode == 0) sign = -sign;
          break;
        case ParityVariant::P2:
          if (op.mode == 1) sign = -sign;
          break;
        case ParityVariant::P3:
          if (op.mode < 2) op.mode = 1 - op.mode;
          break;
        case ParityVariant::SpaceInversion3D:
          sign = -sign;
          break;
      }
      if (op.kind == SymbolKind::Momentum) sign = -sign;  // time reversal
    }
    t.coeff = sign * std::conj(t.coeff);
    for (auto& r : t.reciprocals) r = make_reciprocal(conjugate_scalars(*r.denominator));
  }
  out.terms = canonical(std::move(out.terms));
  return out;
}

OperatorAst pt_transform(const OperatorAst& ast, ParityVariant v) {
  return to_ast(pt_transform(normalize(ast), v));
}

PtCheckReport pt_check(const OperatorAst& ast, ParityVariant v) {
  const auto nf = normalize(ast);
  const auto diff = difference(pt_transform(nf, v), nf);
  PtCheckReport report{v, diff.empty(), std::nullopt};
  if (!diff.empty()) report.normalized_difference = to_ast(diff);
  return report;
}

TensorOperator compile_terms(const OperatorAst& ast, const BasisSpec& basis, const Bindings& bindings) {
  basis.validate();
  if (basis.modes() != ast.modes)
    throw Error(ErrorKind::InvalidBasis, "expression declares " + std::to_string(ast.modes) +
                                             " modes but the basis has " + std::to_string(basis.modes()));
  auto v = evaluate(ast.root, basis, bindings);
  if (v.op) return std::move(*v.op);
  return v.scalar * TensorOperator::identity(basis);
}

OperatorMatrix compile(const OperatorAst& ast, const BasisSpec& basis, const Bindings& bindings) {
  return compile_terms(ast, basis, bindings).dense();
}

std::vector<std::string> parameters(const OperatorAst& ast) {
  std::set<std::string> names;
  collect_params(ast.root, names);
  return {names.begin(), names.end()};
}

}  // namespace ptspectra::dsl
