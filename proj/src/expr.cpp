#include "tsgb/expr.hpp"

#include <cmath>
#include <cstring>
#include <utility>

#include "tsgb/errors.hpp"
#include "tsgb/util.hpp"

namespace tsgb {

using ast::Kind;
using ast::Node;
using ast::NodePtr;

namespace {

NodePtr clone(const Node* n) {
  if (!n) return nullptr;
  auto c = std::make_unique<Node>();
  c->kind = n->kind;
  c->num = n->num;
  c->var = n->var;
  c->a = clone(n->a.get());
  c->b = clone(n->b.get());
  return c;
}

// ---- parsing ----------------------------------------------------------

struct Token {
  enum Type { Num, Ident, Op, End } type = End;
  double num = 0;
  std::string ident;
  char op = 0;
  std::size_t offset = 0;  // 1-based byte offset of the token start
};

class Lexer {
 public:
  Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  std::size_t here() const { return tok_.offset; }

 private:
  void advance() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n'))
      ++pos_;
    tok_ = Token{};
    tok_.offset = pos_ + 1;
    if (pos_ >= text_.size()) {
      tok_.type = Token::End;
      return;
    }
    char c = text_[pos_];
    if ((c >= '0' && c <= '9') || c == '.') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && ((text_[pos_] >= '0' && text_[pos_] <= '9') ||
                                     text_[pos_] == '.'))
        ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        std::size_t mark = pos_;
        ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
          ++pos_;
        if (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
          while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9')
            ++pos_;
        } else {
          pos_ = mark;  // 'e' belongs to a following identifier, not the number
        }
      }
      std::string s = text_.substr(start, pos_ - start);
      try {
        std::size_t used = 0;
        tok_.num = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
      } catch (const std::exception&) {
        fail(Errc::SyntaxError, "bad number '" + s + "' at offset " +
                                    std::to_string(start + 1));
      }
      tok_.type = Token::Num;
      return;
    }
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             ((text_[pos_] >= 'a' && text_[pos_] <= 'z') ||
              (text_[pos_] >= 'A' && text_[pos_] <= 'Z') ||
              (text_[pos_] >= '0' && text_[pos_] <= '9') || text_[pos_] == '_'))
        ++pos_;
      tok_.type = Token::Ident;
      tok_.ident = text_.substr(start, pos_ - start);
      return;
    }
    if (std::strchr("+-*/^(),", c)) {
      tok_.type = Token::Op;
      tok_.op = c;
      ++pos_;
      return;
    }
    fail(Errc::SyntaxError, std::string("unexpected character '") + c +
                                "' at offset " + std::to_string(pos_ + 1));
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  Token tok_;
};

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& vars)
      : lex_(text), vars_(vars) {}

  NodePtr run() {
    NodePtr e = parse_sum();
    if (lex_.peek().type != Token::End)
      fail(Errc::SyntaxError,
           "unexpected trailing input at offset " + std::to_string(lex_.here()));
    return e;
  }

 private:
  [[noreturn]] void expected(const std::string& what) {
    fail(Errc::SyntaxError,
         "expected " + what + " at offset " + std::to_string(lex_.here()));
  }

  bool eat_op(char c) {
    if (lex_.peek().type == Token::Op && lex_.peek().op == c) {
      lex_.take();
      return true;
    }
    return false;
  }

  void require_op(char c) {
    if (!eat_op(c)) expected(std::string("'") + c + "'");
  }

  static NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_unique<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  NodePtr parse_sum() {
    NodePtr e = parse_product();
    while (lex_.peek().type == Token::Op &&
           (lex_.peek().op == '+' || lex_.peek().op == '-')) {
      char op = lex_.take().op;
      e = make(op == '+' ? Kind::Add : Kind::Sub, std::move(e),
               parse_product());
    }
    return e;
  }

  NodePtr parse_product() {
    NodePtr e = parse_power();
    while (lex_.peek().type == Token::Op &&
           (lex_.peek().op == '*' || lex_.peek().op == '/')) {
      char op = lex_.take().op;
      e = make(op == '*' ? Kind::Mul : Kind::Div, std::move(e), parse_power());
    }
    return e;
  }

  // '^' is right-associative and binds tighter than '*', looser than unary
  // minus: "-x^2" is (-x)^2.
  NodePtr parse_power() {
    NodePtr base = parse_unary();
    if (eat_op('^')) return make(Kind::Pow, std::move(base), parse_power());
    return base;
  }

  NodePtr parse_unary() {
    if (eat_op('-')) return make(Kind::Neg, parse_unary());
    return parse_primary();
  }

  NodePtr parse_primary() {
    const Token& t = lex_.peek();
    if (t.type == Token::Num) {
      auto n = make(Kind::Num);
      n->num = lex_.take().num;
      return n;
    }
    if (t.type == Token::Op && t.op == '(') {
      lex_.take();
      NodePtr e = parse_sum();
      require_op(')');
      return e;
    }
    if (t.type == Token::Ident) {
      Token id = lex_.take();
      if (lex_.peek().type == Token::Op && lex_.peek().op == '(')
        return parse_call(id);
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == id.ident) {
          auto n = make(Kind::Var);
          n->var = static_cast<int>(i);
          return n;
        }
      }
      fail(Errc::UnknownIdentifier,
           "unknown identifier '" + id.ident + "' at offset " +
               std::to_string(id.offset) + " (variables in scope: " +
               scope_list() + ")");
    }
    expected("a value");
  }

  NodePtr parse_call(const Token& id) {
    struct Fn {
      const char* name;
      Kind kind;
      int arity;
    };
    static constexpr Fn fns[] = {
        {"exp", Kind::Exp, 1}, {"log", Kind::Log, 1},  {"sqrt", Kind::Sqrt, 1},
        {"abs", Kind::Abs, 1}, {"min", Kind::Min, 2},  {"max", Kind::Max, 2},
        {"pow", Kind::Pow, 2},
    };
    const Fn* fn = nullptr;
    for (const auto& f : fns)
      if (id.ident == f.name) fn = &f;
    if (!fn)
      fail(Errc::UnknownIdentifier, "unknown function '" + id.ident +
                                        "' at offset " +
                                        std::to_string(id.offset));
    require_op('(');
    NodePtr a = parse_sum();
    NodePtr b;
    if (fn->arity == 2) {
      require_op(',');
      b = parse_sum();
    }
    require_op(')');
    return make(fn->kind, std::move(a), std::move(b));
  }

  std::string scope_list() const {
    std::string s;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (i) s += ", ";
      s += vars_[i];
    }
    return s.empty() ? "none" : s;
  }

  Lexer lex_;
  const std::vector<std::string>& vars_;
};

// ---- printing ---------------------------------------------------------

// Precedence levels for parenthesization: sum 1, product 2, power 3,
// unary 4, atom 5.
int prec(const Node* n) {
  switch (n->kind) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Pow: return 3;
    case Kind::Neg: return 4;
    default: return 5;
  }
}

void print_node(const Node* n, int need, const std::vector<std::string>& vars,
                std::string& out) {
  int p = prec(n);
  bool parens = p < need;
  if (parens) out += '(';
  switch (n->kind) {
    case Kind::Num: out += format_double(n->num); break;
    case Kind::Var:
      out += vars.at(static_cast<std::size_t>(n->var));
      break;
    case Kind::Neg:
      out += '-';
      print_node(n->a.get(), 4, vars, out);
      break;
    case Kind::Add:
    case Kind::Sub:
      print_node(n->a.get(), 1, vars, out);
      out += n->kind == Kind::Add ? " + " : " - ";
      print_node(n->b.get(), 2, vars, out);
      break;
    case Kind::Mul:
    case Kind::Div:
      print_node(n->a.get(), 2, vars, out);
      out += n->kind == Kind::Mul ? " * " : " / ";
      print_node(n->b.get(), 3, vars, out);
      break;
    case Kind::Pow:
      print_node(n->a.get(), 4, vars, out);
      out += " ^ ";
      print_node(n->b.get(), 3, vars, out);
      break;
    case Kind::Exp:
    case Kind::Log:
    case Kind::Sqrt:
    case Kind::Abs: {
      const char* name = n->kind == Kind::Exp    ? "exp"
                         : n->kind == Kind::Log  ? "log"
                         : n->kind == Kind::Sqrt ? "sqrt"
                                                 : "abs";
      out += name;
      out += '(';
      print_node(n->a.get(), 1, vars, out);
      out += ')';
      break;
    }
    case Kind::Min:
    case Kind::Max:
      out += n->kind == Kind::Min ? "min(" : "max(";
      print_node(n->a.get(), 1, vars, out);
      out += ", ";
      print_node(n->b.get(), 1, vars, out);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

// ---- evaluation -------------------------------------------------------

[[noreturn]] void eval_fault(const char* what, double arg) {
  fail(Errc::EvalFault,
       std::string(what) + " (argument " + format_double(arg) + ")");
}

double eval_node(const Node* n, const double* args, std::size_t nargs) {
  switch (n->kind) {
    case Kind::Num: return n->num;
    case Kind::Var: return args[n->var];
    case Kind::Neg: return -eval_node(n->a.get(), args, nargs);
    case Kind::Add:
      return eval_node(n->a.get(), args, nargs) +
             eval_node(n->b.get(), args, nargs);
    case Kind::Sub:
      return eval_node(n->a.get(), args, nargs) -
             eval_node(n->b.get(), args, nargs);
    case Kind::Mul:
      return eval_node(n->a.get(), args, nargs) *
             eval_node(n->b.get(), args, nargs);
    case Kind::Div: {
      double d = eval_node(n->b.get(), args, nargs);
      if (d == 0.0) eval_fault("division by zero", d);
      return eval_node(n->a.get(), args, nargs) / d;
    }
    case Kind::Pow: {
      double base = eval_node(n->a.get(), args, nargs);
      double e = eval_node(n->b.get(), args, nargs);
      double r = std::pow(base, e);
      if (!std::isfinite(r)) eval_fault("pow out of domain", base);
      return r;
    }
    case Kind::Exp: {
      double a = eval_node(n->a.get(), args, nargs);
      double r = std::exp(a);
      if (!std::isfinite(r)) eval_fault("exp overflow", a);
      return r;
    }
    case Kind::Log: {
      double a = eval_node(n->a.get(), args, nargs);
      if (!(a > 0)) eval_fault("log of a nonpositive value", a);
      return std::log(a);
    }
    case Kind::Sqrt: {
      double a = eval_node(n->a.get(), args, nargs);
      if (a < 0) eval_fault("sqrt of a negative value", a);
      return std::sqrt(a);
    }
    case Kind::Abs: return std::abs(eval_node(n->a.get(), args, nargs));
    case Kind::Min:
      return std::min(eval_node(n->a.get(), args, nargs),
                      eval_node(n->b.get(), args, nargs));
    case Kind::Max:
      return std::max(eval_node(n->a.get(), args, nargs),
                      eval_node(n->b.get(), args, nargs));
  }
  fail(Errc::EvalFault, "corrupt expression node");
}

int max_var(const Node* n) {
  if (!n) return -1;
  int m = n->kind == Kind::Var ? n->var : -1;
  m = std::max(m, max_var(n->a.get()));
  return std::max(m, max_var(n->b.get()));
}

}  // namespace

Expr Expr::parse(const std::string& text, const std::vector<std::string>& vars) {
  Parser p(text, vars);
  Expr e;
  e.root_ = std::shared_ptr<const Node>(p.run().release());
  e.vars_ = vars;
  return e;
}

Expr Expr::num(double v) {
  // The grammar has no signed literals (a leading minus parses as negation),
  // so normalize here to keep parse(print()) an identical-tree round trip.
  if (std::signbit(v)) return unary(Kind::Neg, num(-v));
  auto n = std::make_unique<Node>();
  n->kind = Kind::Num;
  n->num = v;
  Expr e;
  e.root_ = std::shared_ptr<const Node>(n.release());
  return e;
}

Expr Expr::var(int index, const std::vector<std::string>& vars) {
  if (index < 0 || index >= static_cast<int>(vars.size()))
    fail(Errc::BadSpec, "variable index out of range");
  auto n = std::make_unique<Node>();
  n->kind = Kind::Var;
  n->var = index;
  Expr e;
  e.root_ = std::shared_ptr<const Node>(n.release());
  e.vars_ = vars;
  return e;
}

Expr Expr::unary(Kind k, Expr a) {
  auto n = std::make_unique<Node>();
  n->kind = k;
  n->a = clone(a.root_.get());
  Expr e;
  e.root_ = std::shared_ptr<const Node>(n.release());
  e.vars_ = a.vars_;
  return e;
}

Expr Expr::binary(Kind k, Expr a, Expr b) {
  auto n = std::make_unique<Node>();
  n->kind = k;
  n->a = clone(a.root_.get());
  n->b = clone(b.root_.get());
  Expr e;
  e.root_ = std::shared_ptr<const Node>(n.release());
  e.vars_ = a.vars_.size() >= b.vars_.size() ? a.vars_ : b.vars_;
  return e;
}

std::string Expr::print() const {
  if (!root_) return "";
  std::string out;
  out.reserve(64);
  print_node(root_.get(), 1, vars_, out);
  return out;
}

double Expr::eval(const double* args, std::size_t nargs) const {
  if (!root_) fail(Errc::EvalFault, "evaluating an empty expression");
  if (static_cast<int>(nargs) <= max_var(root_.get()))
    fail(Errc::EvalFault, "not enough arguments for expression");
  double r = eval_node(root_.get(), args, nargs);
  if (!std::isfinite(r)) fail(Errc::EvalFault, "expression result not finite");
  return r;
}

bool Expr::equal(const Expr& a, const Expr& b) {
  struct Cmp {
    bool operator()(const Node* x, const Node* y) const {
      if (!x || !y) return x == y;
      if (x->kind != y->kind) return false;
      if (x->kind == Kind::Num && x->num != y->num) return false;
      if (x->kind == Kind::Var && x->var != y->var) return false;
      return (*this)(x->a.get(), y->a.get()) && (*this)(x->b.get(), y->b.get());
    }
  } cmp;
  return cmp(a.root_.get(), b.root_.get());
}

// ---- scalar maps and certificates -------------------------------------

ScalarMap::ScalarMap(const std::string& source)
    : src_(source), expr_(Expr::parse(source, {"x"})) {}

ScalarMap ScalarMap::identity() { return ScalarMap("x"); }

Certificates check_properties(ScalarMap& m, double domain_hi, int samples,
                              std::uint64_t seed) {
  if (samples < 100) fail(Errc::BadSpec, "property check needs >= 100 samples");
  if (!(domain_hi > 0)) fail(Errc::BadSpec, "property domain must be positive");
  Rng rng(seed);
  Certificates c;
  const double tol_c = tol::cert;

  auto sample_pos = [&] { return rng.real(1e-6, domain_hi); };

  auto run = [&](CertRecord& rec, auto&& violation) {
    rec.checked = true;
    rec.samples = samples;
    rec.worst = -1e300;
    for (int i = 0; i < samples; ++i) {
      double x = sample_pos();
      double y = sample_pos();
      double v = violation(x, y);
      if (v > rec.worst) {
        rec.worst = v;
        rec.wx = x;
        rec.wy = y;
      }
    }
    rec.pass = rec.worst <= tol_c;
  };

  run(c.nondecreasing, [&](double x, double y) {
    double lo = std::min(x, y), hi = std::max(x, y);
    return m(lo) - m(hi);
  });
  run(c.positive, [&](double x, double) { return -m(x); });
  // Positivity is strict: any m(x) <= 0 is a violation.
  c.positive.pass = c.positive.worst < 0;
  run(c.subadditive,
      [&](double x, double y) { return m(x + y) - m(x) - m(y); });
  run(c.submultiplicative,
      [&](double x, double y) { return m(x * y) - m(x) * m(y); });
  run(c.class_s, [&](double x, double y) {
    double z = 1.0 + (y / domain_hi) * (domain_hi - 1.0);  // z in [1, hi]
    return m(x) / z - m(x / z);
  });

  try {
    double v0 = m(0.0);
    c.defined_at_zero = std::isfinite(v0);
  } catch (const Error&) {
    c.defined_at_zero = false;
  }

  m.set_certs(c);
  return c;
}

}  // namespace tsgb
