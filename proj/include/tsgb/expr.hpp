#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace tsgb {

// Small expression language for the scalar nonlinearities, coefficients and
// kernels. Which variable names are in scope depends on the role:
//   one-variable maps use {x}; coefficients use {t}; kernels use {t,s};
//   dynamics right-hand sides use {t,u} / {t,u,v}.
namespace ast {

enum class Kind : std::uint8_t {
  Num, Var, Neg, Add, Sub, Mul, Div, Pow, Exp, Log, Sqrt, Abs, Min, Max
};

struct Node {
  Kind kind;
  double num = 0;      // Num
  int var = 0;         // Var: index into the declared variable list
  std::unique_ptr<Node> a, b;
};

using NodePtr = std::unique_ptr<Node>;

}  // namespace ast

class Expr {
 public:
  Expr() = default;

  // Parse `text` with the given variable names in scope.
  static Expr parse(const std::string& text,
                    const std::vector<std::string>& vars);

  // Programmatic constructors (used by generators and tests).
  static Expr num(double v);
  static Expr var(int index, const std::vector<std::string>& vars);
  static Expr unary(ast::Kind k, Expr a);
  static Expr binary(ast::Kind k, Expr a, Expr b);

  bool empty() const { return !root_; }
  int arity() const { return static_cast<int>(vars_.size()); }
  const std::vector<std::string>& vars() const { return vars_; }

  // Canonical text form; parse(print()) yields an identical tree.
  std::string print() const;

  // Evaluate with one argument per declared variable. Faults loudly on any
  // domain error or non-finite intermediate.
  double eval(const double* args, std::size_t nargs) const;
  double eval1(double x) const { return eval(&x, 1); }
  double eval2(double a, double b) const {
    double v[2] = {a, b};
    return eval(v, 2);
  }
  double eval3(double a, double b, double c) const {
    double v[3] = {a, b, c};
    return eval(v, 3);
  }

  static bool equal(const Expr& a, const Expr& b);

 private:
  std::shared_ptr<const ast::Node> root_;
  std::vector<std::string> vars_;
};

// One property-check outcome. `worst` is the largest violation found
// (negative or ~0 when the property holds); wx/wy is the witness input.
struct CertRecord {
  bool checked = false;
  bool pass = false;
  int samples = 0;
  double worst = 0;
  double wx = 0, wy = 0;
};

struct Certificates {
  CertRecord nondecreasing;
  CertRecord positive;          // m(x) > 0 for x > 0
  CertRecord subadditive;       // m(x+y) <= m(x)+m(y)
  CertRecord submultiplicative; // m(x·y) <= m(x)·m(y)
  CertRecord class_s;           // m(x)/z <= m(x/z) for z >= 1
  bool defined_at_zero = false;
};

// A one-variable map (in x) with its property certificates.
class ScalarMap {
 public:
  explicit ScalarMap(const std::string& source);
  static ScalarMap identity();

  double operator()(double x) const { return expr_.eval1(x); }
  const std::string& source() const { return src_; }
  const Expr& expr() const { return expr_; }
  const Certificates& certs() const { return certs_; }
  void set_certs(Certificates c) { certs_ = std::move(c); }

 private:
  std::string src_;
  Expr expr_;
  Certificates certs_;
};

// Sampling-based validation of the structural hypotheses. Deterministic in
// `seed`; comparisons use an absolute tolerance of 1e-9. Updates m's stored
// certificates and returns a copy.
Certificates check_properties(ScalarMap& m, double domain_hi, int samples,
                              std::uint64_t seed);

}  // namespace tsgb
