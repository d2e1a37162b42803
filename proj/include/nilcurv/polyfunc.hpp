#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace nilcurv {

using Exponents = std::vector<std::uint32_t>;

/// Graded lexicographic order: total degree first, then lexicographic
/// with variable 0 most significant.
struct GrlexLess {
  bool operator()(const Exponents& a, const Exponents& b) const;
};

/// Sparse multivariate polynomial with double coefficients.
///
/// Terms are kept in graded-lex order and no stored coefficient is zero, so
/// two polynomials compare equal exactly when their term maps agree.
/// Variables are indexed from 0.
class Polynomial {
 public:
  using TermMap = std::map<Exponents, double, GrlexLess>;

  explicit Polynomial(std::size_t nvars = 1);

  static Polynomial constant(std::size_t nvars, double c);
  /// The coordinate function x_i.
  static Polynomial variable(std::size_t nvars, std::size_t i);
  static Polynomial monomial(double coef, Exponents exps);

  std::size_t nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t degree() const;

  /// Adds coef to the term with these exponents, dropping it if it cancels.
  void add_term(const Exponents& exps, double coef);

  double eval(std::span<const double> point) const;
  Polynomial diff(std::size_t i) const;

  /// Same polynomial viewed in `nvars` variables, with variable k renamed to
  /// k + offset.
  Polynomial embed(std::size_t nvars, std::size_t offset) const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  std::string to_string() const;

 private:
  void require_same_nvars(const Polynomial& other, const char* op) const;

  std::size_t nvars_;
  TermMap terms_;
};

enum class ArithOp { Add, Mul };

/// Free-function form of the arithmetic kernel.
Polynomial poly_arith(const Polynomial& a, const Polynomial& b, ArithOp op);

}  // namespace nilcurv
