#include "nilcurv/polyfunc.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "nilcurv/errors.hpp"

namespace nilcurv {

namespace {

std::uint64_t total_degree(const Exponents& e) {
  return std::accumulate(e.begin(), e.end(), std::uint64_t{0});
}

}  // namespace

bool GrlexLess::operator()(const Exponents& a, const Exponents& b) const {
  const auto da = total_degree(a);
  const auto db = total_degree(b);
  if (da != db) return da < db;
  // Within a degree, x0 > x1 > ... so larger leading exponent sorts later.
  return a < b;
}

Polynomial::Polynomial(std::size_t nvars) : nvars_(nvars) {
  if (nvars == 0) throw InputError("Polynomial: nvars must be positive");
}

Polynomial Polynomial::constant(std::size_t nvars, double c) {
  Polynomial p(nvars);
  p.add_term(Exponents(nvars, 0), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t i) {
  if (i >= nvars) throw InputError("Polynomial::variable: index out of range");
  Exponents e(nvars, 0);
  e[i] = 1;
  Polynomial p(nvars);
  p.add_term(e, 1.0);
  return p;
}

Polynomial Polynomial::monomial(double coef, Exponents exps) {
  Polynomial p(exps.size());
  p.add_term(exps, coef);
  return p;
}

std::size_t Polynomial::degree() const {
  std::size_t d = 0;
  for (const auto& [e, c] : terms_) d = std::max<std::size_t>(d, total_degree(e));
  return d;
}

void Polynomial::add_term(const Exponents& exps, double coef) {
  if (exps.size() != nvars_) {
    throw InputError("Polynomial::add_term: exponent vector has length " +
                     std::to_string(exps.size()) + ", expected " + std::to_string(nvars_));
  }
  if (!std::isfinite(coef)) throw InputError("Polynomial::add_term: non-finite coefficient");
  if (coef == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(exps, coef);
  if (!inserted) {
    it->second += coef;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::eval(std::span<const double> point) const {
  if (point.size() != nvars_) {
    throw InputError("poly_eval: point has length " + std::to_string(point.size()) +
                     ", polynomial has " + std::to_string(nvars_) + " variables");
  }
  double sum = 0.0;
  for (const auto& [exps, coef] : terms_) {
    double term = coef;
    for (std::size_t k = 0; k < nvars_; ++k) {
      for (std::uint32_t r = 0; r < exps[k]; ++r) term *= point[k];
    }
    sum += term;
  }
  return sum;
}

Polynomial Polynomial::diff(std::size_t i) const {
  if (i >= nvars_) {
    throw InputError("poly_diff: variable index " + std::to_string(i) + " out of range for " +
                     std::to_string(nvars_) + " variables");
  }
  Polynomial out(nvars_);
  for (const auto& [exps, coef] : terms_) {
    if (exps[i] == 0) continue;
    Exponents e = exps;
    const double c = coef * static_cast<double>(e[i]);
    --e[i];
    out.add_term(e, c);
  }
  return out;
}

Polynomial Polynomial::embed(std::size_t nvars, std::size_t offset) const {
  if (offset + nvars_ > nvars) throw InputError("Polynomial::embed: target too small");
  Polynomial out(nvars);
  for (const auto& [exps, coef] : terms_) {
    Exponents e(nvars, 0);
    std::copy(exps.begin(), exps.end(), e.begin() + static_cast<std::ptrdiff_t>(offset));
    out.add_term(e, coef);
  }
  return out;
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  for (auto& [e, c] : out.terms_) c = -c;
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  require_same_nvars(other, "add");
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  require_same_nvars(other, "subtract");
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (!std::isfinite(s)) throw InputError("Polynomial: non-finite scale");
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= s;
    // underflow to zero is possible for tiny s
    if (it->second == 0.0) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.require_same_nvars(b, "multiply");
  Polynomial out(a.nvars_);
  Exponents e(a.nvars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t k = 0; k < a.nvars_; ++k) e[k] = ea[k] + eb[k];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [exps, coef] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << coef;
    for (std::size_t k = 0; k < nvars_; ++k) {
      if (exps[k] == 0) continue;
      os << "*x" << (k + 1);
      if (exps[k] > 1) os << '^' << exps[k];
    }
  }
  return os.str();
}

void Polynomial::require_same_nvars(const Polynomial& other, const char* op) const {
  if (other.nvars_ != nvars_) {
    throw InputError(std::string("poly_arith: cannot ") + op + " polynomials in " +
                     std::to_string(nvars_) + " and " + std::to_string(other.nvars_) +
                     " variables");
  }
}

Polynomial poly_arith(const Polynomial& a, const Polynomial& b, ArithOp op) {
  return op == ArithOp::Add ? a + b : a * b;
}

}  // namespace nilcurv
