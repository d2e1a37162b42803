#pragma once

#include <nilcurv/metrics.hpp>
#include <nilcurv/polyfunc.hpp>
#include <nilcurv/rng.hpp>

namespace nilcurv::testing {

/// Dense random polynomial of total degree <= degree, coefficients uniform in
/// [-c, c].
inline Polynomial random_polynomial(std::size_t nvars, std::uint32_t degree, double c, Rng& rng) {
  Polynomial poly(nvars);
  Exponents e(nvars, 0);
  // enumerate all exponent vectors with sum <= degree
  auto rec = [&](auto&& self, std::size_t var, std::uint32_t left) -> void {
    if (var == nvars) {
      poly.add_term(e, rng.uniform(-c, c));
      return;
    }
    for (std::uint32_t k = 0; k <= left; ++k) {
      e[var] = k;
      self(self, var + 1, left - k);
    }
    e[var] = 0;
  };
  rec(rec, 0, degree);
  return poly;
}

inline MetricSpec random_cubic_psi(std::size_t p, Rng& rng) {
  PolyMatrix psi(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      psi(i, j) = random_polynomial(p, 3, 2.0, rng);
      psi(j, i) = psi(i, j);
    }
  }
  return MetricSpec::psi(p, std::move(psi));
}

inline PointChart random_point(std::size_t n, Rng& rng, double half_width = 1.0) {
  PointChart P{Vector(static_cast<Eigen::Index>(n))};
  for (Eigen::Index i = 0; i < P.coords.size(); ++i) P.coords(i) = rng.uniform(-half_width, half_width);
  return P;
}

inline PointChart point_of(std::initializer_list<double> values) {
  PointChart P{Vector(static_cast<Eigen::Index>(values.size()))};
  Eigen::Index i = 0;
  for (const double v : values) P.coords(i++) = v;
  return P;
}

/// x_1^e1 ... as a polynomial in nvars variables, times coef.
inline Polynomial mono(double coef, std::initializer_list<std::uint32_t> exps) {
  return Polynomial::monomial(coef, Exponents(exps));
}

/// f = 1/2 sum_i eps_i x_i^2
inline Polynomial half_quadratic(const std::vector<double>& eps) {
  const std::size_t p = eps.size();
  Polynomial f(p);
  for (std::size_t i = 0; i < p; ++i) {
    Exponents e(p, 0);
    e[i] = 2;
    f.add_term(e, 0.5 * eps[i]);
  }
  return f;
}

}  // namespace nilcurv::testing
