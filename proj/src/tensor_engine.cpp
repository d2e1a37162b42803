#include "nilcurv/tensor_engine.hpp"

#include <cmath>
#include <mutex>

#include "nilcurv/errors.hpp"

namespace nilcurv {

namespace {

using Index = Eigen::Index;

Index ix(std::size_t i) { return static_cast<Index>(i); }

std::span<const double> span_of(const PointChart& p) {
  return {p.coords.data(), p.size()};
}

bool has_psi_core(const MetricSpec& spec) {
  const Family f = spec.core_family();
  return f == Family::Psi || f == Family::Gradient;
}

}  // namespace

// Polynomial derivatives of the metric coefficients, flattened by derivative
// multi-index: d1[m], d2[m * n + q], d3[(m * n + q) * n + r].
struct CurvatureEngine::DerivativeTables {
  std::mutex mu;
  int order = 0;
  std::vector<PolyMatrix> d1, d2, d3;
  // psi_{ab/cd} at psi2[((a*p+b)*p+c)*p+d]; psi3 appends one more index
  int psi_order = 0;
  std::vector<Polynomial> psi2, psi3;
};

struct CurvatureEngine::Jet {
  std::size_t n = 0;
  Matrix g, gi;
  std::vector<Matrix> dg, ddg, dddg;
  std::vector<Matrix> dgi, ddgi;
};

CurvatureEngine::CurvatureEngine(MetricSpec spec)
    : spec_(std::move(spec)), tables_(std::make_shared<DerivativeTables>()) {}

const CurvatureEngine::DerivativeTables& CurvatureEngine::tables(int order) const {
  DerivativeTables& t = *tables_;
  std::lock_guard lock(t.mu);
  const std::size_t n = spec_.dimension();
  const PolyMatrix& g = spec_.components();
  const auto differentiate = [n](const PolyMatrix& m, std::size_t var) {
    PolyMatrix out(n, n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a; b < n; ++b) {
        out(a, b) = m(a, b).diff(var);
        out(b, a) = out(a, b);
      }
    }
    return out;
  };
  if (order >= 1 && t.order < 1) {
    for (std::size_t m = 0; m < n; ++m) t.d1.push_back(differentiate(g, m));
    t.order = 1;
  }
  if (order >= 2 && t.order < 2) {
    t.d2.resize(n * n);
    for (std::size_t m = 0; m < n; ++m) {
      for (std::size_t q = m; q < n; ++q) {
        t.d2[m * n + q] = differentiate(t.d1[m], q);
        t.d2[q * n + m] = t.d2[m * n + q];
      }
    }
    t.order = 2;
  }
  if (order >= 3 && t.order < 3) {
    t.d3.resize(n * n * n);
    for (std::size_t m = 0; m < n; ++m) {
      for (std::size_t q = m; q < n; ++q) {
        for (std::size_t r = q; r < n; ++r) {
          const PolyMatrix d = differentiate(t.d2[m * n + q], r);
          for (const auto& [a, b, c] : {std::array{m, q, r}, std::array{m, r, q},
                                        std::array{q, m, r}, std::array{q, r, m},
                                        std::array{r, m, q}, std::array{r, q, m}}) {
            t.d3[(a * n + b) * n + c] = d;
          }
        }
      }
    }
    t.order = 3;
  }
  return t;
}

const CurvatureEngine::DerivativeTables& CurvatureEngine::psi_tables(int order) const {
  DerivativeTables& t = *tables_;
  std::lock_guard lock(t.mu);
  {
    const std::size_t p = spec_.p();
    const PolyMatrix& psi = spec_.psi();
    if (t.psi_order < 2) {
      t.psi2.assign(p * p * p * p, Polynomial(p));
      for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < p; ++b) {
          for (std::size_t c = 0; c < p; ++c) {
            for (std::size_t d = 0; d < p; ++d) {
              t.psi2[((a * p + b) * p + c) * p + d] = psi(a, b).diff(c).diff(d);
            }
          }
        }
      }
      t.psi_order = 2;
    }
    if (order >= 3 && t.psi_order < 3) {
      t.psi3.assign(p * p * p * p * p, Polynomial(p));
      for (std::size_t k = 0; k < p * p * p * p; ++k) {
        for (std::size_t e = 0; e < p; ++e) t.psi3[k * p + e] = t.psi2[k].diff(e);
      }
      t.psi_order = 3;
    }
  }
  return t;
}

void CurvatureEngine::check_point(const PointChart& point) const {
  if (point.size() != spec_.dimension()) {
    throw InputError("point has " + std::to_string(point.size()) +
                     " coordinates, metric dimension is " + std::to_string(spec_.dimension()));
  }
}

void CurvatureEngine::require_closed_route(CurvatureRoute route) const {
  if (route == CurvatureRoute::ClosedPsi && !has_psi_core(spec_)) {
    throw InputError("closed_psi route requires a psi or gradient metric, got " +
                     family_name(spec_.family()));
  }
  if (route == CurvatureRoute::Hypersurface && spec_.core_family() != Family::Gradient) {
    throw InputError("hypersurface route requires a gradient metric, got " +
                     family_name(spec_.family()));
  }
}

CurvatureEngine::Jet CurvatureEngine::evaluate_jet(const PointChart& point, int order) const {
  check_point(point);
  const DerivativeTables& t = tables(order);
  const std::size_t n = spec_.dimension();
  const auto x = span_of(point);
  const auto eval = [&](const PolyMatrix& m) {
    Matrix out(ix(n), ix(n));
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a; b < n; ++b) {
        out(ix(a), ix(b)) = m(a, b).eval(x);
        out(ix(b), ix(a)) = out(ix(a), ix(b));
      }
    }
    return out;
  };
  Jet j;
  j.n = n;
  j.g = eval(spec_.components());
  Eigen::FullPivLU<Matrix> lu(j.g);
  if (!lu.isInvertible()) throw NumericalError("curvature: metric is singular");
  j.gi = lu.inverse();
  if (order >= 1) {
    for (std::size_t m = 0; m < n; ++m) {
      j.dg.push_back(eval(t.d1[m]));
      j.dgi.push_back(-j.gi * j.dg[m] * j.gi);
    }
  }
  if (order >= 2) {
    j.ddg.resize(n * n);
    j.ddgi.resize(n * n);
    for (std::size_t m = 0; m < n; ++m) {
      for (std::size_t q = 0; q < n; ++q) j.ddg[m * n + q] = eval(t.d2[m * n + q]);
    }
    for (std::size_t q = 0; q < n; ++q) {
      for (std::size_t m = 0; m < n; ++m) {
        j.ddgi[q * n + m] = -(j.dgi[q] * j.dg[m] * j.gi + j.gi * j.ddg[q * n + m] * j.gi +
                              j.gi * j.dg[m] * j.dgi[q]);
      }
    }
  }
  if (order >= 3) {
    j.dddg.resize(n * n * n);
    for (std::size_t k = 0; k < n * n * n; ++k) j.dddg[k] = eval(t.d3[k]);
  }
  return j;
}

namespace {

// Everything the general route derives from a jet, up to the requested
// derivative order of Gamma.
struct GeneralTerms {
  std::size_t n = 0;
  CoordTensor<3> T;      // T(i,j,l) = d_i g_jl + d_j g_il - d_l g_ij
  CoordTensor<3> gamma;  // Gamma_ij^k
  CoordTensor<4> dT;     // dT(m,i,j,l)
  CoordTensor<4> dgamma; // dgamma(m,i,j,k) = d_m Gamma_ij^k
  CoordTensor<4> Rup;    // Rup(i,j,k,l) = R_ijk^l
  CoordTensor<4> R;
};

}  // namespace

Christoffel CurvatureEngine::christoffel(const PointChart& point) const {
  const Jet j = evaluate_jet(point, 1);
  const std::size_t n = j.n;
  Christoffel gamma(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t l = 0; l < n; ++l) {
        const double t = j.dg[a](ix(b), ix(l)) + j.dg[b](ix(a), ix(l)) - j.dg[l](ix(a), ix(b));
        if (t == 0.0) continue;
        for (std::size_t k = 0; k < n; ++k) gamma(a, b, k) += 0.5 * j.gi(ix(k), ix(l)) * t;
      }
    }
  }
  return gamma;
}

namespace {

GeneralTerms general_terms(const std::size_t n, const std::vector<Matrix>& dg,
                           const std::vector<Matrix>& ddg, const Matrix& g, const Matrix& gi,
                           const std::vector<Matrix>& dgi) {
  GeneralTerms t;
  t.n = n;
  t.T = CoordTensor<3>(n);
  t.gamma = CoordTensor<3>(n);
  t.dT = CoordTensor<4>(n);
  t.dgamma = CoordTensor<4>(n);
  t.Rup = CoordTensor<4>(n);
  t.R = CoordTensor<4>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t jj = 0; jj < n; ++jj) {
      for (std::size_t l = 0; l < n; ++l) {
        t.T(i, jj, l) = dg[i](ix(jj), ix(l)) + dg[jj](ix(i), ix(l)) - dg[l](ix(i), ix(jj));
        for (std::size_t m = 0; m < n; ++m) {
          t.dT(m, i, jj, l) = ddg[m * n + i](ix(jj), ix(l)) + ddg[m * n + jj](ix(i), ix(l)) -
                              ddg[m * n + l](ix(i), ix(jj));
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t jj = 0; jj < n; ++jj) {
      for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t l = 0; l < n; ++l) s += gi(ix(k), ix(l)) * t.T(i, jj, l);
        t.gamma(i, jj, k) = 0.5 * s;
        for (std::size_t m = 0; m < n; ++m) {
          double ds = 0.0;
          for (std::size_t l = 0; l < n; ++l) {
            ds += dgi[m](ix(k), ix(l)) * t.T(i, jj, l) + gi(ix(k), ix(l)) * t.dT(m, i, jj, l);
          }
          t.dgamma(m, i, jj, k) = 0.5 * ds;
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t jj = 0; jj < n; ++jj) {
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
          double s = t.dgamma(i, jj, k, l) - t.dgamma(jj, i, k, l);
          for (std::size_t e = 0; e < n; ++e) {
            s += t.gamma(jj, k, e) * t.gamma(i, e, l) - t.gamma(i, k, e) * t.gamma(jj, e, l);
          }
          t.Rup(i, jj, k, l) = s;
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t jj = 0; jj < n; ++jj) {
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
          double s = 0.0;
          for (std::size_t e = 0; e < n; ++e) s += t.Rup(i, jj, k, e) * g(ix(e), ix(l));
          t.R(i, jj, k, l) = s;
        }
      }
    }
  }
  return t;
}

}  // namespace

Riemann CurvatureEngine::riemann(const PointChart& point, CurvatureRoute route) const {
  check_point(point);
  const std::size_t n = spec_.dimension();
  switch (route) {
    case CurvatureRoute::General: {
      const Jet j = evaluate_jet(point, 2);
      return general_terms(n, j.dg, j.ddg, j.g, j.gi, j.dgi).R;
    }
    case CurvatureRoute::ClosedPsi: {
      require_closed_route(route);
      const DerivativeTables& t = psi_tables(2);
      const std::size_t p = spec_.p();
      const Vector xv = point.x_part(p);
      const std::span<const double> x(xv.data(), p);
      std::vector<double> d2(t.psi2.size());
      for (std::size_t k = 0; k < d2.size(); ++k) d2[k] = t.psi2[k].eval(x);
      // psi_{ab/cd}
      const auto s = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
        return d2[((a * p + b) * p + c) * p + d];
      };
      Riemann R(n);
      for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
          for (std::size_t k = 0; k < p; ++k) {
            for (std::size_t l = 0; l < p; ++l) {
              R(i, j, k, l) =
                  -0.5 * (s(i, l, j, k) + s(j, k, i, l) - s(i, k, j, l) - s(j, l, i, k));
            }
          }
        }
      }
      return R;
    }
    case CurvatureRoute::Hypersurface: {
      require_closed_route(route);
      const std::size_t p = spec_.p();
      const Matrix L = second_fundamental(spec_.potential(), point).L;
      Riemann R(n);
      for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
          for (std::size_t k = 0; k < p; ++k) {
            for (std::size_t l = 0; l < p; ++l) {
              R(i, j, k, l) = L(ix(i), ix(l)) * L(ix(j), ix(k)) - L(ix(i), ix(k)) * L(ix(j), ix(l));
            }
          }
        }
      }
      return R;
    }
  }
  throw InputError("unknown curvature route");
}

NablaRiemann CurvatureEngine::nabla_riemann(const PointChart& point, CurvatureRoute route) const {
  check_point(point);
  const std::size_t n = spec_.dimension();
  if (route == CurvatureRoute::ClosedPsi) {
    require_closed_route(route);
    const DerivativeTables& t = psi_tables(3);
    const std::size_t p = spec_.p();
    const Vector xv = point.x_part(p);
    const std::span<const double> x(xv.data(), p);
    std::vector<double> d3(t.psi3.size());
    for (std::size_t k = 0; k < d3.size(); ++k) d3[k] = t.psi3[k].eval(x);
    // psi_{ab/cde}
    const auto s = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t d, std::size_t e) {
      return d3[(((a * p + b) * p + c) * p + d) * p + e];
    };
    NablaRiemann out(n);
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = 0; k < p; ++k) {
          for (std::size_t l = 0; l < p; ++l) {
            for (std::size_t m = 0; m < p; ++m) {
              out(i, j, k, l, m) = -0.5 * (s(i, l, j, k, m) + s(j, k, i, l, m) -
                                           s(i, k, j, l, m) - s(j, l, i, k, m));
            }
          }
        }
      }
    }
    return out;
  }
  if (route != CurvatureRoute::General) {
    throw InputError("nabla_curvature supports the general and closed_psi routes only");
  }

  const Jet j = evaluate_jet(point, 3);
  const GeneralTerms t = general_terms(n, j.dg, j.ddg, j.g, j.gi, j.dgi);

  // d_q d_m Gamma_ij^k
  CoordTensor<5> ddgamma(n);
  {
    std::vector<double> ddT(n);
    for (std::size_t q = 0; q < n; ++q) {
      for (std::size_t m = q; m < n; ++m) {
        const Matrix& ddgi = j.ddgi[q * n + m];
        for (std::size_t a = 0; a < n; ++a) {
          for (std::size_t b = a; b < n; ++b) {
            for (std::size_t l = 0; l < n; ++l) {
              ddT[l] = j.dddg[(q * n + m) * n + a](ix(b), ix(l)) +
                       j.dddg[(q * n + m) * n + b](ix(a), ix(l)) -
                       j.dddg[(q * n + m) * n + l](ix(a), ix(b));
            }
            for (std::size_t k = 0; k < n; ++k) {
              double s = 0.0;
              for (std::size_t l = 0; l < n; ++l) {
                s += ddgi(ix(k), ix(l)) * t.T(a, b, l) + j.dgi[m](ix(k), ix(l)) * t.dT(q, a, b, l) +
                     j.dgi[q](ix(k), ix(l)) * t.dT(m, a, b, l) + j.gi(ix(k), ix(l)) * ddT[l];
              }
              s *= 0.5;
              ddgamma(q, m, a, b, k) = s;
              ddgamma(m, q, a, b, k) = s;
              ddgamma(q, m, b, a, k) = s;
              ddgamma(m, q, b, a, k) = s;
            }
          }
        }
      }
    }
  }

  // d_q R_{ijk}^l, then d_q R_{ijkl}
  CoordTensor<5> dR(n);  // dR(q,i,j,k,l)
  {
    std::vector<double> dRup(n);
    for (std::size_t q = 0; q < n; ++q) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t jj = 0; jj < n; ++jj) {
          for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t l = 0; l < n; ++l) {
              double s = ddgamma(q, i, jj, k, l) - ddgamma(q, jj, i, k, l);
              for (std::size_t e = 0; e < n; ++e) {
                s += t.dgamma(q, jj, k, e) * t.gamma(i, e, l) +
                     t.gamma(jj, k, e) * t.dgamma(q, i, e, l) -
                     t.dgamma(q, i, k, e) * t.gamma(jj, e, l) -
                     t.gamma(i, k, e) * t.dgamma(q, jj, e, l);
              }
              dRup[l] = s;
            }
            for (std::size_t l = 0; l < n; ++l) {
              double s = 0.0;
              for (std::size_t e = 0; e < n; ++e) {
                s += dRup[e] * j.g(ix(e), ix(l)) + t.Rup(i, jj, k, e) * j.dg[q](ix(e), ix(l));
              }
              dR(q, i, jj, k, l) = s;
            }
          }
        }
      }
    }
  }

  NablaRiemann out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t jj = 0; jj < n; ++jj) {
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
          for (std::size_t q = 0; q < n; ++q) {
            double s = dR(q, i, jj, k, l);
            for (std::size_t e = 0; e < n; ++e) {
              s -= t.gamma(q, i, e) * t.R(e, jj, k, l) + t.gamma(q, jj, e) * t.R(i, e, k, l) +
                   t.gamma(q, k, e) * t.R(i, jj, e, l) + t.gamma(q, l, e) * t.R(i, jj, k, e);
            }
            out(i, jj, k, l, q) = s;
          }
        }
      }
    }
  }
  return out;
}

Matrix ricci_from(const Riemann& R, const Matrix& g_inv) {
  const std::size_t n = R.dim();
  Matrix rho = Matrix::Zero(ix(n), ix(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) s += g_inv(ix(k), ix(l)) * R(k, i, j, l);
      }
      rho(ix(i), ix(j)) = s;
    }
  }
  return rho;
}

Matrix CurvatureEngine::ricci(const PointChart& point) const {
  return ricci_from(riemann(point, CurvatureRoute::General), metric_at(spec_, point).g_inv);
}

CurvatureData CurvatureEngine::curvature(const PointChart& point, CurvatureRoute route,
                                         bool with_nabla) const {
  CurvatureData out;
  out.point = point;
  out.R = riemann(point, route);
  out.ricci = ricci_from(out.R, metric_at(spec_, point).g_inv);
  if (with_nabla) {
    out.nabla_R = nabla_riemann(
        point, route == CurvatureRoute::Hypersurface ? CurvatureRoute::General : route);
  }
  return out;
}

Christoffel christoffel(const MetricSpec& spec, const PointChart& point) {
  return CurvatureEngine(spec).christoffel(point);
}

CurvatureData curvature(const MetricSpec& spec, const PointChart& point, CurvatureRoute route) {
  return CurvatureEngine(spec).curvature(point, route);
}

NablaRiemann nabla_curvature(const MetricSpec& spec, const PointChart& point,
                             CurvatureRoute route) {
  return CurvatureEngine(spec).nabla_riemann(point, route);
}

Matrix ricci(const MetricSpec& spec, const PointChart& point) {
  return CurvatureEngine(spec).ricci(point);
}

SecondForm second_fundamental(const Polynomial& f, const PointChart& point, double rel_tol) {
  const std::size_t p = f.nvars();
  if (point.size() < p) throw InputError("second_fundamental: point shorter than nvars(f)");
  const Vector xv = point.x_part(p);
  const std::span<const double> x(xv.data(), p);
  SecondForm out;
  out.L.resize(ix(p), ix(p));
  for (std::size_t i = 0; i < p; ++i) {
    const Polynomial fi = f.diff(i);
    for (std::size_t j = i; j < p; ++j) {
      out.L(ix(i), ix(j)) = fi.diff(j).eval(x);
      out.L(ix(j), ix(i)) = out.L(ix(i), ix(j));
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(out.L, Eigen::EigenvaluesOnly);
  out.eigenvalues = eig.eigenvalues();
  const double scale = out.eigenvalues.cwiseAbs().maxCoeff();
  const double tol = rel_tol * scale;
  int pos = 0, neg = 0;
  bool degenerate = scale == 0.0;
  for (const double lambda : out.eigenvalues) {
    if (std::abs(lambda) <= tol) {
      degenerate = true;
    } else if (lambda > 0) {
      ++pos;
    } else {
      ++neg;
    }
  }
  if (degenerate) {
    out.classification = Definiteness::Degenerate;
  } else if (neg == 0) {
    out.classification = Definiteness::PositiveDefinite;
  } else if (pos == 0) {
    out.classification = Definiteness::NegativeDefinite;
  } else {
    out.classification = Definiteness::Indefinite;
  }
  return out;
}

EmbeddingResiduals embed_check(const Polynomial& f, const PointChart& point) {
  const std::size_t p = f.nvars();
  if (point.size() < 2 * p) throw InputError("embed_check: point must have 2p coordinates");
  const Vector xv = point.x_part(p);
  const std::span<const double> x(xv.data(), p);
  const std::size_t w = 2 * p + 1;  // alpha_1..p, beta_1..p, gamma
  const std::size_t gamma_slot = 2 * p;

  Matrix gW = Matrix::Zero(ix(w), ix(w));
  for (std::size_t i = 0; i < p; ++i) {
    gW(ix(i), ix(p + i)) = 1.0;
    gW(ix(p + i), ix(i)) = 1.0;
  }
  gW(ix(gamma_slot), ix(gamma_slot)) = 1.0;

  Vector df(ix(p));
  for (std::size_t i = 0; i < p; ++i) df(ix(i)) = f.diff(i).eval(x);

  // columns: F_* d_{x_i}, F_* d_{y_i}
  Matrix dF = Matrix::Zero(ix(w), ix(2 * p));
  for (std::size_t i = 0; i < p; ++i) {
    dF(ix(i), ix(i)) = 1.0;
    dF(ix(gamma_slot), ix(i)) = df(ix(i));
    dF(ix(p + i), ix(p + i)) = 1.0;
  }
  Vector nu = Vector::Zero(ix(w));
  for (std::size_t i = 0; i < p; ++i) nu(ix(p + i)) = -df(ix(i));
  nu(ix(gamma_slot)) = 1.0;

  Matrix gf = Matrix::Zero(ix(2 * p), ix(2 * p));
  gf.topLeftCorner(ix(p), ix(p)) = df * df.transpose();
  gf.topRightCorner(ix(p), ix(p)).setIdentity();
  gf.bottomLeftCorner(ix(p), ix(p)).setIdentity();

  EmbeddingResiduals r;
  r.isometry = (dF.transpose() * gW * dF - gf).cwiseAbs().maxCoeff();
  r.normality = (nu.transpose() * gW * dF).cwiseAbs().maxCoeff();
  r.unit_normal = std::abs(nu.dot(gW * nu) - 1.0);
  // d_i d_j F = (d_i d_j f) gamma for x-slots, zero otherwise
  const SecondForm L = second_fundamental(f, point);
  const double gamma_nu = nu.dot(gW * basis_vector(w, gamma_slot));
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      r.second_form = std::max(r.second_form,
                               std::abs(L.L(ix(i), ix(j)) * gamma_nu - L.L(ix(i), ix(j))));
    }
  }
  return r;
}

SymmetryDefects curvature_symmetry_defects(const Riemann& R) {
  const std::size_t n = R.dim();
  SymmetryDefects d;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
          const double v = R(i, j, k, l);
          d.antisymmetry = std::max({d.antisymmetry, std::abs(v + R(j, i, k, l)),
                                     std::abs(v + R(i, j, l, k))});
          d.pair_symmetry = std::max(d.pair_symmetry, std::abs(v - R(k, l, i, j)));
          d.bianchi = std::max(d.bianchi, std::abs(v + R(j, k, i, l) + R(k, i, j, l)));
        }
      }
    }
  }
  return d;
}

}  // namespace nilcurv
