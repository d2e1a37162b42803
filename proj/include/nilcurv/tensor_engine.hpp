#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "nilcurv/metrics.hpp"

namespace nilcurv {

/// Dense rank-R array over an n-dimensional coordinate frame, last index
/// fastest.
template <std::size_t Rank>
class CoordTensor {
 public:
  CoordTensor() = default;
  explicit CoordTensor(std::size_t n) : n_(n), data_(ipow(n), 0.0) {}

  std::size_t dim() const { return n_; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  template <class... I>
  double& operator()(I... idx) {
    static_assert(sizeof...(I) == Rank);
    return data_[flat({static_cast<std::size_t>(idx)...})];
  }
  template <class... I>
  double operator()(I... idx) const {
    static_assert(sizeof...(I) == Rank);
    return data_[flat({static_cast<std::size_t>(idx)...})];
  }

  double max_abs() const {
    double m = 0.0;
    for (const double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  static std::size_t ipow(std::size_t n) {
    std::size_t r = 1;
    for (std::size_t k = 0; k < Rank; ++k) r *= n;
    return r;
  }
  std::size_t flat(const std::array<std::size_t, Rank>& idx) const {
    std::size_t f = 0;
    for (const std::size_t i : idx) f = f * n_ + i;
    return f;
  }

  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Gamma(i, j, k) = Gamma_ij^k, so that nabla_{d_i} d_j = Gamma_ij^k d_k.
using Christoffel = CoordTensor<3>;
/// R(i, j, k, l) = (R(d_i, d_j) d_k, d_l).
using Riemann = CoordTensor<4>;
/// NablaR(i, j, k, l, m) = (nabla_{d_m} R)(d_i, d_j, d_k, d_l).
using NablaRiemann = CoordTensor<5>;

enum class CurvatureRoute { General, ClosedPsi, Hypersurface };

struct CurvatureData {
  Riemann R;
  std::optional<NablaRiemann> nabla_R;
  Matrix ricci;
  PointChart point;
};

enum class Definiteness { PositiveDefinite, NegativeDefinite, Indefinite, Degenerate };

struct SecondForm {
  Matrix L;
  Vector eigenvalues;
  Definiteness classification = Definiteness::Degenerate;

  bool nondegenerate() const { return classification != Definiteness::Degenerate; }
  bool definite() const {
    return classification == Definiteness::PositiveDefinite ||
           classification == Definiteness::NegativeDefinite;
  }
};

/// Residuals of the hypersurface realization of a gradient metric.
struct EmbeddingResiduals {
  double isometry = 0.0;    // max |g_W(F_* u, F_* v) - g_f(u, v)|
  double normality = 0.0;   // max |g_W(nu, F_* u)|
  double unit_normal = 0.0; // |g_W(nu, nu) - 1|
  double second_form = 0.0; // max |g_W(d_i d_j F, nu) - d_i d_j f|

  double max() const { return std::max({isometry, normality, unit_normal, second_form}); }
};

/// Curvature evaluator bound to one metric.
///
/// The general route differentiates the polynomial metric coefficients
/// exactly and builds Gamma, R and nabla R from them, using
/// d(g^-1) = -g^-1 (dg) g^-1 for the inverse. The closed routes evaluate the
/// psi and hypersurface formulas directly. Derivative tables are built on
/// first use and shared between calls.
class CurvatureEngine {
 public:
  explicit CurvatureEngine(MetricSpec spec);

  const MetricSpec& spec() const { return spec_; }

  Christoffel christoffel(const PointChart& point) const;
  Riemann riemann(const PointChart& point, CurvatureRoute route) const;
  NablaRiemann nabla_riemann(const PointChart& point, CurvatureRoute route) const;
  /// rho_ij = g^{kl} R_{kijl}, from the general route.
  Matrix ricci(const PointChart& point) const;

  /// R (and nabla R when requested) plus Ricci, all from `route`.
  CurvatureData curvature(const PointChart& point, CurvatureRoute route,
                          bool with_nabla = false) const;

 private:
  struct Jet;
  struct DerivativeTables;

  const DerivativeTables& tables(int order) const;
  const DerivativeTables& psi_tables(int order) const;
  Jet evaluate_jet(const PointChart& point, int order) const;
  void check_point(const PointChart& point) const;
  void require_closed_route(CurvatureRoute route) const;

  MetricSpec spec_;
  mutable std::shared_ptr<DerivativeTables> tables_;
};

Christoffel christoffel(const MetricSpec& spec, const PointChart& point);
CurvatureData curvature(const MetricSpec& spec, const PointChart& point, CurvatureRoute route);
NablaRiemann nabla_curvature(const MetricSpec& spec, const PointChart& point,
                             CurvatureRoute route);
Matrix ricci(const MetricSpec& spec, const PointChart& point);

/// Ricci contraction of an all-lower curvature tensor.
Matrix ricci_from(const Riemann& R, const Matrix& g_inv);

/// L_ij = d_i d_j f at the first f.nvars() coordinates of `point`.
SecondForm second_fundamental(const Polynomial& f, const PointChart& point,
                              double rel_tol = 1e-8);

/// Builds the ambient flat space and the embedding F for a gradient metric
/// and measures how far F is from an isometric hypersurface with unit
/// normal nu.
EmbeddingResiduals embed_check(const Polynomial& f, const PointChart& point);

struct SymmetryDefects {
  double antisymmetry = 0.0;   // R_ijkl + R_jikl and R_ijkl + R_ijlk
  double pair_symmetry = 0.0;  // R_ijkl - R_klij
  double bianchi = 0.0;        // R_ijkl + R_jkil + R_kijl
  double max() const { return std::max({antisymmetry, pair_symmetry, bianchi}); }
};

SymmetryDefects curvature_symmetry_defects(const Riemann& R);

}  // namespace nilcurv
