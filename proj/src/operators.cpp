#include "nilcurv/operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "nilcurv/errors.hpp"

namespace nilcurv {

namespace {

using Index = Eigen::Index;

Index ix(std::size_t i) { return static_cast<Index>(i); }

void require_vector(const Vector& v, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(v.size()) != n) {
    throw InputError(std::string(what) + ": vector has length " + std::to_string(v.size()) +
                     ", expected " + std::to_string(n));
  }
}

void require_nonzero(const Vector& v, const char* what) {
  if (v.cwiseAbs().maxCoeff() == 0.0) throw InputError(std::string(what) + ": zero vector");
}

constexpr double kPivotTol = 1e-6;
constexpr double kDegenerateTol = 1e-10;

}  // namespace

std::string operator_kind_name(OperatorKind k) {
  switch (k) {
    case OperatorKind::Jacobi: return "jacobi";
    case OperatorKind::Szabo: return "szabo";
    case OperatorKind::SkewCurvature: return "skew_curvature";
  }
  return "unknown";
}

std::string plane_type_name(PlaneType t) {
  switch (t) {
    case PlaneType::Spacelike: return "spacelike";
    case PlaneType::Timelike: return "timelike";
    case PlaneType::Mixed: return "mixed";
    case PlaneType::Degenerate: return "degenerate";
  }
  return "unknown";
}

Matrix jacobi_form(const Riemann& R, const Vector& X) {
  const std::size_t n = R.dim();
  require_vector(X, n, "jacobi_op");
  Matrix M = Matrix::Zero(ix(n), ix(n));
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t c = 0; c < n; ++c) {
      if (X(ix(c)) == 0.0) continue;
      for (std::size_t d = 0; d < n; ++d) {
        const double w = X(ix(c)) * X(ix(d));
        if (w == 0.0) continue;
        for (std::size_t e = 0; e < n; ++e) M(ix(b), ix(e)) += R(b, c, d, e) * w;
      }
    }
  }
  return M;
}

Matrix szabo_form(const NablaRiemann& nabla_R, const Vector& X) {
  const std::size_t n = nabla_R.dim();
  require_vector(X, n, "szabo_op");
  Matrix M = Matrix::Zero(ix(n), ix(n));
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t c = 0; c < n; ++c) {
      if (X(ix(c)) == 0.0) continue;
      for (std::size_t d = 0; d < n; ++d) {
        if (X(ix(d)) == 0.0) continue;
        for (std::size_t e = 0; e < n; ++e) {
          double s = 0.0;
          for (std::size_t m = 0; m < n; ++m) s += nabla_R(b, c, d, e, m) * X(ix(m));
          M(ix(b), ix(e)) += s * X(ix(c)) * X(ix(d));
        }
      }
    }
  }
  return M;
}

OperatorMatrix jacobi_op(const CurvatureData& curv, const MetricAtPoint& gp, const Vector& X) {
  require_vector(X, gp.dimension(), "jacobi_op");
  require_nonzero(X, "jacobi_op");
  const Matrix M = jacobi_form(curv.R, X);
  return OperatorMatrix{gp.g_inv * M.transpose(), OperatorKind::Jacobi, curv.point, {X}};
}

OperatorMatrix szabo_op(const NablaRiemann& nabla_R, const MetricAtPoint& gp, const Vector& X,
                        const PointChart& point) {
  require_vector(X, gp.dimension(), "szabo_op");
  require_nonzero(X, "szabo_op");
  const Matrix M = szabo_form(nabla_R, X);
  return OperatorMatrix{gp.g_inv * M.transpose(), OperatorKind::Szabo, point, {X}};
}

OperatorMatrix skew_op(const CurvatureData& curv, const MetricAtPoint& gp, const PlaneSpec& plane) {
  const std::size_t n = gp.dimension();
  require_vector(plane.u, n, "skew_op");
  require_vector(plane.v, n, "skew_op");
  auto [X1, X2] = orthonormal_oriented_basis(gp, plane.u, plane.v);
  if (plane.orientation < 0) X2 = -X2;
  // A(k, e) = R(X1, X2, d_k, d_e)
  Matrix A = Matrix::Zero(ix(n), ix(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (X1(ix(i)) == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = X1(ix(i)) * X2(ix(j));
      if (w == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t e = 0; e < n; ++e) A(ix(k), ix(e)) += curv.R(i, j, k, e) * w;
      }
    }
  }
  return OperatorMatrix{gp.g_inv * A.transpose(), OperatorKind::SkewCurvature, curv.point,
                        {X1, X2}};
}

Eigen::Matrix2d gram_matrix(const MetricAtPoint& gp, const Vector& u, const Vector& v) {
  Eigen::Matrix2d G;
  G(0, 0) = inner(gp, u, u);
  G(0, 1) = inner(gp, u, v);
  G(1, 0) = G(0, 1);
  G(1, 1) = inner(gp, v, v);
  return G;
}

PlaneType classify_plane(const MetricAtPoint& gp, const Vector& u, const Vector& v) {
  require_vector(u, gp.dimension(), "classify_plane");
  require_vector(v, gp.dimension(), "classify_plane");
  const double nu = u.norm();
  const double nv = v.norm();
  const double cross2 = nu * nu * nv * nv - u.dot(v) * u.dot(v);
  if (nu == 0.0 || nv == 0.0 || cross2 <= 1e-24 * nu * nu * nv * nv) {
    throw InputError("classify_plane: vectors are linearly dependent");
  }
  const Eigen::Matrix2d G = gram_matrix(gp, u, v);
  const double scale = G.cwiseAbs().maxCoeff();
  const double det = G.determinant();
  if (std::abs(det) <= kDegenerateTol * scale * scale || scale == 0.0) return PlaneType::Degenerate;
  if (det < 0) return PlaneType::Mixed;
  return G.trace() > 0 ? PlaneType::Spacelike : PlaneType::Timelike;
}

PlaneSpec make_plane(const MetricAtPoint& gp, const Vector& u, const Vector& v, int orientation) {
  PlaneSpec plane;
  plane.u = u;
  plane.v = v;
  plane.orientation = orientation < 0 ? -1 : 1;
  plane.type = classify_plane(gp, u, v);
  plane.gram = gram_matrix(gp, u, v);
  return plane;
}

std::pair<Vector, Vector> orthonormal_oriented_basis(const MetricAtPoint& gp, const Vector& u,
                                                     const Vector& v) {
  const PlaneType type = classify_plane(gp, u, v);
  if (type == PlaneType::Degenerate) {
    throw DegeneracyError("orthonormal_oriented_basis: plane is degenerate");
  }
  const double scale = gram_matrix(gp, u, v).cwiseAbs().maxCoeff();
  // pivot = a u + b v
  const std::array<Eigen::Vector2d, 4> coeffs{Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1),
                                              Eigen::Vector2d(1, 1), Eigen::Vector2d(1, -1)};
  std::optional<Eigen::Vector2d> chosen;
  for (const Eigen::Vector2d& c : coeffs) {
    const Vector w = c(0) * u + c(1) * v;
    const double q = inner(gp, w, w);
    const bool ok = type == PlaneType::Mixed ? q >= kPivotTol * scale : std::abs(q) >= kPivotTol * scale;
    if (ok) {
      chosen = c;
      break;
    }
  }
  if (!chosen && type == PlaneType::Mixed) {
    // spacelike eigendirection of the Gram matrix
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(gram_matrix(gp, u, v));
    chosen = es.eigenvectors().col(1);
  }
  if (!chosen) {
    throw DegeneracyError("orthonormal_oriented_basis: no vector with |(w,w)| above pivot tolerance");
  }
  const Vector pivot = (*chosen)(0) * u + (*chosen)(1) * v;
  const double q1 = inner(gp, pivot, pivot);
  Vector X1 = pivot / std::sqrt(std::abs(q1));
  const Vector& other = std::abs((*chosen)(1)) >= std::abs((*chosen)(0)) ? u : v;
  const double e1 = q1 > 0 ? 1.0 : -1.0;
  Vector rest = other - (inner(gp, other, X1) * e1) * X1;
  const double q2 = inner(gp, rest, rest);
  if (std::abs(q2) < kPivotTol * kPivotTol * scale) {
    throw DegeneracyError("orthonormal_oriented_basis: complement vector is null");
  }
  Vector X2 = rest / std::sqrt(std::abs(q2));

  // orientation of (X1, X2) relative to (u, v)
  Matrix B(u.size(), 2);
  B.col(0) = u;
  B.col(1) = v;
  Matrix Xs(u.size(), 2);
  Xs.col(0) = X1;
  Xs.col(1) = X2;
  const Eigen::Matrix2d C = (B.transpose() * B).ldlt().solve(B.transpose() * Xs);
  if (C.determinant() < 0) X2 = -X2;
  return {X1, X2};
}

Vector sample_unit(const MetricSpec& spec, const MetricAtPoint& gp, int sign, Rng& rng,
                   const SlotSet& support) {
  if (sign != 1 && sign != -1) throw InputError("sample_unit: sign must be +1 or -1");
  const std::size_t n = spec.dimension();
  if (gp.dimension() != n) throw InputError("sample_unit: metric/point dimension mismatch");
  SlotSet slots = support;
  if (slots.empty()) {
    for (std::size_t i = 0; i < n; ++i) slots.push_back(i);
  }
  for (const std::size_t s : slots) {
    if (s >= n) throw InputError("sample_unit: support slot out of range");
  }
  const std::size_t p = spec.p();
  std::vector<std::size_t> paired_x;
  for (const std::size_t s : slots) {
    if (s < p && std::find(slots.begin(), slots.end(), s + p) != slots.end()) paired_x.push_back(s);
  }

  const double target = static_cast<double>(sign);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Vector Z = Vector::Zero(ix(n));
    for (const std::size_t s : slots) Z(ix(s)) = rng.uniform(-1.0, 1.0);
    const double q = inner(gp, Z, Z);
    if (!paired_x.empty()) {
      // (Z, Z) is affine in Z_{y_i} with slope 2 Z_{x_i}
      std::size_t best = paired_x.front();
      for (const std::size_t s : paired_x) {
        if (std::abs(Z(ix(s))) > std::abs(Z(ix(best)))) best = s;
      }
      if (std::abs(Z(ix(best))) < 0.1) continue;
      Z(ix(best + p)) += (target - q) / (2.0 * Z(ix(best)));
    } else {
      if (sign * q <= 1e-3 * Z.squaredNorm()) continue;
      Z /= std::sqrt(std::abs(q));
    }
    if (std::abs(inner(gp, Z, Z) - target) <= 1e-12) return Z;
  }
  throw SamplingError("sample_unit: no unit vector of sign " + std::to_string(sign) +
                      " found in 100 draws");
}

Vector sample_unit(const MetricSpec& spec, const PointChart& point, int sign, Rng& rng) {
  return sample_unit(spec, metric_at(spec, point), sign, rng);
}

PlaneSpec sample_plane(const MetricSpec& spec, const MetricAtPoint& gp, PlaneType type, Rng& rng,
                       const SlotSet& support_u, const SlotSet& support_v) {
  int su = 1, sv = 1;
  switch (type) {
    case PlaneType::Spacelike: break;
    case PlaneType::Timelike: su = sv = -1; break;
    case PlaneType::Mixed: sv = -1; break;
    case PlaneType::Degenerate: throw InputError("sample_plane: cannot request a degenerate plane");
  }
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Vector u = sample_unit(spec, gp, su, rng, support_u);
    const Vector v = sample_unit(spec, gp, sv, rng, support_v);
    const double nu = u.norm(), nv = v.norm();
    if (nu * nu * nv * nv - u.dot(v) * u.dot(v) <= 1e-12 * nu * nu * nv * nv) continue;
    if (classify_plane(gp, u, v) == type) return make_plane(gp, u, v);
  }
  throw SamplingError("sample_plane: no " + plane_type_name(type) + " plane in 1000 draws");
}

PlaneSpec sample_plane(const MetricSpec& spec, const PointChart& point, PlaneType type, Rng& rng) {
  return sample_plane(spec, metric_at(spec, point), type, rng);
}

double self_adjoint_defect(const Matrix& mat, const Matrix& g) {
  const Matrix gm = g * mat;
  return (gm - gm.transpose()).cwiseAbs().maxCoeff() / (1.0 + gm.cwiseAbs().maxCoeff());
}

double skew_adjoint_defect(const Matrix& mat, const Matrix& g) {
  const Matrix gm = g * mat;
  return (gm + gm.transpose()).cwiseAbs().maxCoeff() / (1.0 + gm.cwiseAbs().maxCoeff());
}

}  // namespace nilcurv
