#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nilcurv/metrics.hpp"
#include "nilcurv/rng.hpp"
#include "nilcurv/tensor_engine.hpp"

namespace nilcurv {

enum class OperatorKind { Jacobi, Szabo, SkewCurvature };

std::string operator_kind_name(OperatorKind k);

/// Coordinate-frame matrix of a curvature operator (one index raised with
/// g^-1), with the arguments it was built from.
struct OperatorMatrix {
  Matrix mat;
  OperatorKind kind = OperatorKind::Jacobi;
  PointChart point;
  std::vector<Vector> arguments;
};

enum class PlaneType { Spacelike, Timelike, Mixed, Degenerate };

std::string plane_type_name(PlaneType t);

struct PlaneSpec {
  Vector u;
  Vector v;
  int orientation = 1;
  PlaneType type = PlaneType::Degenerate;
  Eigen::Matrix2d gram;
};

/// (J(X)Y, Z) = R(Y, X, X, Z); Y -> R(Y, X)X.
OperatorMatrix jacobi_op(const CurvatureData& curv, const MetricAtPoint& gp, const Vector& X);
/// (S(X)Y, Z) = nabla R(Y, X, X, Z; X).
OperatorMatrix szabo_op(const NablaRiemann& nabla_R, const MetricAtPoint& gp, const Vector& X,
                        const PointChart& point = {});
/// Y -> R(X1, X2)Y for an oriented orthonormal basis of the plane.
OperatorMatrix skew_op(const CurvatureData& curv, const MetricAtPoint& gp, const PlaneSpec& plane);

/// Lowered bilinear forms M with (T Y, Z) = Y^T M Z.
Matrix jacobi_form(const Riemann& R, const Vector& X);
Matrix szabo_form(const NablaRiemann& nabla_R, const Vector& X);

/// Orthonormal basis (X1, X2) of span{u, v} with the orientation of (u, v).
/// Mixed planes return the spacelike vector first.
std::pair<Vector, Vector> orthonormal_oriented_basis(const MetricAtPoint& gp, const Vector& u,
                                                     const Vector& v);

Eigen::Matrix2d gram_matrix(const MetricAtPoint& gp, const Vector& u, const Vector& v);
PlaneType classify_plane(const MetricAtPoint& gp, const Vector& u, const Vector& v);
PlaneSpec make_plane(const MetricAtPoint& gp, const Vector& u, const Vector& v,
                     int orientation = 1);

/// Restricts sampling to the listed coordinate slots; empty means all.
using SlotSet = std::vector<std::size_t>;

/// Z with (Z, Z) = sign. Components are uniform in [-1, 1]; when the support
/// contains a paired (x_i, y_i) slot the y_i component is solved for
/// exactly, otherwise the draw is rescaled. Throws SamplingError after 100
/// failed draws.
Vector sample_unit(const MetricSpec& spec, const MetricAtPoint& gp, int sign, Rng& rng,
                   const SlotSet& support = {});
Vector sample_unit(const MetricSpec& spec, const PointChart& point, int sign, Rng& rng);

/// Rejection-samples a plane of the requested type from pairs of unit
/// vectors. Throws SamplingError after 1000 rejections.
PlaneSpec sample_plane(const MetricSpec& spec, const MetricAtPoint& gp, PlaneType type, Rng& rng,
                       const SlotSet& support_u = {}, const SlotSet& support_v = {});
PlaneSpec sample_plane(const MetricSpec& spec, const PointChart& point, PlaneType type, Rng& rng);

/// Max entry of g*mat - (g*mat)^T (or + for skew), over 1 + max |g*mat|.
double self_adjoint_defect(const Matrix& mat, const Matrix& g);
double skew_adjoint_defect(const Matrix& mat, const Matrix& g);

}  // namespace nilcurv
