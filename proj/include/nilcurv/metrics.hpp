#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nilcurv/polyfunc.hpp"

namespace nilcurv {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Square array of polynomials, row-major.
class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(std::size_t rows, std::size_t nvars);

  std::size_t size() const { return rows_; }
  Polynomial& operator()(std::size_t i, std::size_t j) { return data_[i * rows_ + j]; }
  const Polynomial& operator()(std::size_t i, std::size_t j) const { return data_[i * rows_ + j]; }
  bool is_symmetric() const;

 private:
  std::size_t rows_ = 0;
  std::vector<Polynomial> data_;
};

enum class Family { Psi, Gradient, Affine, Flat, Product };

std::string family_name(Family f);

/// Coordinates of a point, ordered (x_1..x_p, y_1..y_p, w_1..w_{a+b}).
struct PointChart {
  Vector coords;

  std::size_t size() const { return static_cast<std::size_t>(coords.size()); }
  /// The first `p` slots.
  Vector x_part(std::size_t p) const { return coords.head(static_cast<Eigen::Index>(p)); }
};

/// (negative count, positive count).
struct Signature {
  int negative = 0;
  int positive = 0;
  friend bool operator==(const Signature&, const Signature&) = default;
};

struct MetricAtPoint {
  Matrix g;
  Matrix g_inv;
  Signature signature;

  std::size_t dimension() const { return static_cast<std::size_t>(g.rows()); }
};

/// One of the metric families on R^{2p} (optionally times a flat factor).
///
/// Psi:      g = [[psi(x), I], [I, 0]]
/// Gradient: Psi with psi_ij = (d_i f)(d_j f); both f and the expansion are kept
/// Affine:   Psi-shaped with psi_ij(x, y) = -2 sum_k y_k Gamma_ij^k(x)
/// Flat:     diag(-1 x a, +1 x b)
/// Product:  base (+) Flat(a, b), block diagonal with the base first
///
/// Instances are immutable once built; all factories validate their input
/// and throw ConstructionError on violations.
class MetricSpec {
 public:
  static MetricSpec psi(std::size_t p, PolyMatrix psi);
  static MetricSpec gradient(std::size_t p, Polynomial f);
  /// `gamma[(i * p + j) * p + k]` holds Gamma_ij^k, a polynomial in x.
  static MetricSpec affine(std::size_t p, std::vector<Polynomial> gamma);
  static MetricSpec flat(std::size_t negative, std::size_t positive);
  static MetricSpec product(const MetricSpec& base, std::size_t negative, std::size_t positive);

  Family family() const { return family_; }
  /// Size of the X (and of the Y) block; 0 for a bare flat space.
  std::size_t p() const { return p_; }
  std::size_t dimension() const { return dimension_; }
  /// Number of slots before the flat factor.
  std::size_t base_dimension() const { return 2 * p_; }
  std::size_t flat_negative() const { return flat_neg_; }
  std::size_t flat_positive() const { return flat_pos_; }

  /// Family that carries the X/Y structure (the base for products).
  Family core_family() const;

  /// psi_ij(x); available for Psi and Gradient (and products over them).
  const PolyMatrix& psi() const;
  /// f; Gradient only (and products over it).
  const Polynomial& potential() const;
  /// Gamma_ij^k; Affine only (and products over it).
  const Polynomial& gamma(std::size_t i, std::size_t j, std::size_t k) const;
  const MetricSpec& base() const;

  /// Metric coefficients g_ab as polynomials in all `dimension()` chart
  /// coordinates.
  const PolyMatrix& components() const { return *components_; }

  Signature expected_signature() const;

  /// Gradient expanded to the equivalent Psi spec.
  MetricSpec as_psi() const;

 private:
  MetricSpec() = default;
  void build_components();

  Family family_ = Family::Flat;
  std::size_t p_ = 0;
  std::size_t dimension_ = 0;
  std::size_t flat_neg_ = 0;
  std::size_t flat_pos_ = 0;
  std::shared_ptr<const PolyMatrix> psi_;
  std::shared_ptr<const Polynomial> potential_;
  std::shared_ptr<const std::vector<Polynomial>> gamma_;
  std::shared_ptr<const MetricSpec> base_;
  std::shared_ptr<const PolyMatrix> components_;
};

/// Evaluates g, its inverse and its signature at P.
MetricAtPoint metric_at(const MetricSpec& spec, const PointChart& point);

/// u^T g v.
double inner(const MetricAtPoint& gp, const Vector& u, const Vector& v);

/// Coordinate basis vector e_i of length n.
Vector basis_vector(std::size_t n, std::size_t i);

}  // namespace nilcurv
