#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nilcurv/report.hpp"
#include "nilcurv/tensor_engine.hpp"

namespace nilcurv {

/// Sample budgets: `points` random points in [-1, 1]^n and `samples` draws
/// per domain (sign or plane type) at each point.
struct VerifyOptions {
  std::size_t points = 10;
  std::size_t samples = 100;
  Tolerances tol;
  std::uint64_t seed = 0;
};

// Decision table for gradient metrics. Everything the verifier expects
// to see is read from here.

/// Jacobi rank on a unit vector whose X-part satisfies L(X, X) != 0 or = 0.
int expected_jacobi_rank(std::size_t p, bool null_branch);

/// Jordan Osserman at a point: constant profile on S+ and S- iff p <= 2 or
/// L is definite.
struct SignPattern {
  bool spacelike_constant = true;
  bool timelike_constant = true;
};
SignPattern expected_jordan_osserman(std::size_t p, Definiteness L);

/// Product of a positive definite gradient base with a flat factor of
/// signature (a, b).
struct ProductExpectation {
  SignPattern jacobi;
  SignPattern skew;
  /// Ranks allowed on each domain.
  std::vector<int> jacobi_spacelike_ranks;
  std::vector<int> jacobi_timelike_ranks;
  std::vector<int> skew_spacelike_ranks;
  std::vector<int> skew_timelike_ranks;
};
ProductExpectation expected_product(std::size_t p, std::size_t a, std::size_t b);

/// Curvature route the verifier evaluates for a spec.
CurvatureRoute preferred_route(const MetricSpec& spec);

VerificationReport verify_trinity_nilpotent(const MetricSpec& spec, const VerifyOptions& opt);
VerificationReport verify_ricci_flat(const MetricSpec& spec, const VerifyOptions& opt);
VerificationReport verify_rank_law_jacobi(const MetricSpec& spec, const VerifyOptions& opt);
VerificationReport verify_jordan_osserman_class(const MetricSpec& spec, const VerifyOptions& opt);
VerificationReport verify_ip_class(const MetricSpec& spec, const VerifyOptions& opt);
/// Searches S+ and S- at `point` (or, if absent, the origin and then
/// sampled points until nabla R != 0) for unit vectors with different Szabo
/// rank. `samples` is the evaluation budget per sign.
VerificationReport refute_jordan_szabo(const MetricSpec& spec, const std::optional<PointChart>& point,
                                       const VerifyOptions& opt);
VerificationReport verify_product_theorem(const MetricSpec& spec, const VerifyOptions& opt);
VerificationReport check_local_symmetry(const MetricSpec& spec, const VerifyOptions& opt);
VerificationReport verify_affine_link(const MetricSpec& spec, const VerifyOptions& opt);

/// Property names accepted by verify_property, in verify-all order.
const std::vector<std::string>& property_names();
/// Properties that apply to the family of `spec`.
std::vector<std::string> applicable_properties(const MetricSpec& spec);
VerificationReport verify_property(const std::string& name, const MetricSpec& spec,
                                   const VerifyOptions& opt,
                                   const std::optional<PointChart>& point = std::nullopt);
std::vector<VerificationReport> verify_all(const MetricSpec& spec, const VerifyOptions& opt,
                                           const std::optional<PointChart>& point = std::nullopt);

/// Affine curvature operator X2 -> R_nabla(X2, X1) X1 on R^p.
Matrix affine_jacobi(const MetricSpec& spec, const Vector& x, const Vector& X);

}  // namespace nilcurv
