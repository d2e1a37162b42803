#include <gtest/gtest.h>

#include <cmath>

#include <nilcurv/errors.hpp>
#include <nilcurv/operators.hpp>
#include <nilcurv/spectral.hpp>

#include "test_support.hpp"

using namespace nilcurv;
using nilcurv::testing::half_quadratic;
using nilcurv::testing::mono;
using nilcurv::testing::point_of;
using nilcurv::testing::random_cubic_psi;
using nilcurv::testing::random_point;

namespace {

using Index = Eigen::Index;

Vector vec(std::initializer_list<double> values) { return point_of(values).coords; }

Vector random_vector(std::size_t n, Rng& rng) { return random_point(n, rng).coords; }

double sum_R(const Riemann& R, const Vector& a, const Vector& b, const Vector& c, const Vector& d) {
  const std::size_t n = R.dim();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          s += R(i, j, k, l) * a(Index(i)) * b(Index(j)) * c(Index(k)) * d(Index(l));
  return s;
}

double sum_dR(const NablaRiemann& D, const Vector& a, const Vector& b, const Vector& c,
              const Vector& d, const Vector& e) {
  const std::size_t n = D.dim();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          for (std::size_t m = 0; m < n; ++m)
            s += D(i, j, k, l, m) * a(Index(i)) * b(Index(j)) * c(Index(k)) * d(Index(l)) * e(Index(m));
  return s;
}

struct Fixture {
  MetricSpec spec;
  PointChart point;
  MetricAtPoint gp;
  CurvatureData curv;
};

Fixture make_fixture(const MetricSpec& spec, const PointChart& P) {
  const CurvatureEngine eng(spec);
  return {spec, P, metric_at(spec, P), eng.curvature(P, CurvatureRoute::General, true)};
}

double sq_defect(const Matrix& m) {
  const double nrm = m.cwiseAbs().maxCoeff();
  return (m * m).cwiseAbs().maxCoeff() / (1.0 + nrm * nrm);
}

}  // namespace

TEST(JacobiOp, DefiningIdentity) {
  Rng rng(51);
  const Fixture f = make_fixture(random_cubic_psi(2, rng), random_point(4, rng));
  for (int k = 0; k < 5; ++k) {
    const Vector X = random_vector(4, rng), Y = random_vector(4, rng), Z = random_vector(4, rng);
    const Matrix J = jacobi_op(f.curv, f.gp, X).mat;
    EXPECT_NEAR((J * Y).dot(f.gp.g * Z), sum_R(f.curv.R, Y, X, X, Z), 1e-10);
    EXPECT_NEAR((J * Y).dot(f.gp.g * Z), (J * Z).dot(f.gp.g * Y), 1e-10);
    EXPECT_LE((J * X).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(self_adjoint_defect(J, f.gp.g), 1e-9);
  }
}

TEST(JacobiOp, ScalingAndYVectors) {
  Rng rng(52);
  const Fixture f = make_fixture(random_cubic_psi(2, rng), random_point(4, rng));
  const Vector X = random_vector(4, rng);
  const Matrix J1 = jacobi_op(f.curv, f.gp, X).mat;
  const Matrix J2 = jacobi_op(f.curv, f.gp, 2.0 * X).mat;
  EXPECT_LE((J2 - 4.0 * J1).cwiseAbs().maxCoeff(), 1e-12 * (1 + J1.cwiseAbs().maxCoeff()));
  EXPECT_LE(jacobi_op(f.curv, f.gp, vec({0, 0, 1, 0})).mat.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(jacobi_op(f.curv, f.gp, Vector::Zero(4)), InputError);
  EXPECT_THROW(jacobi_op(f.curv, f.gp, Vector::Ones(3)), InputError);
}

TEST(JacobiOp, DiagonalQuadraticExample) {
  const std::vector<double> eps{1.0, -1.0, 1.0};
  const MetricSpec s = MetricSpec::gradient(3, half_quadratic(eps));
  const Fixture f = make_fixture(s, point_of({0.2, 0.1, -0.3, 0, 0, 0}));
  const Matrix J = jacobi_op(f.curv, f.gp, vec({1, 0, 0, 0, 0, 0})).mat;
  const Matrix form = f.gp.g * J;  // (J e_i, e_j) = form(j, i)
  for (Index i = 1; i < 3; ++i)
    for (Index j = 1; j < 3; ++j)
      EXPECT_NEAR(form(j, i), i == j ? eps[0] * eps[std::size_t(i)] : 0.0, 1e-12);
  EXPECT_EQ(numerical_rank(J, 1e-8), 2);
}

TEST(JacobiOp, NilpotentWithRangeInY) {
  Rng rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t p = 2 + std::size_t(trial % 3);
    const Fixture f = make_fixture(random_cubic_psi(p, rng), random_point(2 * p, rng));
    for (const int sign : {1, -1}) {
      const Vector Z = sample_unit(f.spec, f.gp, sign, rng);
      const Matrix J = jacobi_op(f.curv, f.gp, Z).mat;
      EXPECT_LE(sq_defect(J), 1e-10);
      EXPECT_LE(J.topRows(Index(p)).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_LE(J.rightCols(Index(p)).cwiseAbs().maxCoeff(), 1e-10);
      Vector X = Z;
      X.tail(Index(p)).setZero();
      EXPECT_LE((jacobi_op(f.curv, f.gp, X).mat - J).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(SzaboOp, DefiningIdentityAndScaling) {
  Rng rng(54);
  const Fixture f = make_fixture(random_cubic_psi(3, rng), random_point(6, rng));
  const NablaRiemann& D = *f.curv.nabla_R;
  const Vector X = random_vector(6, rng), Y = random_vector(6, rng), Z = random_vector(6, rng);
  const Matrix S = szabo_op(D, f.gp, X).mat;
  EXPECT_NEAR((S * Y).dot(f.gp.g * Z), sum_dR(D, Y, X, X, Z, X), 1e-9);
  EXPECT_LE(self_adjoint_defect(S, f.gp.g), 1e-9);
  EXPECT_LE((S * X).cwiseAbs().maxCoeff(), 1e-9);
  const double scale = 1 + S.cwiseAbs().maxCoeff();
  EXPECT_LE((szabo_op(D, f.gp, 2.0 * X).mat - 8.0 * S).cwiseAbs().maxCoeff(), 1e-12 * scale * 8);
  EXPECT_LE((szabo_op(D, f.gp, -X).mat + S).cwiseAbs().maxCoeff(), 1e-12 * scale);
  EXPECT_LE(szabo_op(D, f.gp, vec({0, 0, 0, 1, 0, 0})).mat.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(sq_defect(S), 1e-10);
  EXPECT_THROW(szabo_op(D, f.gp, Vector::Zero(6)), InputError);
}

TEST(SzaboOp, QuadraticPsiGivesZero) {
  PolyMatrix psi(2, 2);
  psi(0, 0) = mono(1.0, {1, 1});
  psi(1, 1) = mono(-2.0, {0, 2});
  const Fixture f = make_fixture(MetricSpec::psi(2, psi), point_of({0.5, 0.5, 1, 1}));
  EXPECT_LE(szabo_op(*f.curv.nabla_R, f.gp, vec({1, 2, 3, 4})).mat.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Planes, ClassificationExamples) {
  const MetricSpec flat = MetricSpec::flat(1, 2);
  const MetricAtPoint gp = metric_at(flat, point_of({0, 0, 0}));
  EXPECT_EQ(classify_plane(gp, vec({0, 1, 0}), vec({0, 0, 1})), PlaneType::Spacelike);
  EXPECT_EQ(classify_plane(gp, vec({1, 0, 0}), vec({0, 1, 0})), PlaneType::Mixed);
  EXPECT_EQ(classify_plane(gp, vec({1, 1, 0}), vec({0, 0, 1})), PlaneType::Degenerate);
  EXPECT_THROW(classify_plane(gp, vec({0, 1, 0}), vec({0, 2, 0})), InputError);
  const MetricAtPoint gm = metric_at(MetricSpec::flat(2, 1), point_of({0, 0, 0}));
  EXPECT_EQ(classify_plane(gm, vec({1, 0, 0}), vec({0, 1, 0})), PlaneType::Timelike);
}

TEST(Planes, PiOneAndPiTwo) {
  const MetricSpec s = MetricSpec::gradient(2, half_quadratic({1.0, 1.0}));
  const PointChart P = point_of({0.3, -0.2, 0.4, 0.1});
  const Fixture f = make_fixture(s, P);
  const double rho11 = f.gp.g(0, 0);

  const Vector y1 = vec({0, 0, 1, 0}), x1 = vec({1, 0, 0, 0});
  const Eigen::Matrix2d A1 = gram_matrix(f.gp, y1, x1);
  EXPECT_DOUBLE_EQ(A1(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(A1(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(A1(1, 1), rho11);
  EXPECT_NEAR(A1.determinant(), -1.0, 1e-14);
  const PlaneSpec pi1 = make_plane(f.gp, y1, x1);
  EXPECT_EQ(pi1.type, PlaneType::Mixed);
  EXPECT_LE(skew_op(f.curv, f.gp, pi1).mat.cwiseAbs().maxCoeff(), 1e-12);

  const double e = 0.1;
  const Vector u = vec({e, 0, 1 / e, 0}), v = vec({0, e, 0, -1 / e});
  const Eigen::Matrix2d A2 = gram_matrix(f.gp, u, v);
  EXPECT_NEAR(A2(0, 0), 2 + e * e * f.gp.g(0, 0), 1e-12);
  EXPECT_NEAR(A2(0, 1), e * e * f.gp.g(0, 1), 1e-12);
  EXPECT_NEAR(A2(1, 1), e * e * f.gp.g(1, 1) - 2, 1e-12);
  EXPECT_LE(std::abs(A2.determinant() + 4.0), 0.1);
  const PlaneSpec pi2 = make_plane(f.gp, u, v);
  EXPECT_EQ(pi2.type, PlaneType::Mixed);
  const auto [X1, X2] = orthonormal_oriented_basis(f.gp, u, v);
  const Eigen::Matrix2d G = gram_matrix(f.gp, X1, X2);
  EXPECT_LE((G - Eigen::Vector2d(1, -1).asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ(numerical_rank(skew_op(f.curv, f.gp, pi2).mat, 1e-8), 2);
}

TEST(Planes, OrthonormalBasisContract) {
  const MetricAtPoint gp = metric_at(MetricSpec::flat(2, 2), point_of({0, 0, 0, 0}));
  const Vector e3 = vec({0, 0, 1, 0}), e4 = vec({0, 0, 0, 1});
  const auto [a, b] = orthonormal_oriented_basis(gp, e3, e4);
  EXPECT_LE((a - e3).norm(), 1e-15);
  EXPECT_LE((b - e4).norm(), 1e-15);

  Rng rng(55);
  const MetricSpec s = random_cubic_psi(3, rng);
  const MetricAtPoint g = metric_at(s, random_point(6, rng));
  for (int k = 0; k < 50; ++k) {
    const Vector u = random_vector(6, rng), v = random_vector(6, rng);
    const PlaneType t = classify_plane(g, u, v);
    if (t == PlaneType::Degenerate) continue;
    const auto [X1, X2] = orthonormal_oriented_basis(g, u, v);
    const Eigen::Matrix2d G = gram_matrix(g, X1, X2);
    const double s1 = t == PlaneType::Timelike ? -1 : 1;
    const double s2 = t == PlaneType::Spacelike ? 1 : -1;
    EXPECT_NEAR(G(0, 0), s1, 1e-9);
    EXPECT_NEAR(G(1, 1), s2, 1e-9);
    EXPECT_NEAR(G(0, 1), 0.0, 1e-9);
    // same orientation: (X1, X2) = (u, v) C with det C > 0
    Matrix UV(6, 2), XX(6, 2);
    UV << u, v;
    XX << X1, X2;
    const Eigen::Matrix2d C = UV.colPivHouseholderQr().solve(XX);
    EXPECT_GT(C.determinant(), 0.0);
  }
}

TEST(SkewOp, IdentityBasisInvarianceAndOrientation) {
  Rng rng(56);
  const MetricSpec s = MetricSpec::gradient(3, half_quadratic({1.0, 2.0, 1.5}));
  const Fixture f = make_fixture(s, random_point(6, rng));
  for (int k = 0; k < 5; ++k) {
    const PlaneSpec pl = sample_plane(s, f.gp, PlaneType::Spacelike, rng);
    const Matrix M = skew_op(f.curv, f.gp, pl).mat;
    const auto [X1, X2] = orthonormal_oriented_basis(f.gp, pl.u, pl.v);
    const Vector Y = random_vector(6, rng), Z = random_vector(6, rng);
    EXPECT_NEAR((M * Y).dot(f.gp.g * Z), sum_R(f.curv.R, X1, X2, Y, Z), 1e-9);
    EXPECT_LE(skew_adjoint_defect(M, f.gp.g), 1e-9);
    EXPECT_EQ(numerical_rank(M, 1e-8), 2);
    EXPECT_LE(sq_defect(M), 1e-10);

    const double th = rng.uniform(0.0, 6.0);
    const Vector r1 = std::cos(th) * X1 + std::sin(th) * X2;
    const Vector r2 = -std::sin(th) * X1 + std::cos(th) * X2;
    const double scale = 1 + M.cwiseAbs().maxCoeff();
    EXPECT_LE((skew_op(f.curv, f.gp, make_plane(f.gp, r1, r2)).mat - M).cwiseAbs().maxCoeff(), 1e-9 * scale);
    EXPECT_LE((skew_op(f.curv, f.gp, make_plane(f.gp, pl.u, pl.v, -1)).mat + M).cwiseAbs().maxCoeff(),
              1e-9 * scale);
    EXPECT_LE((skew_op(f.curv, f.gp, make_plane(f.gp, pl.v, pl.u)).mat + M).cwiseAbs().maxCoeff(),
              1e-9 * scale);
  }
  PlaneSpec bad = make_plane(f.gp, vec({0, 0, 0, 1, 0, 0}), vec({0, 0, 0, 0, 1, 0}));
  EXPECT_EQ(bad.type, PlaneType::Degenerate);
  EXPECT_THROW(skew_op(f.curv, f.gp, bad), InputError);
}

TEST(Sampling, UnitVectorExamples) {
  PolyMatrix psi(1, 1);
  psi(0, 0) = mono(3.0, {1});
  const MetricSpec s = MetricSpec::psi(1, psi);
  const MetricAtPoint gp = metric_at(s, point_of({0.5, 0}));
  const double psi11 = gp.g(0, 0);
  for (const double sign : {1.0, -1.0}) {
    const Vector Z = vec({1, (sign - psi11) / 2});
    EXPECT_NEAR(inner(gp, Z, Z), sign, 1e-15);
  }
}

TEST(Sampling, UnitVectorsHitTarget) {
  Rng rng(57);
  const MetricSpec s = random_cubic_psi(3, rng);
  const MetricAtPoint gp = metric_at(s, random_point(6, rng));
  for (int k = 0; k < 1000; ++k) {
    const int sign = k % 2 ? 1 : -1;
    const Vector Z = sample_unit(s, gp, sign, rng);
    ASSERT_LE(std::abs(inner(gp, Z, Z) - sign), 1e-12);
  }
  const MetricSpec prod = MetricSpec::product(s, 1, 1);
  const MetricAtPoint gq = metric_at(prod, random_point(8, rng));
  for (int k = 0; k < 200; ++k) {
    const int sign = k % 2 ? 1 : -1;
    const Vector W = sample_unit(prod, gq, sign, rng, {6, 7});
    EXPECT_LE(std::abs(inner(gq, W, W) - sign), 1e-12);
    EXPECT_EQ(W.head(6).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Sampling, UnattainableSignThrows) {
  Rng rng(58);
  const MetricSpec s = MetricSpec::flat(0, 2);
  EXPECT_THROW(sample_unit(s, point_of({0, 0}), -1, rng), SamplingError);
}

TEST(Sampling, PlanesMatchRequest) {
  Rng rng(59);
  const MetricSpec s = random_cubic_psi(2, rng);
  const PointChart P = random_point(4, rng);
  const MetricAtPoint gp = metric_at(s, P);
  for (const PlaneType t : {PlaneType::Spacelike, PlaneType::Timelike, PlaneType::Mixed}) {
    for (int k = 0; k < 20; ++k) {
      const PlaneSpec pl = sample_plane(s, P, t, rng);
      EXPECT_EQ(pl.type, t);
      EXPECT_EQ(classify_plane(gp, pl.u, pl.v), t);
      const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(pl.gram);
      if (t == PlaneType::Spacelike) EXPECT_GT(es.eigenvalues()(0), 0.0);
      if (t == PlaneType::Timelike) EXPECT_LT(es.eigenvalues()(1), 0.0);
    }
  }
}
