#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include <nilcurv/errors.hpp>
#include <nilcurv/spectral.hpp>
#include <nilcurv/verifier.hpp>

#include "test_support.hpp"

using namespace nilcurv;
using nilcurv::testing::half_quadratic;
using nilcurv::testing::mono;
using nilcurv::testing::random_cubic_psi;

namespace {

VerifyOptions small_options(std::size_t points = 3, std::size_t samples = 40, std::uint64_t seed = 1) {
  VerifyOptions o;
  o.points = points;
  o.samples = samples;
  o.seed = seed;
  return o;
}

MetricSpec gradient_diag(const std::vector<double>& eps) {
  return MetricSpec::gradient(eps.size(), half_quadratic(eps));
}

MetricSpec szabo_example() {
  // x1^3 + x1 x2^2 + (x1^2 + x2^2 + x3^2) / 2
  Polynomial f = half_quadratic({1.0, 1.0, 1.0});
  f.add_term({3, 0, 0}, 1.0);
  f.add_term({1, 2, 0}, 1.0);
  return MetricSpec::gradient(3, f);
}

MetricSpec affine_from(std::size_t p, const std::vector<std::tuple<int, int, int, Polynomial>>& entries) {
  std::vector<Polynomial> gamma(p * p * p, Polynomial(p));
  for (const auto& [i, j, k, poly] : entries) gamma[(std::size_t(i) * p + std::size_t(j)) * p + std::size_t(k)] = poly;
  return MetricSpec::affine(p, gamma);
}

std::set<int> observed_ranks(const Json& tally) {
  std::set<int> out;
  for (const auto& [branch, by_rank] : tally.items()) {
    for (const auto& [rank, count] : by_rank.items()) out.insert(std::stoi(rank));
  }
  return out;
}

}  // namespace

TEST(DecisionTable, JacobiAndJordanOsserman) {
  EXPECT_EQ(expected_jacobi_rank(3, false), 2);
  EXPECT_EQ(expected_jacobi_rank(3, true), 1);
  EXPECT_EQ(expected_jacobi_rank(2, false), 1);
  EXPECT_TRUE(expected_jordan_osserman(2, Definiteness::Indefinite).spacelike_constant);
  EXPECT_TRUE(expected_jordan_osserman(3, Definiteness::PositiveDefinite).timelike_constant);
  EXPECT_FALSE(expected_jordan_osserman(3, Definiteness::Indefinite).spacelike_constant);
  EXPECT_FALSE(expected_jordan_osserman(4, Definiteness::Indefinite).timelike_constant);
}

TEST(DecisionTable, Product) {
  const ProductExpectation e20 = expected_product(2, 2, 0);
  EXPECT_TRUE(e20.jacobi.spacelike_constant);
  EXPECT_FALSE(e20.jacobi.timelike_constant);
  EXPECT_EQ(e20.jacobi_spacelike_ranks, std::vector<int>{1});
  EXPECT_EQ(e20.jacobi_timelike_ranks, (std::vector<int>{0, 1}));
  const ProductExpectation e02 = expected_product(2, 0, 2);
  EXPECT_FALSE(e02.jacobi.spacelike_constant);
  EXPECT_TRUE(e02.skew.timelike_constant);
  const ProductExpectation e11 = expected_product(2, 1, 1);
  EXPECT_FALSE(e11.jacobi.spacelike_constant || e11.jacobi.timelike_constant);
  EXPECT_FALSE(e11.skew.spacelike_constant || e11.skew.timelike_constant);
}

TEST(Trinity, PassesOnPsiFamilies) {
  Rng rng(71);
  const VerificationReport r = verify_trinity_nilpotent(random_cubic_psi(3, rng), small_options());
  EXPECT_EQ(r.status, Status::Pass);
  EXPECT_EQ(r.samples["unit_vectors"], 3u * 2 * 40);
  EXPECT_EQ(r.samples["planes"], 3u * 3 * 40);
  EXPECT_EQ(verify_trinity_nilpotent(MetricSpec::psi(2, PolyMatrix(2, 2)), small_options()).status, Status::Pass);
  const MetricSpec prod = MetricSpec::product(gradient_diag({1.0, 1.0}), 1, 1);
  EXPECT_EQ(verify_trinity_nilpotent(prod, small_options()).status, Status::Pass);
}

TEST(Trinity, GradientAndExpandedPsiAgree) {
  Rng rng(72);
  const MetricSpec grad = MetricSpec::gradient(2, nilcurv::testing::random_polynomial(2, 4, 1.0, rng));
  const VerificationReport a = verify_trinity_nilpotent(grad, small_options(2, 20));
  const VerificationReport b = verify_trinity_nilpotent(grad.as_psi(), small_options(2, 20));
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.samples, b.samples);
}

TEST(Trinity, DetectsNonNilpotentMetric) {
  const MetricSpec aff = affine_from(2, {{0, 1, 1, mono(1.0, {1, 0})}, {1, 0, 1, mono(1.0, {1, 0})}});
  const VerificationReport r = verify_trinity_nilpotent(aff, small_options(2, 10));
  EXPECT_EQ(r.status, Status::Fail);
  EXPECT_FALSE(r.witnesses.empty());
}

TEST(RicciFlat, Examples) {
  Rng rng(73);
  EXPECT_EQ(verify_ricci_flat(random_cubic_psi(3, rng), small_options(5)).status, Status::Pass);
  EXPECT_EQ(verify_ricci_flat(MetricSpec::psi(2, PolyMatrix(2, 2)), small_options()).status, Status::Pass);
  EXPECT_EQ(verify_ricci_flat(MetricSpec::flat(1, 2), small_options()).status, Status::Pass);
}

TEST(RankLaw, DefiniteGivesRankPMinusOne) {
  for (const std::size_t p : {2u, 3u, 4u}) {
    const VerificationReport r = verify_rank_law_jacobi(gradient_diag(std::vector<double>(p, 1.0)), small_options(2, 50));
    EXPECT_EQ(r.status, Status::Pass) << r.to_text();
    EXPECT_EQ(observed_ranks(r.samples["ranks"]["spacelike"]), std::set<int>{int(p) - 1});
    EXPECT_EQ(observed_ranks(r.samples["ranks"]["timelike"]), std::set<int>{int(p) - 1});
  }
}

TEST(RankLaw, IndefiniteShowsBothBranches) {
  const VerificationReport r = verify_rank_law_jacobi(gradient_diag({1.0, -1.0, 1.0}), small_options(2, 50));
  EXPECT_EQ(r.status, Status::Pass) << r.to_text();
  EXPECT_EQ(observed_ranks(r.samples["ranks"]["spacelike"]), (std::set<int>{1, 2}));
  EXPECT_EQ(observed_ranks(r.samples["ranks"]["timelike"]), (std::set<int>{1, 2}));
  const VerificationReport r2 = verify_rank_law_jacobi(gradient_diag({1.0, -1.0}), small_options(2, 50));
  EXPECT_EQ(r2.status, Status::Pass);
  EXPECT_EQ(observed_ranks(r2.samples["ranks"]["spacelike"]), std::set<int>{1});
}

TEST(RankLaw, RejectsOtherFamilies) {
  Rng rng(74);
  EXPECT_THROW(verify_rank_law_jacobi(random_cubic_psi(2, rng), small_options()), InputError);
}

TEST(JordanOsserman, Classes) {
  const VerificationReport p2 = verify_jordan_osserman_class(gradient_diag({1.0, -1.0}), small_options(2, 30));
  EXPECT_EQ(p2.status, Status::Pass) << p2.to_text();
  const VerificationReport def = verify_jordan_osserman_class(gradient_diag({1.0, 1.0, 1.0}), small_options(2, 30));
  EXPECT_EQ(def.status, Status::Pass);
  for (const Json& pt : def.samples["observed"]) {
    EXPECT_EQ(pt["spacelike"]["profiles"], Json::array({"{2,2,1,1}"}));
    EXPECT_EQ(pt["timelike"]["profiles"], Json::array({"{2,2,1,1}"}));
  }
  const VerificationReport ind = verify_jordan_osserman_class(gradient_diag({1.0, -1.0, 1.0}), small_options(2, 30));
  EXPECT_EQ(ind.status, Status::Pass) << ind.to_text();
  for (const Json& pt : ind.samples["observed"]) {
    EXPECT_FALSE(pt["spacelike"]["constant"].get<bool>());
    EXPECT_FALSE(pt["timelike"]["constant"].get<bool>());
  }
}

TEST(IpClass, GradientCounterexample) {
  const VerificationReport r = verify_ip_class(gradient_diag({1.0, 1.0, 1.0}), small_options(2, 40));
  EXPECT_EQ(r.status, Status::Pass) << r.to_text();
  EXPECT_EQ(r.samples["ranks"]["spacelike"], Json({{"2", 80}}));
  EXPECT_EQ(r.samples["ranks"]["timelike"], Json({{"2", 80}}));
  int pi2 = 0;
  for (const Json& w : r.witnesses) {
    const Json& m = w["measured"];
    if (m.value("label", "") == "pi_1") {
      EXPECT_LE(m["max_abs"].get<double>(), 1e-12);
      EXPECT_EQ(w["plane"]["type"], "mixed");
    }
    if (m.value("label", "") == "pi_2") {
      ++pi2;
      EXPECT_EQ(m["rank"], 2);
      EXPECT_FALSE(m["jordan_equivalent_to_pi_1"].get<bool>());
      EXPECT_LE(std::abs(m["gram_det"].get<double>() + 4.0), 0.1);
    }
  }
  EXPECT_EQ(pi2, 2);
}

TEST(IpClass, PsiChecksNilpotencyOnly) {
  Rng rng(75);
  EXPECT_EQ(verify_ip_class(random_cubic_psi(2, rng), small_options(2, 20)).status, Status::Pass);
}

TEST(SzaboRefutation, VacuousForQuadraticPsi) {
  PolyMatrix psi(2, 2);
  psi(0, 0) = mono(1.0, {0, 2});
  const VerificationReport r = refute_jordan_szabo(MetricSpec::psi(2, psi), std::nullopt, small_options());
  EXPECT_EQ(r.status, Status::Pass);
  ASSERT_FALSE(r.notes.empty());
  EXPECT_NE(r.notes.front().find("vacuous"), std::string::npos);
}

TEST(SzaboRefutation, FindsRankVariationAndWitnessesReverify) {
  const MetricSpec s = szabo_example();
  const PointChart P{Vector::Zero(6)};
  VerifyOptions o = small_options(1, 1000);
  const VerificationReport r = refute_jordan_szabo(s, P, o);
  ASSERT_EQ(r.status, Status::RefutedAsExpected) << r.to_text();
  const CurvatureEngine eng(s);
  const NablaRiemann nR = eng.nabla_riemann(P, CurvatureRoute::General);
  const MetricAtPoint gp = metric_at(s, P);
  std::map<std::string, std::set<int>> ranks;
  for (const Json& w : r.witnesses) {
    const Vector Z = vector_from_json(w["vector"]);
    const std::string sign = w["measured"]["sign"];
    EXPECT_NEAR(inner(gp, Z, Z), sign == "spacelike" ? 1.0 : -1.0, 1e-12);
    const int rank = numerical_rank(szabo_op(nR, gp, Z).mat, 1e-8);
    EXPECT_EQ(rank, w["measured"]["rank"].get<int>());
    ranks[sign].insert(rank);
  }
  EXPECT_GE(ranks["spacelike"].size(), 2u);
  EXPECT_GE(ranks["timelike"].size(), 2u);
}

TEST(Product, DecisionTableMatches) {
  const MetricSpec base = gradient_diag({1.0, 1.0});
  for (const auto& [a, b] : std::vector<std::pair<std::size_t, std::size_t>>{{2, 0}, {0, 2}, {1, 1}}) {
    const VerificationReport r = verify_product_theorem(MetricSpec::product(base, a, b), small_options(2, 60));
    EXPECT_EQ(r.status, Status::Pass) << a << "," << b << "\n" << r.samples.dump(1);
  }
  const VerificationReport r = verify_product_theorem(MetricSpec::product(base, 2, 0), small_options(2, 60));
  EXPECT_EQ(r.samples["decision"]["jacobi"]["spacelike"]["observed_ranks"], Json::array({1}));
  EXPECT_EQ(r.samples["decision"]["jacobi"]["timelike"]["observed_ranks"], Json::array({0, 1}));
  EXPECT_THROW(verify_product_theorem(base, small_options()), InputError);
}

TEST(LocalSymmetry, Examples) {
  PolyMatrix quad(2, 2);
  quad(0, 0) = mono(1.0, {0, 2});
  EXPECT_EQ(check_local_symmetry(MetricSpec::psi(2, quad), small_options()).status, Status::Pass);
  EXPECT_EQ(check_local_symmetry(gradient_diag({1.0, -1.0}), small_options()).status, Status::Pass);

  PolyMatrix cubic(2, 2);
  cubic(0, 0) = mono(1.0, {0, 3});
  const VerificationReport r = check_local_symmetry(MetricSpec::psi(2, cubic), small_options());
  EXPECT_EQ(r.status, Status::RefutedAsExpected);
  ASSERT_EQ(r.witnesses.size(), 1u);
  EXPECT_DOUBLE_EQ(std::abs(r.witnesses[0]["measured"]["value"].get<double>()), 3.0);
}

TEST(AffineLink, FlatConnection) {
  const VerificationReport r = verify_affine_link(affine_from(2, {}), small_options(2, 50));
  EXPECT_EQ(r.status, Status::Pass);
  EXPECT_TRUE(r.samples["affine_nilpotent"].get<bool>());
  EXPECT_TRUE(r.samples["metric_nilpotent"].get<bool>());
}

TEST(AffineLink, NilpotentConnection) {
  // Gamma_11^3 = x_2
  const MetricSpec s = affine_from(3, {{0, 0, 2, mono(1.0, {0, 1, 0})}});
  const Vector x = Vector::Zero(3);
  const Matrix J = affine_jacobi(s, x, Vector::Ones(3));
  EXPECT_GT(J.cwiseAbs().maxCoeff(), 0.5);
  EXPECT_LE((J * J).cwiseAbs().maxCoeff(), 1e-14);
  const VerificationReport r = verify_affine_link(s, small_options(2, 50));
  EXPECT_EQ(r.status, Status::Pass) << r.to_text();
  EXPECT_TRUE(r.samples["affine_nilpotent"].get<bool>());
  EXPECT_TRUE(r.samples["metric_nilpotent"].get<bool>());
}

TEST(AffineLink, NonNilpotentConnection) {
  // Gamma_12^2 = Gamma_21^2 = x_1: J(X) has eigenvalue -(1 + x_1^2) X_1^2
  const MetricSpec s = affine_from(2, {{0, 1, 1, mono(1.0, {1, 0})}, {1, 0, 1, mono(1.0, {1, 0})}});
  Vector x(2), X(2);
  x << 0.5, 0.0;
  X << 1.0, 2.0;
  const Matrix J = affine_jacobi(s, x, X);
  EXPECT_NEAR(J(1, 0), 1.25 * 2.0, 1e-14);
  EXPECT_NEAR(J(1, 1), -1.25, 1e-14);
  const VerificationReport r = verify_affine_link(s, small_options(2, 50));
  EXPECT_EQ(r.status, Status::Pass);
  EXPECT_FALSE(r.samples["affine_nilpotent"].get<bool>());
  EXPECT_FALSE(r.samples["metric_nilpotent"].get<bool>());
}

TEST(Reports, Deterministic) {
  Rng rng(76);
  const MetricSpec s = random_cubic_psi(2, rng);
  const VerifyOptions o = small_options(2, 20, 9);
  EXPECT_EQ(verify_trinity_nilpotent(s, o).to_json().dump(), verify_trinity_nilpotent(s, o).to_json().dump());
  const MetricSpec g = szabo_example();
  EXPECT_EQ(refute_jordan_szabo(g, std::nullopt, o).to_json().dump(),
            refute_jordan_szabo(g, std::nullopt, o).to_json().dump());
  EXPECT_NE(verify_trinity_nilpotent(s, o).to_json().dump(),
            verify_trinity_nilpotent(s, small_options(2, 20, 10)).to_json().dump());
}

TEST(Reports, JsonShape) {
  const VerificationReport r = verify_ricci_flat(MetricSpec::flat(1, 1), small_options());
  const Json j = r.to_json();
  for (const char* key : {"property", "status", "spec_digest", "seed", "tolerances", "samples", "witnesses", "notes"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_FALSE(j.contains("elapsed_ms"));
  EXPECT_EQ(j["status"], "pass");
  EXPECT_EQ(j["spec_digest"].get<std::string>().size(), 16u);
}

TEST(VerifyAll, PropertySelection) {
  Rng rng(77);
  const std::vector<VerificationReport> all = verify_all(random_cubic_psi(2, rng), small_options(2, 10));
  ASSERT_EQ(all.size(), 4u);
  for (const VerificationReport& r : all) EXPECT_NE(r.status, Status::Fail) << r.property;
  EXPECT_THROW(verify_property("nonsense", MetricSpec::flat(1, 1), small_options()), InputError);
}
