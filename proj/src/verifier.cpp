#include "nilcurv/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "nilcurv/errors.hpp"
#include "nilcurv/json_io.hpp"
#include "nilcurv/operators.hpp"
#include "nilcurv/spectral.hpp"

namespace nilcurv {

namespace {

using Index = Eigen::Index;

Index ix(std::size_t i) { return static_cast<Index>(i); }

constexpr std::size_t kMaxFailWitnesses = 5;

VerificationReport start(const std::string& property, const MetricSpec& spec, const VerifyOptions& opt) {
  VerificationReport r;
  r.property = property;
  r.spec_digest = spec_digest(spec);
  r.seed = opt.seed;
  r.tolerances = opt.tol;
  return r;
}

/// Point k and the stream that samples at it.
struct PointStream {
  PointChart point;
  Rng rng;
};

PointStream point_stream(std::size_t n, const VerifyOptions& opt, std::size_t k) {
  Rng rng = Rng::derive(opt.seed, k);
  PointChart P{Vector(ix(n))};
  for (std::size_t i = 0; i < n; ++i) P.coords(ix(i)) = rng.uniform(-1.0, 1.0);
  return {std::move(P), std::move(rng)};
}

double square_defect(const Matrix& M) {
  const double nrm = M.cwiseAbs().maxCoeff();
  return (M * M).cwiseAbs().maxCoeff() / (1.0 + nrm * nrm);
}

bool spectrum_is_zero(const Matrix& M, double tol) {
  for (const Complex& z : spectrum(M, tol)) {
    if (z != Complex(0.0, 0.0)) return false;
  }
  return true;
}

bool sign_attainable(const Signature& sig, int sign) {
  return sign > 0 ? sig.positive >= 1 : sig.negative >= 1;
}

bool plane_attainable(const Signature& sig, PlaneType t) {
  switch (t) {
    case PlaneType::Spacelike: return sig.positive >= 2;
    case PlaneType::Timelike: return sig.negative >= 2;
    case PlaneType::Mixed: return sig.positive >= 1 && sig.negative >= 1;
    case PlaneType::Degenerate: return false;
  }
  return false;
}

const char* sign_name(int sign) { return sign > 0 ? "spacelike" : "timelike"; }

Json witness(const PointChart& P, const char* key, Json arg, Json measured) {
  Json w{{"point", to_json(P)}, {"measured", std::move(measured)}};
  w[key] = std::move(arg);
  return w;
}

/// Unit vector with X-part x and a single solved y-component.
Vector lift_unit(const MetricAtPoint& gp, std::size_t p, const Vector& x, int sign) {
  Vector Z = Vector::Zero(ix(gp.dimension()));
  Z.head(ix(p)) = x;
  Index best = 0;
  x.cwiseAbs().maxCoeff(&best);
  const double q = inner(gp, Z, Z);
  Z(ix(p) + best) = (sign - q) / (2.0 * x(best));
  return Z;
}

/// X in R^p with L(X, X) = 0, scaled to max-norm 1.
std::optional<Vector> null_cone_x(const Matrix& L, Rng& rng) {
  const Index p = L.rows();
  for (int attempt = 0; attempt < 100; ++attempt) {
    Vector X(p), D(p);
    for (Index i = 0; i < p; ++i) X(i) = rng.uniform(-1.0, 1.0);
    for (Index i = 0; i < p; ++i) D(i) = rng.uniform(-1.0, 1.0);
    const double a = D.dot(L * D), b = X.dot(L * D), c = X.dot(L * X);
    const double disc = b * b - a * c;
    if (disc < 0.0 || std::abs(a) < 1e-3) continue;
    const double root = rng.uniform(0.0, 1.0) < 0.5 ? -std::sqrt(disc) : std::sqrt(disc);
    const Vector Y = X + ((-b + root) / a) * D;
    const double m = Y.cwiseAbs().maxCoeff();
    if (m < 1e-3) continue;
    return Vector(Y / m);
  }
  return std::nullopt;
}

enum class Branch { Generic, Null, Ambiguous };

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::Generic: return "generic";
    case Branch::Null: return "null";
    case Branch::Ambiguous: return "ambiguous";
  }
  return "";
}

Branch classify_branch(const Matrix& L, const Vector& x, double rank_tol, double* lxx_out) {
  const double lxx = x.dot(L * x);
  const double scale = L.cwiseAbs().maxCoeff() * x.squaredNorm();
  *lxx_out = lxx;
  if (std::abs(lxx) <= 1e-3 * rank_tol * scale) return Branch::Null;
  if (std::abs(lxx) >= 1e2 * rank_tol * scale) return Branch::Generic;
  return Branch::Ambiguous;
}

/// Unit vectors for the gradient rank checks: uniform draws, and for
/// indefinite L every other draw is placed on the L-null cone so that both
/// branches are exercised.
Vector gradient_sample(const MetricSpec& spec, const MetricAtPoint& gp, const SecondForm& L,
                       int sign, std::size_t k, Rng& rng) {
  if (L.classification == Definiteness::Indefinite && k % 2 == 1) {
    if (const auto x = null_cone_x(L.L, rng)) return lift_unit(gp, spec.p(), *x, sign);
  }
  return sample_unit(spec, gp, sign, rng);
}

const Polynomial& potential_of(const MetricSpec& spec) {
  return spec.family() == Family::Product ? spec.base().potential() : spec.potential();
}

std::string partition_string(const std::vector<int>& part) {
  std::string s = "{";
  for (std::size_t i = 0; i < part.size(); ++i) s += (i ? "," : "") + std::to_string(part[i]);
  return s + "}";
}

std::string definiteness_name(Definiteness d) {
  switch (d) {
    case Definiteness::PositiveDefinite: return "positive definite";
    case Definiteness::NegativeDefinite: return "negative definite";
    case Definiteness::Indefinite: return "indefinite";
    case Definiteness::Degenerate: return "degenerate";
  }
  return "";
}

Json ranks_json(const std::map<int, std::size_t>& tally) {
  Json out = Json::object();
  for (const auto& [rank, count] : tally) out[std::to_string(rank)] = count;
  return out;
}

}  // namespace

int expected_jacobi_rank(std::size_t p, bool null_branch) {
  if (p == 0) return 0;
  return null_branch ? 1 : static_cast<int>(p) - 1;
}

SignPattern expected_jordan_osserman(std::size_t p, Definiteness L) {
  const bool constant = p <= 2 || L == Definiteness::PositiveDefinite ||
                        L == Definiteness::NegativeDefinite;
  return {constant, constant};
}

ProductExpectation expected_product(std::size_t p, std::size_t a, std::size_t b) {
  const int j = static_cast<int>(p) - 1;
  ProductExpectation e;
  e.jacobi = {b == 0, a == 0};
  e.skew = {b == 0, a == 0};
  e.jacobi_spacelike_ranks = b == 0 ? std::vector<int>{j} : std::vector<int>{0, j};
  e.jacobi_timelike_ranks = a == 0 ? std::vector<int>{j} : std::vector<int>{0, j};
  e.skew_spacelike_ranks = b == 0 ? std::vector<int>{2} : std::vector<int>{0, 2};
  e.skew_timelike_ranks = a == 0 ? std::vector<int>{2} : std::vector<int>{0, 2};
  return e;
}

CurvatureRoute preferred_route(const MetricSpec& spec) {
  const Family core = spec.core_family();
  return core == Family::Psi || core == Family::Gradient ? CurvatureRoute::ClosedPsi
                                                         : CurvatureRoute::General;
}

VerificationReport verify_trinity_nilpotent(const MetricSpec& spec, const VerifyOptions& opt) {
  VerificationReport rep = start("trinity", spec, opt);
  const CurvatureEngine eng(spec);
  const std::size_t n = spec.dimension();
  const Signature sig = spec.expected_signature();
  const double tol = opt.tol.zero;

  struct Worst {
    double defect = -1.0;
    Json witness;
  };
  std::map<std::string, Worst> worst;
  std::map<std::string, std::size_t> failures;
  std::size_t vectors = 0, planes = 0;

  const auto check = [&](const std::string& kind, const Matrix& M, const PointChart& P,
                         const char* key, const Json& arg) {
    const double defect = square_defect(M);
    const bool zero_spec = spectrum_is_zero(M, opt.tol.rank);
    const bool ok = defect <= tol && zero_spec;
    Worst& w = worst[kind];
    const auto make = [&] {
      return witness(P, key, arg,
                     {{"operator", kind},
                      {"square_defect", defect},
                      {"spectrum_zero", zero_spec},
                      {"norm", M.cwiseAbs().maxCoeff()}});
    };
    if (!ok) {
      if (failures[kind]++ < kMaxFailWitnesses) rep.witnesses.push_back(make());
    } else if (defect > w.defect) {
      w.defect = defect;
      w.witness = make();
    }
  };

  for (std::size_t k = 0; k < opt.points; ++k) {
    PointStream ps = point_stream(n, opt, k);
    const MetricAtPoint gp = metric_at(spec, ps.point);
    const CurvatureData curv = eng.curvature(ps.point, preferred_route(spec), true);
    for (const int sign : {1, -1}) {
      if (!sign_attainable(sig, sign)) continue;
      for (std::size_t s = 0; s < opt.samples; ++s) {
        const Vector Z = sample_unit(spec, gp, sign, ps.rng);
        ++vectors;
        check("jacobi", jacobi_op(curv, gp, Z).mat, ps.point, "vector", to_json(Z));
        check("szabo", szabo_op(*curv.nabla_R, gp, Z, ps.point).mat, ps.point, "vector", to_json(Z));
      }
    }
    for (const PlaneType t : {PlaneType::Spacelike, PlaneType::Timelike, PlaneType::Mixed}) {
      if (!plane_attainable(sig, t)) continue;
      for (std::size_t s = 0; s < opt.samples; ++s) {
        const PlaneSpec pl = sample_plane(spec, gp, t, ps.rng);
        ++planes;
        check("skew_curvature", skew_op(curv, gp, pl).mat, ps.point, "plane", to_json(pl));
      }
    }
  }

  std::size_t total_failures = 0;
  for (const auto& [kind, count] : failures) total_failures += count;
  if (total_failures == 0) {
    for (auto& [kind, w] : worst) {
      if (w.defect >= 0.0) rep.witnesses.push_back(std::move(w.witness));
    }
    rep.notes.push_back("witnesses are the largest square defects observed");
  }
  rep.status = total_failures == 0 ? Status::Pass : Status::Fail;
  rep.samples = {{"points", opt.points}, {"unit_vectors", vectors}, {"planes", planes},
                 {"failures", failures}};
  return rep;
}

VerificationReport verify_ricci_flat(const MetricSpec& spec, const VerifyOptions& opt) {
  VerificationReport rep = start("ricci-flat", spec, opt);
  const CurvatureEngine eng(spec);
  double worst = -1.0;
  Json w;
  for (std::size_t k = 0; k < opt.points; ++k) {
    const PointStream ps = point_stream(spec.dimension(), opt, k);
    const Matrix rho = eng.ricci(ps.point);
    const double m = rho.cwiseAbs().maxCoeff();
    if (m > worst) {
      worst = m;
      w = {{"point", to_json(ps.point)}, {"measured", {{"max_abs_ricci", m}, {"ricci", to_json(rho)}}}};
    }
  }
  if (worst >= 0.0) rep.witnesses.push_back(std::move(w));
  rep.notes.push_back("Ricci tensor from the general Christoffel route");
  rep.status = worst <= opt.tol.zero ? Status::Pass : Status::Fail;
  rep.samples = {{"points", opt.points}};
  return rep;
}

VerificationReport verify_rank_law_jacobi(const MetricSpec& spec, const VerifyOptions& opt) {
  if (spec.family() != Family::Gradient) throw InputError("rank-law: requires a gradient metric");
  VerificationReport rep = start("rank-law", spec, opt);
  const CurvatureEngine eng(spec);
  const std::size_t p = spec.p();
  // tallies[sign][branch][rank]
  std::map<std::string, std::map<std::string, std::map<int, std::size_t>>> tallies;
  std::map<std::string, std::set<int>> witnessed;
  std::size_t mismatches = 0, ambiguous = 0, skipped = 0, used = 0;

  for (std::size_t k = 0; k < opt.points; ++k) {
    PointStream ps = point_stream(spec.dimension(), opt, k);
    const SecondForm L = second_fundamental(spec.potential(), ps.point);
    if (!L.nondegenerate()) {
      ++skipped;
      rep.notes.push_back("point " + std::to_string(k) + " skipped: L is degenerate");
      continue;
    }
    ++used;
    const MetricAtPoint gp = metric_at(spec, ps.point);
    const CurvatureData curv = eng.curvature(ps.point, preferred_route(spec), false);
    for (const int sign : {1, -1}) {
      for (std::size_t s = 0; s < opt.samples; ++s) {
        const Vector Z = gradient_sample(spec, gp, L, sign, s, ps.rng);
        const Vector x = Z.head(ix(p));
        double lxx = 0.0;
        const Branch br = classify_branch(L.L, x, opt.tol.rank, &lxx);
        if (br == Branch::Ambiguous) {
          ++ambiguous;
          continue;
        }
        const int rank = numerical_rank(jacobi_op(curv, gp, Z).mat, opt.tol.rank);
        const int expected = expected_jacobi_rank(p, br == Branch::Null);
        ++tallies[sign_name(sign)][branch_name(br)][rank];
        const bool bad = rank != expected;
        const bool first = witnessed[sign_name(sign)].insert(rank).second;
        if (bad) ++mismatches;
        if ((bad && mismatches <= kMaxFailWitnesses) || first) {
          rep.witnesses.push_back(witness(ps.point, "vector", to_json(Z),
                                          {{"sign", sign_name(sign)},
                                           {"branch", branch_name(br)},
                                           {"L_xx", lxx},
                                           {"rank", rank},
                                           {"expected_rank", expected}}));
        }
      }
    }
  }

  Json counts = Json::object();
  for (const auto& [sign, by_branch] : tallies) {
    for (const auto& [br, by_rank] : by_branch) counts[sign][br] = ranks_json(by_rank);
  }
  rep.samples = {{"points", used}, {"skipped_points", skipped}, {"per_sign", opt.samples},
                 {"ranks", counts}, {"ambiguous", ambiguous}, {"mismatches", mismatches}};
  rep.notes.push_back("rank branch is decided by L(X,X) on the X-part of Z: rank p-1 when L(X,X) != 0, "
                      "rank 1 when L(X,X) = 0 (the condition is on L, not on (X,X))");
  rep.status = mismatches == 0 && used > 0 ? Status::Pass : Status::Fail;
  if (used == 0) rep.notes.push_back("no point with nondegenerate L");
  return rep;
}

VerificationReport verify_jordan_osserman_class(const MetricSpec& spec, const VerifyOptions& opt) {
  if (spec.family() != Family::Gradient) throw InputError("jordan-osserman: requires a gradient metric");
  VerificationReport rep = start("jordan-osserman", spec, opt);
  const CurvatureEngine eng(spec);
  const std::size_t p = spec.p();
  std::size_t mismatched_points = 0, used = 0;
  Json per_point = Json::array();

  for (std::size_t k = 0; k < opt.points; ++k) {
    PointStream ps = point_stream(spec.dimension(), opt, k);
    const SecondForm L = second_fundamental(spec.potential(), ps.point);
    if (!L.nondegenerate()) {
      rep.notes.push_back("point " + std::to_string(k) + " skipped: L is degenerate");
      continue;
    }
    ++used;
    const MetricAtPoint gp = metric_at(spec, ps.point);
    const CurvatureData curv = eng.curvature(ps.point, preferred_route(spec), false);
    const SignPattern expected = expected_jordan_osserman(p, L.classification);
    Json summary{{"point_index", k}, {"L", definiteness_name(L.classification)}};
    bool point_ok = true;
    for (const int sign : {1, -1}) {
      std::map<std::vector<int>, Vector> seen;
      bool non_nilpotent = false;
      for (std::size_t s = 0; s < opt.samples; ++s) {
        const Vector Z = gradient_sample(spec, gp, L, sign, s, ps.rng);
        const JordanProfile jp = jordan_profile(jacobi_op(curv, gp, Z).mat, opt.tol.rank);
        for (const Complex& z : jp.eigenvalues) non_nilpotent |= z != Complex(0.0, 0.0);
        seen.emplace(jp.nilpotent_partition, Z);
      }
      const bool constant = seen.size() == 1 && !non_nilpotent;
      const bool want = sign > 0 ? expected.spacelike_constant : expected.timelike_constant;
      Json profiles = Json::array();
      for (const auto& [part, Z] : seen) profiles.push_back(partition_string(part));
      summary[sign_name(sign)] = {{"constant", constant}, {"expected_constant", want}, {"profiles", profiles}};
      if (constant != want) point_ok = false;
      if (k == 0 || constant != want) {
        for (const auto& [part, Z] : seen) {
          rep.witnesses.push_back(witness(ps.point, "vector", to_json(Z),
                                          {{"sign", sign_name(sign)}, {"profile", partition_string(part)}}));
        }
      }
    }
    if (!point_ok) ++mismatched_points;
    per_point.push_back(std::move(summary));
  }
  rep.samples = {{"points", used}, {"per_sign", opt.samples}, {"observed", per_point}};
  rep.status = mismatched_points == 0 && used > 0 ? Status::Pass : Status::Fail;
  return rep;
}

VerificationReport verify_ip_class(const MetricSpec& spec, const VerifyOptions& opt) {
  const bool gradient = spec.family() == Family::Gradient;
  if (!gradient && spec.family() != Family::Psi) throw InputError("ip: requires a psi or gradient metric");
  VerificationReport rep = start("ip", spec, opt);
  const CurvatureEngine eng(spec);
  const std::size_t p = spec.p();
  const Signature sig = spec.expected_signature();

  if (!gradient) {
    // nilpotent IP only
    std::size_t planes = 0, failures = 0;
    for (std::size_t k = 0; k < opt.points; ++k) {
      PointStream ps = point_stream(spec.dimension(), opt, k);
      const MetricAtPoint gp = metric_at(spec, ps.point);
      const CurvatureData curv = eng.curvature(ps.point, preferred_route(spec), false);
      for (const PlaneType t : {PlaneType::Spacelike, PlaneType::Timelike, PlaneType::Mixed}) {
        if (!plane_attainable(sig, t)) continue;
        for (std::size_t s = 0; s < opt.samples; ++s) {
          const PlaneSpec pl = sample_plane(spec, gp, t, ps.rng);
          const Matrix M = skew_op(curv, gp, pl).mat;
          ++planes;
          const double defect = square_defect(M);
          const bool zero_spec = spectrum_is_zero(M, opt.tol.rank);
          if ((defect > opt.tol.zero || !zero_spec) && failures++ < kMaxFailWitnesses) {
            rep.witnesses.push_back(witness(ps.point, "plane", to_json(pl),
                                            {{"square_defect", defect}, {"spectrum_zero", zero_spec}}));
          }
        }
      }
    }
    rep.notes.push_back("psi metric: only the nilpotent IP property is checked");
    rep.samples = {{"points", opt.points}, {"planes", planes}, {"failures", failures}};
    rep.status = failures == 0 ? Status::Pass : Status::Fail;
    return rep;
  }

  std::map<std::string, std::map<int, std::size_t>> tallies;
  std::size_t mismatches = 0, used = 0;
  std::optional<std::size_t> first_point;
  for (std::size_t k = 0; k < opt.points; ++k) {
    PointStream ps = point_stream(spec.dimension(), opt, k);
    const SecondForm L = second_fundamental(spec.potential(), ps.point);
    if (!L.nondegenerate()) {
      rep.notes.push_back("point " + std::to_string(k) + " skipped: L is degenerate");
      continue;
    }
    ++used;
    if (!first_point) first_point = k;
    const MetricAtPoint gp = metric_at(spec, ps.point);
    const CurvatureData curv = eng.curvature(ps.point, preferred_route(spec), false);
    for (const PlaneType t : {PlaneType::Spacelike, PlaneType::Timelike}) {
      if (!plane_attainable(sig, t)) continue;
      for (std::size_t s = 0; s < opt.samples; ++s) {
        const PlaneSpec pl = sample_plane(spec, gp, t, ps.rng);
        const int rank = numerical_rank(skew_op(curv, gp, pl).mat, opt.tol.rank);
        ++tallies[plane_type_name(t)][rank];
        if (rank != 2 && mismatches++ < kMaxFailWitnesses) {
          rep.witnesses.push_back(witness(ps.point, "plane", to_json(pl), {{"rank", rank}, {"expected_rank", 2}}));
        }
      }
    }
  }

  bool counterexample_ok = false;
  if (p >= 2 && first_point) {
    const PointStream ps = point_stream(spec.dimension(), opt, *first_point);
    const MetricAtPoint gp = metric_at(spec, ps.point);
    const CurvatureData curv = eng.curvature(ps.point, preferred_route(spec), false);
    const std::size_t n = spec.dimension();
    const Vector x1 = basis_vector(n, 0), x2 = basis_vector(n, 1);
    const Vector y1 = basis_vector(n, p), y2 = basis_vector(n, p + 1);

    const PlaneSpec pi1 = make_plane(gp, y1, x1);
    const Matrix R1 = skew_op(curv, gp, pi1).mat;
    const double norm1 = R1.cwiseAbs().maxCoeff();
    const bool pi1_ok = pi1.type == PlaneType::Mixed && norm1 <= opt.tol.zero;
    rep.witnesses.push_back(witness(ps.point, "plane", to_json(pi1),
                                    {{"label", "pi_1"},
                                     {"gram_det", pi1.gram.determinant()},
                                     {"max_abs", norm1},
                                     {"rank", numerical_rank(R1, opt.tol.rank)}}));
    counterexample_ok = pi1_ok;
    for (const double eps0 : {0.1, 0.05}) {
      double eps = eps0;
      PlaneSpec pi2;
      for (int halvings = 0;; ++halvings) {
        pi2 = make_plane(gp, (1.0 / eps) * y1 + eps * x1, (-1.0 / eps) * y2 + eps * x2);
        if (pi2.type == PlaneType::Mixed || halvings == 20) break;
        rep.notes.push_back("pi_2(" + std::to_string(eps) + ") is not mixed; halving epsilon");
        eps /= 2.0;
      }
      const Matrix R2 = skew_op(curv, gp, pi2).mat;
      const int rank2 = numerical_rank(R2, opt.tol.rank);
      const bool equivalent = jordan_equivalent(R1, R2, opt.tol.rank);
      const bool ok = pi2.type == PlaneType::Mixed && rank2 == 2 && !equivalent;
      counterexample_ok = counterexample_ok && ok;
      rep.witnesses.push_back(witness(ps.point, "plane", to_json(pi2),
                                      {{"label", "pi_2"},
                                       {"epsilon", eps},
                                       {"gram_det", pi2.gram.determinant()},
                                       {"rank", rank2},
                                       {"jordan_equivalent_to_pi_1", equivalent}}));
    }
    rep.notes.push_back("pi_1 and pi_2 are mixed planes with Jordan-inequivalent skew curvature operators, "
                        "so the metric is not mixed Jordan IP");
  } else {
    rep.notes.push_back("mixed counterexample needs p >= 2 and a point with nondegenerate L; not run");
    counterexample_ok = p < 2 && used > 0;
  }

  Json counts = Json::object();
  for (const auto& [type, by_rank] : tallies) counts[type] = ranks_json(by_rank);
  rep.samples = {{"points", used}, {"per_type", opt.samples}, {"ranks", counts}, {"mismatches", mismatches}};
  rep.status = mismatches == 0 && used > 0 && counterexample_ok ? Status::Pass : Status::Fail;
  return rep;
}

namespace {

/// Product of the r eigenvalues of largest modulus of the lowered Szabo
/// form; vanishes where rank drops below r.
double szabo_rank_function(const NablaRiemann& nR, const Vector& Z, int r) {
  const Matrix M = szabo_form(nR, Z);
  const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
  double prod = 1.0;
  for (int i = 0; i < r && i < static_cast<int>(ev.size()); ++i) prod *= ev[static_cast<std::size_t>(i)];
  return prod;
}

struct SzaboSearch {
  std::map<int, Vector> by_rank;
  std::size_t evaluations = 0;
  std::size_t random_draws = 0;
  std::size_t bisection_steps = 0;
};

SzaboSearch search_szabo_ranks(const MetricSpec& spec, const MetricAtPoint& gp, const NablaRiemann& nR,
                               int sign, std::size_t budget, double rank_tol, Rng& rng) {
  SzaboSearch out;
  const std::size_t p = spec.p();
  const std::size_t n = spec.dimension();
  const auto rank_of = [&](const Vector& Z) {
    ++out.evaluations;
    return numerical_rank(szabo_op(nR, gp, Z).mat, rank_tol);
  };
  const auto x_vector = [&](const Vector& x) {
    Vector Z = Vector::Zero(ix(n));
    Z.head(ix(p)) = x / x.norm();
    return Z;
  };

  std::vector<Vector> xs;
  const std::size_t phase1 = std::min<std::size_t>(budget, std::max<std::size_t>(10, budget / 10));
  while (out.evaluations < phase1) {
    const Vector Z = sample_unit(spec, gp, sign, rng);
    ++out.random_draws;
    out.by_rank.emplace(rank_of(Z), Z);
    if (out.by_rank.size() >= 2) return out;
    xs.push_back(Z.head(ix(p)));
  }
  const int r = out.by_rank.rbegin()->first;
  if (r == 0 || p == 0) return out;

  // sign changes of the rank function along segments between samples
  std::vector<double> hs;
  for (const Vector& x : xs) hs.push_back(szabo_rank_function(nR, x_vector(x), r));
  std::size_t next_pair = 1;
  while (out.evaluations < budget) {
    std::optional<std::pair<std::size_t, std::size_t>> pair;
    for (; next_pair < xs.size() && !pair; ++next_pair) {
      for (std::size_t j = 0; j < next_pair; ++j) {
        if (hs[j] * hs[next_pair] < 0.0) {
          pair = std::make_pair(j, next_pair);
          break;
        }
      }
    }
    if (!pair) {
      const Vector Z = sample_unit(spec, gp, sign, rng);
      ++out.random_draws;
      out.by_rank.emplace(rank_of(Z), Z);
      if (out.by_rank.size() >= 2) return out;
      xs.push_back(Z.head(ix(p)));
      hs.push_back(szabo_rank_function(nR, x_vector(xs.back()), r));
      continue;
    }
    Vector a = xs[pair->first] / xs[pair->first].norm();
    Vector b = xs[pair->second] / xs[pair->second].norm();
    double ha = hs[pair->first];
    double hb = hs[pair->second];
    for (int it = 0; it < 200 && out.evaluations < budget; ++it) {
      const Vector m = 0.5 * (a + b);
      const double hm = szabo_rank_function(nR, x_vector(m), r);
      ++out.evaluations;
      ++out.bisection_steps;
      if (hm == 0.0) {
        a = b = m;
        ha = hb = 0.0;
        break;
      }
      if ((hm < 0.0) == (ha < 0.0)) {
        a = m;
        ha = hm;
      } else {
        b = m;
        hb = hm;
      }
      if ((a - b).norm() <= 1e-15 * a.norm()) break;
    }
    if (out.evaluations >= budget) break;
    const Vector root = std::abs(ha) <= std::abs(hb) ? a : b;
    const Vector Z = lift_unit(gp, p, root / root.cwiseAbs().maxCoeff(), sign);
    out.by_rank.emplace(rank_of(Z), Z);
    if (out.by_rank.size() >= 2) return out;
  }
  return out;
}

}  // namespace

VerificationReport refute_jordan_szabo(const MetricSpec& spec, const std::optional<PointChart>& point,
                                       const VerifyOptions& opt) {
  const Family core = spec.core_family();
  if (core != Family::Psi && core != Family::Gradient) {
    throw InputError("szabo: requires a psi or gradient metric");
  }
  VerificationReport rep = start("szabo", spec, opt);
  const CurvatureEngine eng(spec);
  const std::size_t n = spec.dimension();

  std::vector<PointChart> candidates;
  if (point) {
    if (static_cast<std::size_t>(point->size()) != n) throw InputError("szabo: point has wrong length");
    candidates.push_back(*point);
  } else {
    candidates.push_back(PointChart{Vector::Zero(ix(n))});
    for (std::size_t k = 0; k < opt.points; ++k) candidates.push_back(point_stream(n, opt, k).point);
  }

  std::optional<PointChart> P;
  NablaRiemann nR;
  for (const PointChart& c : candidates) {
    NablaRiemann t = eng.nabla_riemann(c, preferred_route(spec));
    if (t.max_abs() > opt.tol.zero) {
      P = c;
      nR = std::move(t);
      break;
    }
  }
  if (!P) {
    rep.status = Status::Pass;
    rep.notes.push_back("locally symmetric at P (nabla R = 0), rank variation statement is vacuous");
    rep.samples = {{"points_tried", candidates.size()}};
    return rep;
  }
  if (spec.family() == Family::Gradient) {
    const SecondForm L = second_fundamental(spec.potential(), *P);
    rep.notes.push_back("L at P is " + definiteness_name(L.classification));
  }

  const MetricAtPoint gp = metric_at(spec, *P);
  const Signature sig = spec.expected_signature();
  Rng rng = Rng::derive(opt.seed, 0x5a4b0ULL);
  bool all_found = true;
  Json counts = Json::object();
  for (const int sign : {1, -1}) {
    if (!sign_attainable(sig, sign)) continue;
    const SzaboSearch found = search_szabo_ranks(spec, gp, nR, sign, opt.samples, opt.tol.rank, rng);
    counts[sign_name(sign)] = {{"evaluations", found.evaluations},
                               {"random_draws", found.random_draws},
                               {"bisection_steps", found.bisection_steps},
                               {"distinct_ranks", found.by_rank.size()}};
    for (const auto& [rank, Z] : found.by_rank) {
      rep.witnesses.push_back(witness(*P, "vector", to_json(Z),
                                      {{"sign", sign_name(sign)},
                                       {"rank", rank},
                                       {"norm_squared", inner(gp, Z, Z)}}));
    }
    if (found.by_rank.size() < 2) {
      all_found = false;
      rep.notes.push_back(std::string("no Szabo rank variation found on ") + sign_name(sign) +
                          " unit vectors within the sample budget");
    }
  }
  rep.samples = {{"budget_per_sign", opt.samples}, {"search", counts}};
  rep.notes.push_back("unit vectors are drawn at random; when all draws share one rank the search bisects "
                      "the product of the leading Szabo eigenvalues between draws of opposite sign");
  rep.status = all_found ? Status::RefutedAsExpected : Status::Fail;
  return rep;
}

VerificationReport verify_product_theorem(const MetricSpec& spec, const VerifyOptions& opt) {
  if (spec.family() != Family::Product || spec.base().family() != Family::Gradient) {
    throw InputError("product: requires a product over a gradient base");
  }
  const std::size_t p = spec.p();
  if (p < 2) throw InputError("product: base needs p >= 2");
  VerificationReport rep = start("product", spec, opt);
  const CurvatureEngine eng(spec);
  const std::size_t a = spec.flat_negative(), b = spec.flat_positive();
  const std::size_t n = spec.dimension(), bn = spec.base_dimension();
  const ProductExpectation exp = expected_product(p, a, b);

  SlotSet base_slots, flat_slots;
  for (std::size_t i = 0; i < bn; ++i) base_slots.push_back(i);
  for (std::size_t i = bn; i < n; ++i) flat_slots.push_back(i);
  const auto flat_count = [&](int sign) { return sign > 0 ? b : a; };

  // observed[operator][sign] = rank -> first witness
  std::map<std::string, std::map<std::string, std::map<int, Json>>> observed;
  std::map<std::string, std::map<std::string, std::map<int, std::size_t>>> tallies;
  std::size_t used = 0;

  for (std::size_t k = 0; k < opt.points; ++k) {
    PointStream ps = point_stream(n, opt, k);
    const SecondForm L = second_fundamental(potential_of(spec), ps.point);
    if (L.classification != Definiteness::PositiveDefinite) {
      rep.notes.push_back("point " + std::to_string(k) + " skipped: L is not positive definite");
      continue;
    }
    ++used;
    const MetricAtPoint gp = metric_at(spec, ps.point);
    const CurvatureData curv = eng.curvature(ps.point, preferred_route(spec), false);

    for (const int sign : {1, -1}) {
      std::vector<std::pair<std::string, SlotSet>> strata{{"full", {}}, {"base", base_slots}};
      if (flat_count(sign) >= 1) strata.emplace_back("flat", flat_slots);
      for (std::size_t s = 0; s < opt.samples; ++s) {
        const auto& [name, slots] = strata[s % strata.size()];
        const Vector Z = sample_unit(spec, gp, sign, ps.rng, slots);
        const int rank = numerical_rank(jacobi_op(curv, gp, Z).mat, opt.tol.rank);
        ++tallies["jacobi"][sign_name(sign)][rank];
        observed["jacobi"][sign_name(sign)].emplace(
            rank, witness(ps.point, "vector", to_json(Z),
                          {{"operator", "jacobi"}, {"sign", sign_name(sign)}, {"stratum", name}, {"rank", rank}}));
      }

      const PlaneType t = sign > 0 ? PlaneType::Spacelike : PlaneType::Timelike;
      std::vector<std::tuple<std::string, SlotSet, SlotSet>> pstrata{{"full,full", {}, {}},
                                                                     {"base,base", base_slots, base_slots}};
      if (flat_count(sign) >= 1) pstrata.emplace_back("flat,base", flat_slots, base_slots);
      if (flat_count(sign) >= 2) pstrata.emplace_back("flat,flat", flat_slots, flat_slots);
      for (std::size_t s = 0; s < opt.samples; ++s) {
        const auto& [name, su, sv] = pstrata[s % pstrata.size()];
        const PlaneSpec pl = sample_plane(spec, gp, t, ps.rng, su, sv);
        const int rank = numerical_rank(skew_op(curv, gp, pl).mat, opt.tol.rank);
        ++tallies["skew_curvature"][sign_name(sign)][rank];
        observed["skew_curvature"][sign_name(sign)].emplace(
            rank, witness(ps.point, "plane", to_json(pl),
                          {{"operator", "skew_curvature"}, {"sign", sign_name(sign)}, {"stratum", name}, {"rank", rank}}));
      }
    }
  }

  bool ok = used > 0;
  Json table = Json::object();
  const auto judge = [&](const std::string& op, int sign, bool want_constant, const std::vector<int>& allowed) {
    const auto& seen = observed[op][sign_name(sign)];
    std::vector<int> ranks;
    for (const auto& [rank, w] : seen) ranks.push_back(rank);
    const bool constant = ranks.size() == 1;
    bool within = true;
    for (const int r : ranks) within &= std::find(allowed.begin(), allowed.end(), r) != allowed.end();
    const bool match = constant == want_constant && within;
    ok = ok && match;
    table[op][sign_name(sign)] = {{"observed_ranks", ranks}, {"allowed_ranks", allowed},
                                  {"constant", constant}, {"expected_constant", want_constant},
                                  {"match", match}};
    if (!constant || !match) {
      for (const auto& [rank, w] : seen) rep.witnesses.push_back(w);
    }
  };
  judge("jacobi", 1, exp.jacobi.spacelike_constant, exp.jacobi_spacelike_ranks);
  judge("jacobi", -1, exp.jacobi.timelike_constant, exp.jacobi_timelike_ranks);
  judge("skew_curvature", 1, exp.skew.spacelike_constant, exp.skew_spacelike_ranks);
  judge("skew_curvature", -1, exp.skew.timelike_constant, exp.skew_timelike_ranks);

  Json counts = Json::object();
  for (const auto& [op, by_sign] : tallies) {
    for (const auto& [sign, by_rank] : by_sign) counts[op][sign] = ranks_json(by_rank);
  }
  rep.samples = {{"points", used}, {"per_sign", opt.samples}, {"ranks", counts}, {"decision", table}};
  rep.notes.push_back("flat factor signature (" + std::to_string(a) + "," + std::to_string(b) +
                      "); product curvature is the base curvature on base components");
  rep.status = ok ? Status::Pass : Status::Fail;
  return rep;
}

VerificationReport check_local_symmetry(const MetricSpec& spec, const VerifyOptions& opt) {
  VerificationReport rep = start("local-symmetry", spec, opt);
  const CurvatureEngine eng(spec);
  const std::size_t n = spec.dimension();
  double worst = 0.0;
  Json w;
  for (std::size_t k = 0; k < opt.points; ++k) {
    const PointStream ps = point_stream(n, opt, k);
    const NablaRiemann nR = eng.nabla_riemann(ps.point, preferred_route(spec));
    const auto it = std::max_element(nR.data().begin(), nR.data().end(),
                                     [](double x, double y) { return std::abs(x) < std::abs(y); });
    if (it == nR.data().end() || std::abs(*it) <= worst) continue;
    worst = std::abs(*it);
    std::size_t flat = static_cast<std::size_t>(it - nR.data().begin());
    std::vector<std::size_t> idx(5);
    for (int d = 4; d >= 0; --d) {
      idx[static_cast<std::size_t>(d)] = flat % n;
      flat /= n;
    }
    w = {{"point", to_json(ps.point)},
         {"measured", {{"component", idx}, {"value", *it}, {"max_abs_nabla_R", worst}}}};
  }
  rep.samples = {{"points", opt.points}};
  if (worst <= opt.tol.zero) {
    rep.status = Status::Pass;
    rep.notes.push_back("locally symmetric (sampled): max |nabla R| = " + std::to_string(worst));
  } else {
    rep.status = Status::RefutedAsExpected;
    rep.witnesses.push_back(std::move(w));
    rep.notes.push_back("not locally symmetric: nabla R != 0 at the witness point "
                        "(component indices are 0-based chart slots, last index is the derivative)");
  }
  return rep;
}

Matrix affine_jacobi(const MetricSpec& spec, const Vector& x, const Vector& X) {
  if (spec.family() != Family::Affine) throw InputError("affine_jacobi: requires an affine metric");
  const std::size_t p = spec.p();
  if (static_cast<std::size_t>(x.size()) != p || static_cast<std::size_t>(X.size()) != p) {
    throw InputError("affine_jacobi: point and vector must have length p");
  }
  const std::span<const double> at(x.data(), p);
  CoordTensor<3> G(p);
  CoordTensor<4> dG(p);  // dG(m, i, j, k) = d_m Gamma_ij^k
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < p; ++k) {
        const Polynomial& g = spec.gamma(i, j, k);
        G(i, j, k) = g.eval(at);
        for (std::size_t m = 0; m < p; ++m) dG(m, i, j, k) = g.diff(m).eval(at);
      }
  // R^l_ijk = d_i G_jk^l - d_j G_ik^l + G_jk^m G_im^l - G_ik^m G_jm^l; J(X)^l_b = R^l_{b c d} X^c X^d
  Matrix J = Matrix::Zero(ix(p), ix(p));
  for (std::size_t l = 0; l < p; ++l) {
    for (std::size_t bb = 0; bb < p; ++bb) {
      double s = 0.0;
      for (std::size_t c = 0; c < p; ++c) {
        for (std::size_t d = 0; d < p; ++d) {
          const double w = X(ix(c)) * X(ix(d));
          if (w == 0.0) continue;
          double r = dG(bb, c, d, l) - dG(c, bb, d, l);
          for (std::size_t m = 0; m < p; ++m) r += G(c, d, m) * G(bb, m, l) - G(bb, d, m) * G(c, m, l);
          s += r * w;
        }
      }
      J(ix(l), ix(bb)) = s;
    }
  }
  return J;
}

VerificationReport verify_affine_link(const MetricSpec& spec, const VerifyOptions& opt) {
  if (spec.family() != Family::Affine) throw InputError("affine-link: requires an affine metric");
  VerificationReport rep = start("affine-link", spec, opt);
  const CurvatureEngine eng(spec);
  const std::size_t p = spec.p(), n = spec.dimension();
  std::size_t affine_samples = 0, metric_samples = 0;
  std::optional<Json> affine_bad, metric_bad;

  for (std::size_t k = 0; k < opt.points; ++k) {
    PointStream ps = point_stream(n, opt, k);
    const Vector x = ps.point.coords.head(ix(p));
    for (std::size_t s = 0; s < opt.samples; ++s) {
      Vector X(ix(p));
      for (std::size_t i = 0; i < p; ++i) X(ix(i)) = ps.rng.uniform(-1.0, 1.0);
      const Matrix J = affine_jacobi(spec, x, X);
      ++affine_samples;
      if (!affine_bad && !spectrum_is_zero(J, opt.tol.rank)) {
        affine_bad = Json{{"point", to_json(x)},
                          {"vector", to_json(X)},
                          {"measured", {{"side", "affine"}, {"operator", to_json(J)}}}};
      }
    }
    const MetricAtPoint gp = metric_at(spec, ps.point);
    const CurvatureData curv = eng.curvature(ps.point, CurvatureRoute::General, false);
    for (const int sign : {1, -1}) {
      for (std::size_t s = 0; s < opt.samples; ++s) {
        const Vector Z = sample_unit(spec, gp, sign, ps.rng);
        const Matrix J = jacobi_op(curv, gp, Z).mat;
        ++metric_samples;
        if (!metric_bad && !spectrum_is_zero(J, opt.tol.rank)) {
          metric_bad = witness(ps.point, "vector", to_json(Z),
                               {{"side", "metric"}, {"sign", sign_name(sign)}, {"square_defect", square_defect(J)}});
        }
      }
    }
  }
  const bool affine_nilpotent = !affine_bad;
  const bool metric_nilpotent = !metric_bad;
  if (affine_bad) rep.witnesses.push_back(*affine_bad);
  if (metric_bad) rep.witnesses.push_back(*metric_bad);
  rep.samples = {{"points", opt.points},
                 {"affine_vectors", affine_samples},
                 {"metric_unit_vectors", metric_samples},
                 {"affine_nilpotent", affine_nilpotent},
                 {"metric_nilpotent", metric_nilpotent}};
  rep.notes.push_back(std::string("affine side: ") + (affine_nilpotent ? "nilpotent" : "not nilpotent") +
                      "; metric side: " + (metric_nilpotent ? "nilpotent" : "not nilpotent"));
  rep.status = affine_nilpotent == metric_nilpotent ? Status::Pass : Status::Fail;
  return rep;
}

const std::vector<std::string>& property_names() {
  static const std::vector<std::string> names{"trinity", "ricci-flat", "rank-law", "jordan-osserman", "ip",
                                              "szabo", "product", "local-symmetry", "affine-link"};
  return names;
}

std::vector<std::string> applicable_properties(const MetricSpec& spec) {
  switch (spec.family()) {
    case Family::Psi: return {"trinity", "ricci-flat", "ip", "local-symmetry"};
    case Family::Gradient:
      return {"trinity", "ricci-flat", "rank-law", "jordan-osserman", "ip", "szabo", "local-symmetry"};
    case Family::Product:
      if (spec.base().family() == Family::Gradient && spec.p() >= 2) {
        return {"trinity", "ricci-flat", "product", "local-symmetry"};
      }
      return {"trinity", "ricci-flat", "local-symmetry"};
    case Family::Affine: return {"affine-link", "local-symmetry"};
    case Family::Flat: return {"trinity", "ricci-flat", "local-symmetry"};
  }
  return {};
}

VerificationReport verify_property(const std::string& name, const MetricSpec& spec, const VerifyOptions& opt,
                                   const std::optional<PointChart>& point) {
  if (name == "trinity") return verify_trinity_nilpotent(spec, opt);
  if (name == "ricci-flat") return verify_ricci_flat(spec, opt);
  if (name == "rank-law") return verify_rank_law_jacobi(spec, opt);
  if (name == "jordan-osserman") return verify_jordan_osserman_class(spec, opt);
  if (name == "ip") return verify_ip_class(spec, opt);
  if (name == "szabo") return refute_jordan_szabo(spec, point, opt);
  if (name == "product") return verify_product_theorem(spec, opt);
  if (name == "local-symmetry") return check_local_symmetry(spec, opt);
  if (name == "affine-link") return verify_affine_link(spec, opt);
  throw InputError("unknown property '" + name + "'");
}

std::vector<VerificationReport> verify_all(const MetricSpec& spec, const VerifyOptions& opt,
                                           const std::optional<PointChart>& point) {
  std::vector<VerificationReport> out;
  for (const std::string& name : applicable_properties(spec)) out.push_back(verify_property(name, spec, opt, point));
  return out;
}

}  // namespace nilcurv
