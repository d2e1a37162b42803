#include "nilcurv/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "nilcurv/errors.hpp"
#include "nilcurv/json_io.hpp"
#include "nilcurv/operators.hpp"
#include "nilcurv/spectral.hpp"
#include "nilcurv/verifier.hpp"

namespace nilcurv::cli {

namespace {

using Index = Eigen::Index;

struct RunConfig {
  std::string metric;
  std::string subcommand;
  std::string point;
  std::string vector;
  std::string plane;
  std::string property;
  std::string route = "general";
  std::string op = "jacobi";
  std::string domain = "spacelike";
  std::size_t samples = 100;
  std::size_t points = 10;
  std::uint64_t seed = 0;
  double rank_tol = 1e-8;
  double zero_tol = 1e-10;
  std::string out;
  std::string format = "json";
  bool timing = false;

  Json to_json() const {
    Json j{{"subcommand", subcommand}, {"metric", metric},   {"samples", samples},
           {"points", points},         {"seed", seed},       {"rank_tol", rank_tol},
           {"zero_tol", zero_tol},     {"format", format}};
    if (!point.empty()) j["point"] = point;
    if (!vector.empty()) j["vector"] = vector;
    if (!plane.empty()) j["plane"] = plane;
    if (subcommand == "verify") j["property"] = property;
    if (subcommand == "curvature") j["route"] = route;
    if (subcommand == "jordan") j["operator"] = op;
    if (subcommand == "sample") j["domain"] = domain;
    return j;
  }
};

Vector parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InputError(what + ": '" + item + "' is not a number");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(v)) {
      throw InputError(what + ": '" + item + "' is not a finite number");
    }
    values.push_back(v);
  }
  if (values.empty()) throw InputError(what + ": empty list");
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

Vector parse_sized(const std::string& text, std::size_t n, const std::string& what) {
  const Vector v = parse_numbers(text, what);
  if (static_cast<std::size_t>(v.size()) != n) {
    throw InputError(what + ": expected " + std::to_string(n) + " components, got " + std::to_string(v.size()));
  }
  return v;
}

PointChart point_of(const RunConfig& cfg, const MetricSpec& spec) {
  if (cfg.point.empty()) return PointChart{Vector::Zero(static_cast<Index>(spec.dimension()))};
  return PointChart{parse_sized(cfg.point, spec.dimension(), "--point")};
}

Vector vector_of(const RunConfig& cfg, const MetricSpec& spec) {
  if (cfg.vector.empty()) throw InputError("--vector is required");
  return parse_sized(cfg.vector, spec.dimension(), "--vector");
}

std::pair<Vector, Vector> plane_of(const RunConfig& cfg, const MetricSpec& spec) {
  const auto semi = cfg.plane.find(';');
  if (cfg.plane.empty() || semi == std::string::npos) throw InputError("--plane must be 'u;v'");
  return {parse_sized(cfg.plane.substr(0, semi), spec.dimension(), "--plane u"),
          parse_sized(cfg.plane.substr(semi + 1), spec.dimension(), "--plane v")};
}

CurvatureRoute route_of(const std::string& name) {
  if (name == "general") return CurvatureRoute::General;
  if (name == "closed") return CurvatureRoute::ClosedPsi;
  if (name == "hypersurface") return CurvatureRoute::Hypersurface;
  throw InputError("--route must be general, closed or hypersurface");
}

Json complex_list(const std::vector<Complex>& values) {
  Json out = Json::array();
  for (const Complex& z : values) out.push_back(Json::array({z.real(), z.imag()}));
  return out;
}

Json operator_summary(const Matrix& M, const RunConfig& cfg) {
  const JordanProfile jp = jordan_profile(M, cfg.rank_tol);
  const auto nil = nilpotency_index(M, cfg.zero_tol);
  Json blocks = Json::array();
  for (const EigenBlocks& b : jp.blocks) {
    blocks.push_back({{"eigenvalue", {b.eigenvalue.real(), b.eigenvalue.imag()}}, {"partition", b.partition}});
  }
  return {{"matrix", to_json(M)},
          {"rank", numerical_rank(M, cfg.rank_tol)},
          {"spectrum", complex_list(jp.eigenvalues)},
          {"nilpotency_index", nil ? Json(*nil) : Json(nullptr)},
          {"rank_sequence", jp.rank_sequence},
          {"jordan_blocks", blocks},
          {"low_confidence", jp.low_confidence}};
}

template <std::size_t R>
Json nonzero_components(const CoordTensor<R>& T, double tol) {
  Json out = Json::array();
  const std::size_t n = T.dim();
  for (std::size_t flat = 0; flat < T.data().size(); ++flat) {
    const double v = T.data()[flat];
    if (std::abs(v) <= tol) continue;
    std::vector<std::size_t> idx(R);
    std::size_t f = flat;
    for (std::size_t d = R; d-- > 0;) {
      idx[d] = f % n;
      f /= n;
    }
    out.push_back({{"index", idx}, {"value", v}});
  }
  return out;
}

std::string render_text(const Json& doc) {
  std::ostringstream os;
  os << std::setprecision(10);
  if (doc.contains("reports")) {
    for (const Json& r : doc["reports"]) {
      os << r["property"].get<std::string>() << ": " << r["status"].get<std::string>() << "  (spec "
         << r["spec_digest"].get<std::string>() << ", seed " << r["seed"] << ")\n";
      os << "  samples: " << r["samples"].dump() << "\n";
      for (const Json& n : r["notes"]) os << "  note: " << n.get<std::string>() << "\n";
      for (const Json& w : r["witnesses"]) os << "  witness: " << w["measured"].dump() << "\n";
      if (r.contains("elapsed_ms")) os << "  elapsed: " << r["elapsed_ms"] << " ms\n";
    }
    return os.str();
  }
  const Json& res = doc["result"];
  for (const auto& [key, value] : res.items()) {
    if (key == "matrix") {
      os << "matrix:\n";
      for (const Json& row : value) {
        os << " ";
        for (const Json& x : row) os << " " << std::setw(14) << x.get<double>();
        os << "\n";
      }
    } else if (value.is_array() && !value.empty() && value.front().is_object()) {
      os << key << ":\n";
      for (const Json& item : value) os << "  " << item.dump() << "\n";
    } else {
      os << key << ": " << value.dump() << "\n";
    }
  }
  return os.str();
}

Json run_computation(const RunConfig& cfg, const MetricSpec& spec) {
  const CurvatureEngine eng(spec);
  const std::string& sub = cfg.subcommand;
  if (sub == "sample") {
    Rng rng(cfg.seed);
    const PointChart P = point_of(cfg, spec);
    const MetricAtPoint gp = metric_at(spec, P);
    Json items = Json::array();
    for (std::size_t k = 0; k < cfg.samples; ++k) {
      if (cfg.domain == "spacelike-vector" || cfg.domain == "timelike-vector") {
        const int sign = cfg.domain == "spacelike-vector" ? 1 : -1;
        const Vector Z = sample_unit(spec, gp, sign, rng);
        items.push_back({{"vector", to_json(Z)}, {"norm_squared", inner(gp, Z, Z)}});
      } else {
        PlaneType t = PlaneType::Spacelike;
        if (cfg.domain == "timelike") t = PlaneType::Timelike;
        else if (cfg.domain == "mixed") t = PlaneType::Mixed;
        else if (cfg.domain != "spacelike") throw InputError("--domain must be spacelike, timelike, mixed, spacelike-vector or timelike-vector");
        items.push_back(to_json(sample_plane(spec, gp, t, rng)));
      }
    }
    return {{"point", to_json(P)}, {"domain", cfg.domain}, {"samples", items}};
  }

  const PointChart P = point_of(cfg, spec);
  const MetricAtPoint gp = metric_at(spec, P);
  if (sub == "christoffel") {
    return {{"point", to_json(P)}, {"components", nonzero_components(eng.christoffel(P), cfg.zero_tol)}};
  }
  if (sub == "curvature") {
    const Riemann R = eng.riemann(P, route_of(cfg.route));
    const SymmetryDefects d = curvature_symmetry_defects(R);
    return {{"point", to_json(P)},
            {"route", cfg.route},
            {"max_abs", R.max_abs()},
            {"symmetry_defects", {{"antisymmetry", d.antisymmetry}, {"pair_symmetry", d.pair_symmetry}, {"bianchi", d.bianchi}}},
            {"components", nonzero_components(R, cfg.zero_tol)}};
  }
  if (sub == "ricci") {
    const Matrix rho = eng.ricci(P);
    return {{"point", to_json(P)}, {"matrix", to_json(rho)}, {"max_abs", rho.cwiseAbs().maxCoeff()}};
  }

  std::string op = sub;
  if (sub == "jordan") op = cfg.op;
  Json res{{"point", to_json(P)}, {"operator", op}};
  Matrix M;
  if (op == "jacobi") {
    const Vector X = vector_of(cfg, spec);
    M = jacobi_op(eng.curvature(P, CurvatureRoute::General), gp, X).mat;
    res["vector"] = to_json(X);
    res["norm_squared"] = inner(gp, X, X);
  } else if (op == "szabo") {
    const Vector X = vector_of(cfg, spec);
    M = szabo_op(eng.nabla_riemann(P, CurvatureRoute::General), gp, X, P).mat;
    res["vector"] = to_json(X);
    res["norm_squared"] = inner(gp, X, X);
  } else if (op == "skewcurv") {
    const auto [u, v] = plane_of(cfg, spec);
    const PlaneSpec pl = make_plane(gp, u, v);
    M = skew_op(eng.curvature(P, CurvatureRoute::General), gp, pl).mat;
    res["plane"] = to_json(pl);
  } else {
    throw InputError("--operator must be jacobi, szabo or skewcurv");
  }
  const Json summary = operator_summary(M, cfg);
  for (const auto& [key, value] : summary.items()) res[key] = value;
  if (sub == "jordan") res.erase("matrix");
  return res;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Curvature operators and theorem checks for Walker-type pseudo-Riemannian metrics", "nilcurv"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--metric", cfg.metric, "Metric spec JSON file")->check(CLI::ExistingFile);
  app.add_option("--point", cfg.point, "Point, comma-separated in chart order (default: origin)");
  app.add_option("--vector", cfg.vector, "Tangent vector, comma-separated");
  app.add_option("--plane", cfg.plane, "Plane as 'u;v'");
  app.add_option("--samples", cfg.samples, "Samples per domain and point")->capture_default_str();
  app.add_option("--points", cfg.points, "Random points per verification")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--rank-tol", cfg.rank_tol, "Relative singular value threshold")->capture_default_str();
  app.add_option("--zero-tol", cfg.zero_tol, "Absolute vanishing threshold")->capture_default_str();
  app.add_option("--out", cfg.out, "Write output to this file instead of standard output");
  app.add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
  app.add_flag("--timing", cfg.timing, "Include elapsed_ms in reports (output is then not reproducible)");

  const auto sub = [&](const char* name, const char* desc) { return app.add_subcommand(name, desc); };
  CLI::App* curvature = sub("curvature", "Curvature tensor components at --point");
  curvature->add_option("--route", cfg.route, "general, closed or hypersurface")->capture_default_str();
  sub("christoffel", "Christoffel symbols at --point");
  sub("ricci", "Ricci tensor at --point");
  sub("jacobi", "Jacobi operator J(X) for --vector");
  sub("szabo", "Szabo operator for --vector");
  sub("skewcurv", "Skew-symmetric curvature operator for --plane");
  CLI::App* jordan = sub("jordan", "Jordan profile of an operator");
  jordan->add_option("--operator", cfg.op, "jacobi, szabo or skewcurv")->capture_default_str();
  CLI::App* sample = sub("sample", "Sample unit vectors or planes at --point");
  sample->add_option("--domain", cfg.domain,
                     "spacelike, timelike, mixed (planes) or spacelike-vector, timelike-vector")
      ->capture_default_str();
  CLI::App* verify = sub("verify", "Verify one property");
  verify->add_option("--property", cfg.property, "Property name")
      ->required()
      ->check(CLI::IsMember(property_names()));
  sub("verify-all", "Verify every property that applies to the metric family");

  std::vector<std::string> argv_store{"nilcurv"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();

  int code = 0;
  Json doc;
  try {
    if (cfg.metric.empty()) throw InputError("--metric is required");
    const MetricSpec spec = load_metric_file(cfg.metric);
    Json config = cfg.to_json();
    config["spec_digest"] = spec_digest(spec);
    doc["config"] = config;
    if (cfg.subcommand == "verify" || cfg.subcommand == "verify-all") {
      VerifyOptions opt;
      opt.points = cfg.points;
      opt.samples = cfg.samples;
      opt.seed = cfg.seed;
      opt.tol = {cfg.rank_tol, cfg.zero_tol};
      std::optional<PointChart> point;
      if (!cfg.point.empty()) point = point_of(cfg, spec);
      const std::vector<std::string> names =
          cfg.subcommand == "verify" ? std::vector<std::string>{cfg.property} : applicable_properties(spec);
      Json reports = Json::array();
      for (const std::string& name : names) {
        const auto t0 = std::chrono::steady_clock::now();
        VerificationReport r = verify_property(name, spec, opt, point);
        if (cfg.timing) {
          r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        }
        if (r.status == Status::Fail) code = 1;
        reports.push_back(r.to_json());
      }
      doc["reports"] = reports;
    } else {
      doc["result"] = run_computation(cfg, spec);
    }
  } catch (const SpecFormatError& e) {
    err << "error: " << cfg.metric << ": " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  const std::string text = cfg.format == "json" ? doc.dump(2) + "\n" : render_text(doc);
  if (cfg.out.empty()) {
    out << text;
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << cfg.out << "\n";
      return 2;
    }
    f << text;
  }
  return code;
}

}  // namespace nilcurv::cli
