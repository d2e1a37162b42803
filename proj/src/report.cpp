#include "nilcurv/report.hpp"

#include <sstream>

namespace nilcurv {

std::string status_name(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::RefutedAsExpected: return "refuted-as-expected";
  }
  return "unknown";
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const PointChart& p) { return to_json(p.coords); }

Json to_json(const PlaneSpec& plane) {
  return Json{{"u", to_json(plane.u)},
              {"v", to_json(plane.v)},
              {"orientation", plane.orientation},
              {"type", plane_type_name(plane.type)},
              {"gram", to_json(Matrix(plane.gram))}};
}

Vector vector_from_json(const Json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

Json VerificationReport::to_json() const {
  Json out{{"property", property},
           {"status", status_name(status)},
           {"spec_digest", spec_digest},
           {"seed", seed},
           {"tolerances", {{"rank", tolerances.rank}, {"zero", tolerances.zero}}},
           {"samples", samples},
           {"witnesses", witnesses},
           {"notes", notes}};
  if (elapsed_ms) out["elapsed_ms"] = *elapsed_ms;
  return out;
}

std::string VerificationReport::to_text() const {
  std::ostringstream os;
  os << property << ": " << status_name(status) << "  (spec " << spec_digest << ", seed " << seed
     << ", rank-tol " << tolerances.rank << ", zero-tol " << tolerances.zero << ")\n";
  os << "  samples: " << samples.dump() << "\n";
  for (const std::string& n : notes) os << "  note: " << n << "\n";
  for (const Json& w : witnesses) {
    os << "  witness: " << w.value("measured", Json::object()).dump() << "\n";
  }
  if (elapsed_ms) os << "  elapsed: " << *elapsed_ms << " ms\n";
  return os.str();
}

}  // namespace nilcurv
