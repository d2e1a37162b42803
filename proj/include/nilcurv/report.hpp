#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nilcurv/json_io.hpp"
#include "nilcurv/operators.hpp"

namespace nilcurv {

enum class Status { Pass, Fail, RefutedAsExpected };

std::string status_name(Status s);

struct Tolerances {
  double rank = 1e-8;
  double zero = 1e-10;
};

/// Certificate for one property. Witnesses are self-contained JSON objects
/// ({"point", "vector" | "plane", "measured"}) that can be re-evaluated.
struct VerificationReport {
  std::string property;
  Status status = Status::Pass;
  std::string spec_digest;
  std::uint64_t seed = 0;
  Tolerances tolerances;
  Json samples = Json::object();
  std::vector<Json> witnesses;
  std::vector<std::string> notes;
  std::optional<double> elapsed_ms;

  Json to_json() const;
  std::string to_text() const;
};

Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Json to_json(const PointChart& p);
Json to_json(const PlaneSpec& plane);

Vector vector_from_json(const Json& j);

}  // namespace nilcurv
