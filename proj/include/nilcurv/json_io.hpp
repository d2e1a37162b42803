#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "nilcurv/errors.hpp"
#include "nilcurv/metrics.hpp"
#include "nilcurv/polyfunc.hpp"

namespace nilcurv {

using Json = nlohmann::json;

/// Malformed polynomial or metric document. `field()` is a JSON-pointer-like
/// path to the offending value.
class SpecFormatError : public InputError {
 public:
  SpecFormatError(std::string field, const std::string& message)
      : InputError(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// {"nvars": p, "terms": [{"exps": [...], "coef": c}, ...]}
Polynomial polynomial_from_json(const Json& j, const std::string& path = "");
Json polynomial_to_json(const Polynomial& poly);

/// Metric spec document. Index keys ("i,j" / "i,j,k") are 1-based; unlisted
/// entries are zero and an entry given only once is mirrored across its
/// symmetric pair.
MetricSpec metric_from_json(const Json& j, const std::string& path = "");
Json metric_to_json(const MetricSpec& spec);

/// Parses text, rethrowing syntax errors as SpecFormatError with line and
/// column.
Json parse_json_text(const std::string& text, const std::string& source);
MetricSpec load_metric_file(const std::string& filename);

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string spec_digest(const MetricSpec& spec);
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace nilcurv
