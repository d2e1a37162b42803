#include "nilcurv/json_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

namespace nilcurv {

namespace {

const Json& require(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw SpecFormatError(path.empty() ? "/" : path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw SpecFormatError(path + "/" + key, "missing required field");
  return *it;
}

std::size_t require_count(const Json& j, const char* key, const std::string& path,
                          bool allow_zero) {
  const Json& v = require(j, key, path);
  if (!v.is_number_integer() || v.get<long long>() < (allow_zero ? 0 : 1)) {
    throw SpecFormatError(path + "/" + key, allow_zero ? "expected a nonnegative integer"
                                                       : "expected a positive integer");
  }
  return v.get<std::size_t>();
}

std::vector<std::size_t> parse_index_key(const std::string& key, std::size_t arity,
                                         std::size_t p, const std::string& path) {
  std::vector<std::size_t> out;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != part.size() || v < 1 || static_cast<std::size_t>(v) > p) {
      throw SpecFormatError(path, "index key \"" + key + "\" must be " +
                                      std::to_string(arity) + " comma-separated integers in 1.." +
                                      std::to_string(p));
    }
    out.push_back(static_cast<std::size_t>(v - 1));
  }
  if (out.size() != arity) {
    throw SpecFormatError(path, "index key \"" + key + "\" must have " + std::to_string(arity) +
                                    " components");
  }
  return out;
}

std::string key_path(const std::string& path, const char* field, const std::string& key) {
  return path + "/" + field + "/" + key;
}

}  // namespace

Polynomial polynomial_from_json(const Json& j, const std::string& path) {
  const std::size_t nvars = require_count(j, "nvars", path, false);
  const Json& terms = require(j, "terms", path);
  if (!terms.is_array()) throw SpecFormatError(path + "/terms", "expected an array");
  Polynomial poly(nvars);
  std::set<Exponents> seen;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string tp = path + "/terms/" + std::to_string(t);
    const Json& exps_j = require(terms[t], "exps", tp);
    const Json& coef_j = require(terms[t], "coef", tp);
    if (!exps_j.is_array() || exps_j.size() != nvars) {
      throw SpecFormatError(tp + "/exps", "expected an array of " + std::to_string(nvars) +
                                              " nonnegative integers");
    }
    Exponents exps;
    for (const Json& e : exps_j) {
      if (!e.is_number_integer() || e.get<long long>() < 0) {
        throw SpecFormatError(tp + "/exps", "exponents must be nonnegative integers");
      }
      exps.push_back(e.get<std::uint32_t>());
    }
    if (!coef_j.is_number()) throw SpecFormatError(tp + "/coef", "expected a number");
    const double coef = coef_j.get<double>();
    if (!std::isfinite(coef) || coef == 0.0) {
      throw SpecFormatError(tp + "/coef", "coefficient must be finite and nonzero");
    }
    if (!seen.insert(exps).second) {
      throw SpecFormatError(tp + "/exps", "duplicate exponent vector");
    }
    poly.add_term(exps, coef);
  }
  return poly;
}

Json polynomial_to_json(const Polynomial& poly) {
  Json terms = Json::array();
  for (const auto& [exps, coef] : poly.terms()) {
    terms.push_back(Json{{"exps", exps}, {"coef", coef}});
  }
  return Json{{"nvars", poly.nvars()}, {"terms", std::move(terms)}};
}

MetricSpec metric_from_json(const Json& j, const std::string& path) {
  const Json& fam_j = require(j, "family", path);
  if (!fam_j.is_string()) throw SpecFormatError(path + "/family", "expected a string");
  const std::string family = fam_j.get<std::string>();

  try {
    if (family == "flat") {
      return MetricSpec::flat(require_count(j, "a", path, true), require_count(j, "b", path, true));
    }
    if (family == "product") {
      const MetricSpec base = metric_from_json(require(j, "base", path), path + "/base");
      return MetricSpec::product(base, require_count(j, "a", path, true),
                                 require_count(j, "b", path, true));
    }
    const std::size_t p = require_count(j, "p", path, false);
    if (family == "gradient") {
      return MetricSpec::gradient(p, polynomial_from_json(require(j, "f", path), path + "/f"));
    }
    if (family == "psi") {
      PolyMatrix psi(p, p);
      std::map<std::pair<std::size_t, std::size_t>, std::string> listed;
      if (j.contains("psi")) {
        const Json& entries = j.at("psi");
        if (!entries.is_object()) throw SpecFormatError(path + "/psi", "expected an object");
        for (const auto& [key, value] : entries.items()) {
          const auto kp = key_path(path, "psi", key);
          const auto idx = parse_index_key(key, 2, p, kp);
          psi(idx[0], idx[1]) = polynomial_from_json(value, kp);
          listed[{idx[0], idx[1]}] = key;
        }
        for (const auto& [ij, key] : listed) {
          const auto [i, jj] = ij;
          if (!listed.contains({jj, i})) {
            psi(jj, i) = psi(i, jj);
          } else if (!(psi(jj, i) == psi(i, jj))) {
            throw SpecFormatError(key_path(path, "psi", key), "psi is not symmetric");
          }
        }
      }
      return MetricSpec::psi(p, std::move(psi));
    }
    if (family == "affine") {
      std::vector<Polynomial> gamma(p * p * p, Polynomial(p));
      const auto at = [p](std::size_t a, std::size_t b, std::size_t c) {
        return (a * p + b) * p + c;
      };
      std::map<std::vector<std::size_t>, std::string> listed;
      if (j.contains("gamma")) {
        const Json& entries = j.at("gamma");
        if (!entries.is_object()) throw SpecFormatError(path + "/gamma", "expected an object");
        for (const auto& [key, value] : entries.items()) {
          const auto kp = key_path(path, "gamma", key);
          const auto idx = parse_index_key(key, 3, p, kp);
          gamma[at(idx[0], idx[1], idx[2])] = polynomial_from_json(value, kp);
          listed[idx] = key;
        }
        for (const auto& [idx, key] : listed) {
          const std::vector<std::size_t> mirror{idx[1], idx[0], idx[2]};
          if (!listed.contains(mirror)) {
            gamma[at(idx[1], idx[0], idx[2])] = gamma[at(idx[0], idx[1], idx[2])];
          } else if (!(gamma[at(idx[1], idx[0], idx[2])] == gamma[at(idx[0], idx[1], idx[2])])) {
            throw SpecFormatError(key_path(path, "gamma", key),
                                  "connection is not torsion free (gamma_ij^k != gamma_ji^k)");
          }
        }
      }
      return MetricSpec::affine(p, std::move(gamma));
    }
  } catch (const ConstructionError& e) {
    throw SpecFormatError(path.empty() ? "/" : path, e.what());
  } catch (const SpecFormatError&) {
    throw;
  } catch (const InputError& e) {
    throw SpecFormatError(path.empty() ? "/" : path, e.what());
  }
  throw SpecFormatError(path + "/family",
                        "unknown family \"" + family +
                            "\" (expected psi, gradient, affine, flat or product)");
}

Json metric_to_json(const MetricSpec& spec) {
  Json out;
  out["family"] = family_name(spec.family());
  switch (spec.family()) {
    case Family::Psi: {
      out["p"] = spec.p();
      Json entries = Json::object();
      for (std::size_t i = 0; i < spec.p(); ++i) {
        for (std::size_t j = i; j < spec.p(); ++j) {
          if (spec.psi()(i, j).is_zero()) continue;
          entries[std::to_string(i + 1) + "," + std::to_string(j + 1)] =
              polynomial_to_json(spec.psi()(i, j));
        }
      }
      out["psi"] = std::move(entries);
      break;
    }
    case Family::Gradient:
      out["p"] = spec.p();
      out["f"] = polynomial_to_json(spec.potential());
      break;
    case Family::Affine: {
      out["p"] = spec.p();
      Json entries = Json::object();
      for (std::size_t i = 0; i < spec.p(); ++i) {
        for (std::size_t j = i; j < spec.p(); ++j) {
          for (std::size_t k = 0; k < spec.p(); ++k) {
            if (spec.gamma(i, j, k).is_zero()) continue;
            entries[std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                    std::to_string(k + 1)] = polynomial_to_json(spec.gamma(i, j, k));
          }
        }
      }
      out["gamma"] = std::move(entries);
      break;
    }
    case Family::Flat:
      out["a"] = spec.flat_negative();
      out["b"] = spec.flat_positive();
      break;
    case Family::Product:
      out["a"] = spec.flat_negative();
      out["b"] = spec.flat_positive();
      out["base"] = metric_to_json(spec.base());
      break;
  }
  return out;
}

Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SpecFormatError(source, e.what());
  }
}

MetricSpec load_metric_file(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw InputError("cannot open metric file " + filename);
  std::stringstream buf;
  buf << in.rdbuf();
  return metric_from_json(parse_json_text(buf.str(), filename));
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string spec_digest(const MetricSpec& spec) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::uint64_t h = fnv1a64(metric_to_json(spec).dump());
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace nilcurv
