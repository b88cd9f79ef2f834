#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "hartree/params.hpp"

namespace hartree::testing {

/// Multi-precision reference values from tests/fixtures/make_constants_oracle.py.
inline const nlohmann::json& oracle() {
  static const nlohmann::json j = [] {
    std::ifstream f(HARTREE_ORACLE);
    return nlohmann::json::parse(f);
  }();
  return j;
}

/// Oracle entry for (n, alpha) as a double; throws when the pair is absent.
inline double oracle_value(int n, double alpha, const std::string& key) {
  for (const auto& e : oracle().at("pairs"))
    if (e.at("n").get<int>() == n && e.at("alpha").get<double>() == alpha) return std::stod(e.at(key).get<std::string>());
  throw Error("no oracle entry for n=" + std::to_string(n) + " alpha=" + std::to_string(alpha));
}

}  // namespace hartree::testing
