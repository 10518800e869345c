#ifndef SVRPG_CHECK_SUITE_HPP
#define SVRPG_CHECK_SUITE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "svrpg/theory.hpp"

namespace svrpg {

struct CheckOptions {
  /// Maps raw constants to (L, L_g, C_g, C_omega). Tests swap this out to
  /// make sure a wrong formula is caught.
  std::function<DerivedConstants(const TheoryConstants&)> derive =
      [](const TheoryConstants& c) { return c.derived(); };
  int random_points = 5;
  int theorem_seeds = 10;
  std::uint64_t seed = 7;
};

struct CheckReport {
  nlohmann::json json;
  bool passed = true;
  std::vector<std::string> failures;
};

/// Identity, unbiasedness, gradient, bound and schedule checks on the small
/// tabular oracles. Every check appears in the report with its residual and
/// tolerance; `passed` is false when any of them fails.
CheckReport check_suite(const CheckOptions& options = {});

}  // namespace svrpg

#endif  // SVRPG_CHECK_SUITE_HPP
