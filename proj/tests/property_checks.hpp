#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace odefilter::testing {

struct PropertyResult {
  std::string name;
  int cases = 0;
  int failures = 0;
  std::string first_failure;

  [[nodiscard]] bool ok() const { return failures == 0 && cases > 0; }
};

PropertyResult check_psd_covariances(int cases, std::uint64_t seed);
PropertyResult check_predicted_derivative_variance(int cases, std::uint64_t seed);
PropertyResult check_gain_unit_interval(int cases, std::uint64_t seed);
PropertyResult check_cross_terms(int cases, std::uint64_t seed);
PropertyResult check_semigroup(int cases, std::uint64_t seed);
PropertyResult check_constant_field(int cases, std::uint64_t seed);
PropertyResult check_kronecker_reduction(int cases, std::uint64_t seed);

std::vector<PropertyResult> run_property_suite(int cases, std::uint64_t seed);

}  // namespace odefilter::testing
