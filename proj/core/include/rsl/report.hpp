#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace rsl {

// Default pointwise tolerance, in joint standard errors.
inline constexpr double kDefaultZ = 3.0;

// Two independent estimates of the same quantity at one grid point.
struct PointCheck {
  double x = 0.0;
  double lhs = 0.0;
  double lhs_se = 0.0;
  double rhs = 0.0;
  double rhs_se = 0.0;
  double z = 0.0;  // (lhs - rhs) / joint SE
  bool pass = false;
};

struct IdentityReport {
  std::string name;
  double tolerance_z = kDefaultZ;
  std::vector<PointCheck> points;
  double max_abs_z = 0.0;
  bool passed = false;
};

// Kolmogorov-Smirnov two-sample test.
struct TwoSampleResult {
  double statistic = 0.0;
  double critical = 0.0;
  double alpha = 0.01;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  bool passed = false;
};

// z-score of a difference of independent estimates; +-inf when both SEs
// vanish and the estimates differ.
double joint_z(double a, double se_a, double b, double se_b);

// Fills in z/pass for every point and the report summary fields.
void finalize(IdentityReport& report);

}  // namespace rsl
