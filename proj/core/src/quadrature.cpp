#include "quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "rsl/error.hpp"

namespace rsl::detail {
namespace {

// Error estimates above this multiple of the requested tolerance (relative
// to the L1 norm of the integrand) are reported as non-convergence.
constexpr double kAcceptFactor = 1e3;

void check(double value, double error, double l1, double rel_tol, const char* what) {
  if (!std::isfinite(value) || !std::isfinite(error)) {
    throw QuadratureError(std::string("quadrature produced a non-finite value: ") + what);
  }
  const double allowed = kAcceptFactor * rel_tol * std::max(l1, std::numeric_limits<double>::min());
  if (error > allowed && error > 1e-300) {
    throw QuadratureError(std::string("quadrature did not converge: ") + what + " (error estimate " +
                          std::to_string(error) + ", L1 " + std::to_string(l1) + ")");
  }
}

}  // namespace

double integrate_half_line(const Integrand& f, double rel_tol, const char* what) {
  static thread_local boost::math::quadrature::exp_sinh<double> integrator;
  double error = 0.0;
  double l1 = 0.0;
  double value = 0.0;
  try {
    value = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), rel_tol, &error, &l1);
  } catch (const std::exception& e) {
    throw QuadratureError(std::string(what) + ": " + e.what());
  }
  check(value, error, l1, rel_tol, what);
  return value;
}

double integrate_interval(const Integrand& f, double a, double b, double rel_tol, const char* what) {
  if (!(b > a)) return 0.0;
  static thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  double error = 0.0;
  double l1 = 0.0;
  double value = 0.0;
  try {
    value = integrator.integrate(f, a, b, rel_tol, &error, &l1);
  } catch (const std::exception& e) {
    throw QuadratureError(std::string(what) + ": " + e.what());
  }
  check(value, error, l1, rel_tol, what);
  return value;
}

}  // namespace rsl::detail
