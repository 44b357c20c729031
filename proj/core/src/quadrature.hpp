#pragma once

#include <functional>

namespace rsl::detail {

using Integrand = std::function<double(double)>;

// Integral of f over [0, inf).
double integrate_half_line(const Integrand& f, double rel_tol, const char* what);

// Integral of f over the finite interval [a, b]; endpoint singularities allowed.
double integrate_interval(const Integrand& f, double a, double b, double rel_tol, const char* what);

}  // namespace rsl::detail
