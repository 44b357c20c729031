#include "rsl/distributions.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <type_traits>

#include "quadrature.hpp"
#include "rsl/error.hpp"

namespace rsl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMgfTol = 1e-10;
constexpr double kMomentTol = 1e-8;
constexpr double kSurvivalTol = 1e-10;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double lomax_survival(double x, double shape, double scale) {
  return x < 0.0 ? 1.0 : std::pow(1.0 + x / scale, -shape);
}

double sample_lomax(double shape, double scale, RandomStream& rng) {
  return scale * std::expm1(-std::log(rng.uniform_open()) / shape);
}

// Marsaglia-Tsang; shape < 1 boosted through U^(1/shape).
double sample_gamma(double shape, double rate, RandomStream& rng) {
  double boost = 1.0;
  if (shape < 1.0) {
    boost = std::pow(rng.uniform_open(), 1.0 / shape);
    shape += 1.0;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z, v;
    do {
      z = rng.normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return boost * d * v / rate;
  }
}

// exp(sx) P(X > x), formed in log space so exp(sx) cannot overflow against a
// vanishing survival.
double tilted_survival(const DistributionSpec& spec, double s, double x) {
  double log_surv;
  if (spec.is<TiltedPareto>()) {
    const auto& d = spec.as<TiltedPareto>();
    log_surv = -d.beta * std::log1p(x / d.scale) - d.gamma * x;
  } else if (spec.is<Pareto>()) {
    const auto& d = spec.as<Pareto>();
    log_surv = -d.shape * std::log1p(x / d.scale);
  } else {
    const double surv = survival(spec, x);
    if (surv <= 0.0) return 0.0;
    log_surv = std::log(surv);
  }
  return std::exp(s * x + log_surv);
}

// E[exp(sX)] for a non-negative law from its survival function:
// phi(s) = 1 + s * int_0^inf exp(sx) P(X > x) dx.
double mgf_from_survival(const DistributionSpec& spec, double s, const char* what) {
  const double integral =
      detail::integrate_half_line([&](double x) { return tilted_survival(spec, s, x); }, kMgfTol, what);
  return 1.0 + s * integral;
}

// E[X exp(sX)] = int_0^inf (1 + s x) exp(sx) P(X > x) dx for a non-negative law.
double moment_from_survival(const DistributionSpec& spec, double s, const char* what) {
  return detail::integrate_half_line([&](double x) { return (1.0 + s * x) * tilted_survival(spec, s, x); },
                                     kMomentTol, what);
}

double tilted_pareto_upper_quantile(const TiltedPareto& d, double tail) {
  if (tail >= 1.0) return 0.0;
  const double log_tail = std::log(tail);
  // The survival is below both factors, so the root is below both quantiles.
  const double hi = std::min(-log_tail / d.gamma, d.scale * std::expm1(-log_tail / d.beta));
  auto f = [&](double x) { return -d.beta * std::log1p(x / d.scale) - d.gamma * x - log_tail; };
  boost::uintmax_t iters = 200;
  const auto [lo_x, hi_x] = boost::math::tools::toms748_solve(
      f, 0.0, hi, f(0.0), f(hi), boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (lo_x + hi_x);
}

double difference_survival(const DistributionSpec& b, const DistributionSpec& a, double x) {
  if (b.is<Deterministic>()) {
    // P(A < b - x)
    const double t = b.as<Deterministic>().value - x;
    if (a.is<Deterministic>()) return a.as<Deterministic>().value < t ? 1.0 : 0.0;
    return t <= 0.0 ? 0.0 : 1.0 - survival(a, t);
  }
  if (a.is<Deterministic>()) return survival(b, x + a.as<Deterministic>().value);
  // E[S_B(x + A)] written over the upper-tail probability t of A; the part of
  // A's mass with x + A < 0 contributes 1 each.
  const double head = x < 0.0 ? 1.0 - survival(a, -x) : 0.0;
  const double t_max = x < 0.0 ? survival(a, -x) : 1.0;
  // The remaining part is at most t_max; skip it when it cannot change head.
  if (t_max <= 0.25 * std::numeric_limits<double>::epsilon() * head) return head;
  const double tail = detail::integrate_interval(
      [&](double t) {
        if (t <= 0.0) return 0.0;
        return survival(b, x + upper_quantile(a, t));
      },
      0.0, t_max, kSurvivalTol, "difference survival");
  return std::clamp(head + tail, 0.0, 1.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// construction

DistributionSpec DistributionSpec::exponential(double rate) {
  require(finite_positive(rate), "exponential: rate must be finite and > 0");
  return DistributionSpec(Exponential{rate});
}

DistributionSpec DistributionSpec::deterministic(double value) {
  require(std::isfinite(value), "deterministic: value must be finite");
  return DistributionSpec(Deterministic{value});
}

DistributionSpec DistributionSpec::pareto(double shape, double scale) {
  require(finite_positive(shape), "pareto: shape must be finite and > 0");
  require(finite_positive(scale), "pareto: scale must be finite and > 0");
  return DistributionSpec(Pareto{shape, scale});
}

DistributionSpec DistributionSpec::gamma(double shape, double rate) {
  require(finite_positive(shape), "gamma: shape must be finite and > 0");
  require(finite_positive(rate), "gamma: rate must be finite and > 0");
  return DistributionSpec(Gamma{shape, rate});
}

DistributionSpec DistributionSpec::tilted_pareto(double gamma, double beta, double scale) {
  require(finite_positive(gamma), "tilted_pareto: gamma must be finite and > 0");
  require(std::isfinite(beta) && beta > 1.0, "tilted_pareto: beta must be finite and > 1");
  require(finite_positive(scale), "tilted_pareto: scale must be finite and > 0");
  return DistributionSpec(TiltedPareto{gamma, beta, scale});
}

DistributionSpec DistributionSpec::uniform(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "uniform: need finite lo < hi");
  return DistributionSpec(Uniform{lo, hi});
}

DistributionSpec DistributionSpec::difference(DistributionSpec b, DistributionSpec a) {
  require(!b.is<Difference>() && !a.is<Difference>(), "difference: components cannot be differences");
  require(b.non_negative(), "difference: B must be a non-negative law");
  require(a.non_negative(), "difference: A must be a non-negative law");
  return DistributionSpec(Difference{std::make_shared<const DistributionSpec>(std::move(b)),
                                     std::make_shared<const DistributionSpec>(std::move(a))});
}

const DistributionSpec& DistributionSpec::b() const {
  if (!is<Difference>()) throw ValidationError("b(): not a difference spec");
  return *as<Difference>().b;
}

const DistributionSpec& DistributionSpec::a() const {
  if (!is<Difference>()) throw ValidationError("a(): not a difference spec");
  return *as<Difference>().a;
}

bool DistributionSpec::non_negative() const {
  return std::visit(Overloaded{
                        [](const Deterministic& d) { return d.value >= 0.0; },
                        [](const Uniform& u) { return u.lo >= 0.0; },
                        [](const Difference&) { return false; },
                        [](const auto&) { return true; },
                    },
                    family_);
}

std::string DistributionSpec::family_name() const {
  return std::visit(Overloaded{
                        [](const Exponential&) { return "exponential"; },
                        [](const Deterministic&) { return "deterministic"; },
                        [](const Pareto&) { return "pareto"; },
                        [](const Gamma&) { return "gamma"; },
                        [](const TiltedPareto&) { return "tilted_pareto"; },
                        [](const Uniform&) { return "uniform"; },
                        [](const Difference&) { return "difference"; },
                    },
                    family_);
}

bool operator==(const DistributionSpec& lhs, const DistributionSpec& rhs) {
  if (lhs.family_.index() != rhs.family_.index()) return false;
  return std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        const auto& r = std::get<T>(rhs.family_);
        if constexpr (std::is_same_v<T, Exponential>) return l.rate == r.rate;
        if constexpr (std::is_same_v<T, Deterministic>) return l.value == r.value;
        if constexpr (std::is_same_v<T, Pareto>) return l.shape == r.shape && l.scale == r.scale;
        if constexpr (std::is_same_v<T, Gamma>) return l.shape == r.shape && l.rate == r.rate;
        if constexpr (std::is_same_v<T, TiltedPareto>)
          return l.gamma == r.gamma && l.beta == r.beta && l.scale == r.scale;
        if constexpr (std::is_same_v<T, Uniform>) return l.lo == r.lo && l.hi == r.hi;
        if constexpr (std::is_same_v<T, Difference>) return *l.b == *r.b && *l.a == *r.a;
      },
      lhs.family_);
}

std::string describe(const DistributionSpec& spec) {
  return std::visit(Overloaded{
                        [](const Exponential& d) { return "exponential(rate=" + fmt_double(d.rate) + ")"; },
                        [](const Deterministic& d) { return "deterministic(value=" + fmt_double(d.value) + ")"; },
                        [](const Pareto& d) {
                          return "pareto(shape=" + fmt_double(d.shape) + ",scale=" + fmt_double(d.scale) + ")";
                        },
                        [](const Gamma& d) {
                          return "gamma(shape=" + fmt_double(d.shape) + ",rate=" + fmt_double(d.rate) + ")";
                        },
                        [](const TiltedPareto& d) {
                          return "tilted_pareto(gamma=" + fmt_double(d.gamma) + ",beta=" + fmt_double(d.beta) +
                                 ",scale=" + fmt_double(d.scale) + ")";
                        },
                        [](const Uniform& d) {
                          return "uniform(lo=" + fmt_double(d.lo) + ",hi=" + fmt_double(d.hi) + ")";
                        },
                        [](const Difference& d) { return "difference(B=" + describe(*d.b) + ",A=" + describe(*d.a) + ")"; },
                    },
                    spec.family());
}

std::uint64_t digest(const DistributionSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : describe(spec)) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

const char* to_string(TailClass::Kind kind) {
  switch (kind) {
    case TailClass::Kind::Subexponential:
      return "subexponential";
    case TailClass::Kind::SGamma:
      return "s_gamma";
    case TailClass::Kind::Light:
      return "light";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// sampling and survival

double sample(const DistributionSpec& spec, RandomStream& rng) {
  return std::visit(Overloaded{
                        [&](const Exponential& d) { return rng.exponential() / d.rate; },
                        [&](const Deterministic& d) { return d.value; },
                        [&](const Pareto& d) { return sample_lomax(d.shape, d.scale, rng); },
                        [&](const Gamma& d) { return sample_gamma(d.shape, d.rate, rng); },
                        [&](const TiltedPareto& d) {
                          // Survival is a product of two survivals: the law of a minimum.
                          const double heavy = sample_lomax(d.beta, d.scale, rng);
                          const double light = rng.exponential() / d.gamma;
                          return std::min(heavy, light);
                        },
                        [&](const Uniform& d) { return d.lo + (d.hi - d.lo) * rng.uniform(); },
                        [&](const Difference& d) {
                          const double b = sample(*d.b, rng);
                          const double a = sample(*d.a, rng);
                          return b - a;
                        },
                    },
                    spec.family());
}

double survival(const DistributionSpec& spec, double x) {
  if (std::isnan(x)) throw DomainError("survival: x is NaN");
  return std::visit(Overloaded{
                        [&](const Exponential& d) { return x < 0.0 ? 1.0 : std::exp(-d.rate * x); },
                        [&](const Deterministic& d) { return x < d.value ? 1.0 : 0.0; },
                        [&](const Pareto& d) { return lomax_survival(x, d.shape, d.scale); },
                        [&](const Gamma& d) {
                          if (x <= 0.0) return 1.0;
                          if (std::isinf(x)) return 0.0;
                          return boost::math::gamma_q(d.shape, d.rate * x);
                        },
                        [&](const TiltedPareto& d) {
                          return x < 0.0 ? 1.0 : lomax_survival(x, d.beta, d.scale) * std::exp(-d.gamma * x);
                        },
                        [&](const Uniform& d) {
                          if (x < d.lo) return 1.0;
                          if (x >= d.hi) return 0.0;
                          return (d.hi - x) / (d.hi - d.lo);
                        },
                        [&](const Difference& d) {
                          if (std::isinf(x)) return x < 0.0 ? 1.0 : 0.0;
                          return difference_survival(*d.b, *d.a, x);
                        },
                    },
                    spec.family());
}

double upper_quantile(const DistributionSpec& spec, double tail) {
  if (!(tail > 0.0 && tail <= 1.0)) throw DomainError("upper_quantile: tail must lie in (0, 1]");
  return std::visit(Overloaded{
                        [&](const Exponential& d) { return -std::log(tail) / d.rate; },
                        [&](const Deterministic& d) { return d.value; },
                        [&](const Pareto& d) { return d.scale * std::expm1(-std::log(tail) / d.shape); },
                        [&](const Gamma& d) {
                          if (tail >= 1.0) return 0.0;
                          return boost::math::gamma_q_inv(d.shape, tail) / d.rate;
                        },
                        [&](const TiltedPareto& d) { return tilted_pareto_upper_quantile(d, tail); },
                        [&](const Uniform& d) { return d.hi - tail * (d.hi - d.lo); },
                        [&](const Difference&) -> double {
                          throw DomainError("upper_quantile: not available for difference specs");
                        },
                    },
                    spec.family());
}

// ---------------------------------------------------------------------------
// moment generating function

double right_abscissa(const DistributionSpec& spec) {
  return std::visit(Overloaded{
                        [](const Exponential& d) { return d.rate; },
                        [](const Gamma& d) { return d.rate; },
                        [](const Pareto&) { return 0.0; },
                        [](const TiltedPareto& d) { return d.gamma; },
                        [](const Difference& d) { return right_abscissa(*d.b); },
                        [](const auto&) { return kInf; },
                    },
                    spec.family());
}

double left_abscissa(const DistributionSpec& spec) {
  if (spec.is<Difference>()) return -right_abscissa(spec.a());
  return -kInf;
}

double mgf(const DistributionSpec& spec, double s) {
  if (std::isnan(s)) throw DomainError("mgf: s is NaN");
  if (s == 0.0) return 1.0;
  return std::visit(Overloaded{
                        [&](const Exponential& d) { return s < d.rate ? d.rate / (d.rate - s) : kInf; },
                        [&](const Deterministic& d) { return std::exp(s * d.value); },
                        [&](const Pareto&) { return s > 0.0 ? kInf : mgf_from_survival(spec, s, "pareto mgf"); },
                        [&](const Gamma& d) { return s < d.rate ? std::pow(d.rate / (d.rate - s), d.shape) : kInf; },
                        [&](const TiltedPareto& d) {
                          if (s > d.gamma) return kInf;
                          // int_0^inf (1 + x/scale)^-beta dx = scale / (beta - 1)
                          if (s == d.gamma) return 1.0 + d.gamma * d.scale / (d.beta - 1.0);
                          return mgf_from_survival(spec, s, "tilted pareto mgf");
                        },
                        [&](const Uniform& d) {
                          const double w = s * (d.hi - d.lo);
                          return std::exp(s * d.lo) * std::expm1(w) / w;
                        },
                        [&](const Difference& d) {
                          const double pb = mgf(*d.b, s);
                          if (std::isinf(pb)) return kInf;
                          const double pa = mgf(*d.a, -s);
                          if (std::isinf(pa)) return kInf;
                          return pb * pa;
                        },
                    },
                    spec.family());
}

double mgf_x_moment(const DistributionSpec& spec, double s) {
  if (!(s < right_abscissa(spec) && s > left_abscissa(spec))) {
    throw DomainError("mgf_x_moment: s = " + fmt_double(s) + " is not strictly inside the finiteness region of " +
                      describe(spec));
  }
  return std::visit(Overloaded{
                        [&](const Exponential& d) { return d.rate / ((d.rate - s) * (d.rate - s)); },
                        [&](const Deterministic& d) { return d.value * std::exp(s * d.value); },
                        [&](const Pareto&) { return moment_from_survival(spec, s, "pareto x-moment"); },
                        [&](const Gamma& d) { return d.shape / (d.rate - s) * std::pow(d.rate / (d.rate - s), d.shape); },
                        [&](const TiltedPareto&) { return moment_from_survival(spec, s, "tilted pareto x-moment"); },
                        [&](const Uniform& d) {
                          return detail::integrate_interval([&](double x) { return x * std::exp(s * x); }, d.lo, d.hi,
                                                            kMomentTol, "uniform x-moment") /
                                 (d.hi - d.lo);
                        },
                        [&](const Difference& d) {
                          // d/ds [phi_B(s) phi_A(-s)]
                          return mgf_x_moment(*d.b, s) * mgf(*d.a, -s) - mgf(*d.b, s) * mgf_x_moment(*d.a, -s);
                        },
                    },
                    spec.family());
}

double mean(const DistributionSpec& spec) {
  return std::visit(Overloaded{
                        [](const Exponential& d) { return 1.0 / d.rate; },
                        [](const Deterministic& d) { return d.value; },
                        [](const Pareto& d) { return d.shape > 1.0 ? d.scale / (d.shape - 1.0) : kInf; },
                        [](const Gamma& d) { return d.shape / d.rate; },
                        [&](const TiltedPareto&) {
                          return detail::integrate_half_line([&](double x) { return survival(spec, x); }, kMomentTol,
                                                             "tilted pareto mean");
                        },
                        [](const Uniform& d) { return 0.5 * (d.lo + d.hi); },
                        [](const Difference& d) { return mean(*d.b) - mean(*d.a); },
                    },
                    spec.family());
}

DistributionSpec tilt(const DistributionSpec& spec, double s) {
  if (s == 0.0) return spec;
  auto unsupported = [&]() -> DistributionSpec {
    throw UnsupportedTiltError("tilt: family '" + spec.family_name() + "' is not closed under exponential tilting");
  };
  auto check_domain = [&] {
    if (!(s < right_abscissa(spec) && s > left_abscissa(spec))) {
      throw DomainError("tilt: s = " + fmt_double(s) + " is outside the finiteness region of " + describe(spec));
    }
  };
  return std::visit(Overloaded{
                        [&](const Exponential& d) {
                          check_domain();
                          return DistributionSpec::exponential(d.rate - s);
                        },
                        [&](const Gamma& d) {
                          check_domain();
                          return DistributionSpec::gamma(d.shape, d.rate - s);
                        },
                        [&](const Deterministic&) { return spec; },
                        [&](const Difference& d) {
                          // Tilting B - A by s tilts B by s and A by -s.
                          return DistributionSpec::difference(tilt(*d.b, s), tilt(*d.a, -s));
                        },
                        [&](const auto&) { return unsupported(); },
                    },
                    spec.family());
}

TailClass tail_class(const DistributionSpec& spec) {
  using Kind = TailClass::Kind;
  return std::visit(Overloaded{
                        [](const Pareto&) { return TailClass{Kind::Subexponential, 0.0, 0.0}; },
                        [](const TiltedPareto& d) { return TailClass{Kind::SGamma, d.gamma, d.gamma}; },
                        [](const Difference& d) {
                          // A is non-negative, so the right tail of B - A is governed by B.
                          return tail_class(*d.b);
                        },
                        [&](const auto&) { return TailClass{Kind::Light, 0.0, right_abscissa(spec)}; },
                    },
                    spec.family());
}

bool is_lattice(const DistributionSpec& spec) {
  if (spec.is<Deterministic>()) return true;
  if (spec.is<Difference>()) return spec.b().is<Deterministic>() && spec.a().is<Deterministic>();
  return false;
}

}  // namespace rsl
