#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>

#include "rsl/random.hpp"

namespace rsl {

struct Exponential {
  double rate;
};

// Point mass at `value`.
struct Deterministic {
  double value;
};

// Lomax form: P(X > x) = (1 + x/scale)^-shape on x >= 0.
struct Pareto {
  double shape;
  double scale;
};

struct Gamma {
  double shape;
  double rate;
};

// P(X > x) = (1 + x/scale)^-beta * exp(-gamma x) on x >= 0; beta > 1.
struct TiltedPareto {
  double gamma;
  double beta;
  double scale;
};

struct Uniform {
  double lo;
  double hi;
};

class DistributionSpec;

// X = B - A with B, A independent non-negative laws.
struct Difference {
  std::shared_ptr<const DistributionSpec> b;
  std::shared_ptr<const DistributionSpec> a;
};

// Immutable parametric law. Construct through the named factories, which
// validate parameter ranges and throw ValidationError.
class DistributionSpec {
 public:
  using Family = std::variant<Exponential, Deterministic, Pareto, Gamma, TiltedPareto, Uniform, Difference>;

  static DistributionSpec exponential(double rate);
  static DistributionSpec deterministic(double value);
  static DistributionSpec pareto(double shape, double scale);
  static DistributionSpec gamma(double shape, double rate);
  static DistributionSpec tilted_pareto(double gamma, double beta, double scale);
  static DistributionSpec uniform(double lo, double hi);
  static DistributionSpec difference(DistributionSpec b, DistributionSpec a);

  const Family& family() const { return family_; }

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(family_);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(family_);
  }

  // Components of a Difference; throws ValidationError otherwise.
  const DistributionSpec& b() const;
  const DistributionSpec& a() const;

  // Support contained in [0, inf).
  bool non_negative() const;

  // Family keyword as used in config files ("exponential", "difference", ...).
  std::string family_name() const;

  friend bool operator==(const DistributionSpec& lhs, const DistributionSpec& rhs);

 private:
  explicit DistributionSpec(Family family) : family_(std::move(family)) {}

  Family family_;
};

// Canonical one-line rendering; stable across runs and platforms.
std::string describe(const DistributionSpec& spec);
// FNV-1a 64 of describe(spec).
std::uint64_t digest(const DistributionSpec& spec);

struct TailClass {
  enum class Kind { Subexponential, SGamma, Light };
  Kind kind;
  // Exponential rate of the S(gamma) class; 0 unless kind == SGamma.
  double gamma = 0.0;
  // sup{s : E[exp(sX)] < inf}; +inf for bounded right tails.
  double abscissa = 0.0;
};

const char* to_string(TailClass::Kind kind);

double sample(const DistributionSpec& spec, RandomStream& rng);

// P(X > x). Closed form except for Difference, which integrates the
// B-survival against the law of A (relative tolerance 1e-10).
double survival(const DistributionSpec& spec, double x);

// phi(s) = E[exp(sX)], +inf where the moment diverges.
double mgf(const DistributionSpec& spec, double s);

// E[X exp(sX)] for s strictly inside the finiteness region; DomainError otherwise.
double mgf_x_moment(const DistributionSpec& spec, double s);

// Law with density reweighted by exp(sx)/phi(s). Exponential, Gamma,
// Deterministic and differences of these are closed under tilting; other
// families throw UnsupportedTiltError (s == 0 always returns the input).
DistributionSpec tilt(const DistributionSpec& spec, double s);

TailClass tail_class(const DistributionSpec& spec);

// Right and left ends of the open finiteness region of phi.
double right_abscissa(const DistributionSpec& spec);
double left_abscissa(const DistributionSpec& spec);

// E[X]; may be +-inf.
double mean(const DistributionSpec& spec);

// Point masses, and differences of two point masses.
bool is_lattice(const DistributionSpec& spec);

// Upper quantile: the x with P(X > x) = tail for non-negative families.
double upper_quantile(const DistributionSpec& spec, double tail);

}  // namespace rsl
