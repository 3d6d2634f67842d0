#pragma once

// Exact piecewise-constant functions on half-open intervals [0, T).

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "multsys/rational.hpp"

namespace multsys {

/// Upper bound on the number of pieces any operation may produce.
/// Defaults to 2^20; the CLI overrides it from MULTSYS_PIECE_CAP.
std::size_t piece_cap();
void set_piece_cap(std::size_t cap);

/// Throws CapacityExceeded when `pieces` is above the current cap.
void check_piece_count(std::size_t pieces, std::string_view what);

using Breakpoints = std::vector<Rational>;

/// A step function on [0, T). Breakpoints are shared between functions that
/// were aligned onto a common partition, so copies are cheap and aligned
/// operands can be detected by pointer identity.
class StepFunction {
 public:
  /// Validated construction. Rationals are canonicalized; adjacent equal
  /// values are kept (see normalize()).
  static StepFunction make(std::vector<Rational> breakpoints, std::vector<Rational> values);
  static StepFunction constant(const Rational& value, const Rational& length);

  /// Zero-length function, the neutral element of concat().
  static StepFunction empty();

  /// Unchecked construction for callers that already hold a valid partition.
  StepFunction(std::shared_ptr<const Breakpoints> breakpoints, std::vector<Rational> values);

  const Rational& length() const { return breaks_->back(); }
  bool is_empty() const { return values_.empty(); }
  std::size_t pieces() const { return values_.size(); }

  std::span<const Rational> breakpoints() const { return *breaks_; }
  std::span<const Rational> values() const { return values_; }
  const std::shared_ptr<const Breakpoints>& shared_breakpoints() const { return breaks_; }

  Rational piece_length(std::size_t i) const { return (*breaks_)[i + 1] - (*breaks_)[i]; }

  /// Same partition and same values (representation equality).
  friend bool operator==(const StepFunction& a, const StepFunction& b);

 private:
  std::shared_ptr<const Breakpoints> breaks_;
  std::vector<Rational> values_;
};

StepFunction make_step(std::vector<Rational> breakpoints, std::vector<Rational> values);

/// Rewrites every function onto the sorted union of all breakpoints. All
/// outputs share one breakpoint vector.
std::vector<StepFunction> common_refinement(std::span<const StepFunction> fs);

StepFunction product(std::span<const StepFunction> fs);
StepFunction linear_combination(std::span<const Rational> coeffs, std::span<const StepFunction> fs);
StepFunction scale(const StepFunction& f, const Rational& factor);

Rational integral(const StepFunction& f);
Rational evaluate(const StepFunction& f, const Rational& x);

/// g(x) = f(factor * x) on [0, T / factor).
StepFunction dilate(const StepFunction& f, const Rational& factor);

/// f on [0, T1) followed by g shifted to [T1, T1 + T2). A zero-length
/// operand yields the other operand unchanged.
StepFunction concat(const StepFunction& f, const StepFunction& g);
StepFunction concat_all(std::span<const StepFunction> fs);

/// f restricted to [0, end), 0 < end <= T.
StepFunction restrict_to(const StepFunction& f, const Rational& end);

/// Merges adjacent pieces with equal values: the unique minimal representation.
StepFunction normalize(const StepFunction& f);

/// Pointwise equality on a common domain, independent of representation.
bool equivalent(const StepFunction& f, const StepFunction& g);

/// |{x : f(x) > level}|, strict.
Rational measure_above(const StepFunction& f, const Rational& level);
/// |{x : f(x) = level}|.
Rational measure_equal(const StepFunction& f, const Rational& level);

Rational min_value(const StepFunction& f);
Rational max_value(const StepFunction& f);

// Convex functionals ------------------------------------------------------

struct PowerPhi {
  double p;  // >= 1
};
struct ExpPhi {
  double gamma;  // > 0
};
struct HingeSquarePhi {
  double lambda;
};
struct AbsPhi {};

/// A convex map R -> R+.
class ConvexSpec {
 public:
  using Variant = std::variant<PowerPhi, ExpPhi, HingeSquarePhi, AbsPhi>;

  static ConvexSpec power(double p);
  static ConvexSpec exp(double gamma);
  static ConvexSpec hinge_square(double lambda);
  static ConvexSpec abs();

  /// "power:4", "exp:1", "hinge:0.5", "abs".
  static ConvexSpec parse(std::string_view text);

  double operator()(double t) const;

  /// Phi(t) exactly when it is rational for every rational t
  /// (integer powers and |t|); nullopt otherwise.
  std::optional<Rational> exact(const Rational& t) const;
  bool is_exact() const;

  std::string name() const;
  const Variant& variant() const { return phi_; }

 private:
  explicit ConvexSpec(Variant phi) : phi_(phi) {}
  Variant phi_;
};

struct ConvexValue {
  double approx = 0.0;
  std::optional<Rational> exact;
};

/// Sum over pieces of Phi(value) * piece_length (the integral, not divided by T).
ConvexValue convex_expectation(const StepFunction& f, const ConvexSpec& phi);

}  // namespace multsys
