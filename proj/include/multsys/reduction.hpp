#pragma once

// Reduction of a bounded step-function system to a two-valued independent one:
// unimodular building blocks, extension to [0, 1 + mu), binarization, dilation.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "multsys/moments.hpp"
#include "multsys/stepfn.hpp"

namespace multsys {

/// nu +-1-valued functions on [0, length) with pointwise product 1 and zero
/// integral over every nonempty proper sub-product. Character construction:
/// f_k = r_k for k < nu, f_nu = r_1 ... r_{nu-1}, on 2^(nu-1) equal pieces.
std::vector<StepFunction> lemma00_walsh(std::size_t nu, const Rational& length);

/// Same contract via repeated sign flips on halves of every maximal
/// constancy interval, one pass per proper subset. Needs up to
/// 2^(2^nu - 2) pieces, so only usable for nu <= 4 under the default cap.
std::vector<StepFunction> lemma00_flip(std::size_t nu, const Rational& length);

/// Extends a system on [0, 1) to [0, 1 + mu) so that every family moment
/// vanishes; block lengths and signs follow the normalized moment table.
BoundedSystem extend_system(const BoundedSystem& sys, const IndexFamily& family, const MomentOptions& options = {});

struct SampledStep {
  StepFunction function;
  bool heuristic = true;  // sampling cannot certify closeness in measure
  Rational delta;
};

/// Right-continuous piecewise-constant interpolant through (x, y) samples on
/// [0, 1); the value at the first sample also covers [0, x_0).
SampledStep approx_by_steps(std::span<const std::pair<Rational, Rational>> samples, const Rational& delta);

/// Replaces the k-th function (zero-based), or all functions in ascending
/// order when `which` is empty, by an {A_k, B_k}-valued step function with
/// the same integral on every constancy interval of the current system.
BoundedSystem binarize(const BoundedSystem& sys, std::optional<std::size_t> which = std::nullopt);

struct IndependenceFailure {
  Subset subset;
  std::vector<bool> upper;  // pattern: true -> B_j, false -> A_j
  Rational joint;
  Rational product;
};

struct IndependenceReport {
  bool independent = true;
  std::vector<Rational> measure_lower;  // |{g_k = A_k}| / T
  std::vector<bool> marginals_match;    // measure_lower == B/(B-A)
  std::vector<IndependenceFailure> failures;
  std::size_t patterns_checked = 0;
};

/// Checks that joint level-set measures factor over every subset in the family.
IndependenceReport check_independence(const BoundedSystem& sys, const IndexFamily& family);

struct StageTable {
  std::string stage;
  MomentTable table;
};

struct ReductionTrace {
  Rational mu;
  BoundedSystem original;
  BoundedSystem extended;   // on [0, 1 + mu)
  BoundedSystem binarized;  // on [0, 1 + mu), two-valued
  BoundedSystem xi;         // on [0, 1)
  IndexFamily family = IndexFamily::cardinality_cap(1);
  std::vector<StageTable> stage_tables;
};

ReductionTrace reduce_to_independent(const BoundedSystem& sys, const IndexFamily& family,
                                     const MomentOptions& options = {});

struct DominationReport {
  double lhs = 0.0;
  double rhs = 0.0;
  std::optional<Rational> lhs_exact;
  std::optional<Rational> rhs_exact;
  Rational mu;
  bool holds = false;
  bool exact_comparison = false;
  std::string phi;
};

/// E[Phi(sum a_k phi_k)] <= (1 + mu) E[Phi(sum a_k xi_k)].
DominationReport verify_domination(const BoundedSystem& sys, const IndexFamily& family,
                                   std::span<const Rational> coeffs, const ConvexSpec& phi,
                                   double rel_tol = 1e-9);
DominationReport verify_domination(const ReductionTrace& trace, std::span<const Rational> coeffs,
                                   const ConvexSpec& phi, double rel_tol = 1e-9);

}  // namespace multsys
