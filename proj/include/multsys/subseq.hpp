#pragma once

// Parseval-based index selection and greedy extraction of a quasi-multiplicative
// subsequence from a bounded orthogonal system on [0, 1).

#include <cstddef>
#include <vector>

#include "multsys/moments.hpp"
#include "multsys/stepfn.hpp"

namespace multsys {

struct OrthogonalSystem {
  std::vector<StepFunction> functions;  // on [0, 1)
  bool certified_orthogonal = false;
  Rational sup_bound{1};  // M >= max |phi_k|

  std::size_t size() const { return functions.size(); }
  /// Functions scaled by 1/M, so every sup norm (hence L2 norm) is <= 1.
  std::vector<StepFunction> normalized() const;
};

/// Checks pairwise orthogonality exactly and records M = max sup norm.
/// Throws NotOrthogonal on the first nonzero inner product.
OrthogonalSystem certify(std::vector<StepFunction> functions);

/// The 2^m Walsh functions in Paley order (w_0 = 1, w_1 = r_1, w_2 = r_2,
/// w_3 = r_1 r_2, ...) on 2^m dyadic pieces. m <= 12.
OrthogonalSystem walsh_system(unsigned m);

struct SelectionResult {
  std::size_t index = 0;  // zero-based position in the candidate list
  Rational achieved_sum;  // sum_j |E(f_j phi_index)|
  Rational bound_squared;  // m * sum_j ||f_j||_2^2 / n
  bool holds = false;      // achieved_sum^2 <= bound_squared
};

/// Index minimizing sum_j |E(f_j phi_l)| over pairwise orthogonal candidates
/// with ||phi_l||_2 <= 1; ties go to the smallest index. With
/// `verify_candidates` the orthogonality and norms are checked exactly.
SelectionResult lemma5_select(std::span<const StepFunction> candidates, std::span<const StepFunction> targets,
                              bool verify_candidates = true, unsigned threads = 1);

struct SelectionStep {
  std::size_t step = 0;         // m
  std::size_t window_lo = 0;    // one-based, inclusive
  std::size_t window_hi = 0;    // one-based, exclusive, after truncation
  bool full_window = false;     // window was not truncated by the system size
  std::size_t chosen = 0;       // one-based
  std::size_t targets = 0;      // 2^m: every product of chosen functions, empty one included
  Rational per_step_sum;
  Rational per_step_bound_squared;
  double per_step_bound = 0.0;  // sqrt of the above, informational
  bool within_bound = false;    // per_step_sum^2 <= per_step_bound_squared
  bool below_half_power = false;  // per_step_sum < 2^-m
};

struct SelectionCertificate {
  std::vector<std::size_t> chosen_indices;  // one-based, ascending
  std::vector<SelectionStep> steps;
  Rational head_term;  // |E phi_{n_1}|
  Rational total;      // head_term + sum of per_step_sum
  std::size_t window_base = 8;
};

/// n_1 = 1, then for m = 1..steps picks n_{m+1} from [rho^m, rho^(m+1)).
/// Throws WindowExhausted when a window is empty and CapacityExceeded
/// beyond 16 steps.
SelectionCertificate greedy_subsequence(const OrthogonalSystem& sys, std::size_t rho, std::size_t steps,
                                        unsigned threads = 1);

/// Normalized chosen functions as a (-1, 1)-bounded system.
BoundedSystem selected_system(const OrthogonalSystem& sys, std::span<const std::size_t> chosen_one_based);

/// mu over every nonempty subset of the chosen functions.
Rational selected_mu(const OrthogonalSystem& sys, const SelectionCertificate& cert);

struct MergedSelection {
  std::vector<std::size_t> indices;  // one-based union, ascending
  Rational mu;                       // recomputed directly
  Rational certificate_sum;          // a.total + b.total, for comparison only
};

/// Interleaves two selections from the same system and recomputes mu of the union.
MergedSelection merge_selections(const OrthogonalSystem& sys, const SelectionCertificate& a,
                                 const SelectionCertificate& b);

}  // namespace multsys
