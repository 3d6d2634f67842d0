#pragma once

// Reflection-symmetric generators on [0, 1) and their dyadic dilates.

#include <cstddef>
#include <optional>
#include <vector>

#include "multsys/inequalities.hpp"
#include "multsys/moments.hpp"
#include "multsys/reduction.hpp"

namespace multsys {

struct ReflectionGenerator {
  StepFunction f;    // on [0, 1/4)
  StepFunction phi;  // on [0, 1)
};

/// phi = f(x) on [0,1/4), f(1/2-x) on [1/4,1/2), -f(x-1/2) on [1/2,3/4),
/// -f(1-x) on [3/4,1). The sign change on [1/2,1) makes every dilate mean
/// zero; 1/4, 1/2 and 3/4 are always breakpoints.
ReflectionGenerator build_phi(const StepFunction& f);

/// phi_k(x) = phi(2^k x mod 1) for k = 1..n, n <= 12, with A_k = min phi and
/// B_k = max phi (or -1, 1 when phi vanishes).
BoundedSystem dilated_system(const ReflectionGenerator& gen, std::size_t n);

struct RubinshteinReport {
  std::size_t n = 0;
  std::size_t l = 0;
  Rational mu;
  bool multiplicative = false;
  std::optional<DominationReport> domination;  // absent for the empty system
  std::vector<TailReport> tails;
  /// Even-p Khintchin check at p = 4, when ||f|| <= 1 and l >= min(4, n).
  std::optional<KhintchinReport> khintchine;
  bool holds = false;
};

/// mu over M_l of the dilated system, then domination under `phi` with unit
/// coefficients and the tail bound at the given levels (default: n B j / 4,
/// j = 1..4).
RubinshteinReport verify_rubinshtein(const StepFunction& f, std::size_t n, std::size_t l,
                                     const ConvexSpec& phi = ConvexSpec::power(4),
                                     std::vector<Rational> lambdas = {});

}  // namespace multsys
