#pragma once

// Lacunary trigonometric systems t_k(x) = sin(2 pi tau(k) x) on [0, 1).
// Binary64 throughout: the integrals involved are irrational.

#include <cstddef>
#include <optional>
#include <vector>

#include "multsys/moments.hpp"

namespace multsys {

struct LacunarySpec {
  std::vector<double> tau;  // ascending, tau[0] >= 1
  double lambda = 0.0;      // certified: tau[k+1] >= lambda * tau[k]

  std::size_t size() const { return tau.size(); }
};

/// tau(k) = tau1 * lambda^(k-1), k = 1..n.
LacunarySpec build_tau_geometric(double lambda, double tau1, std::size_t n);

/// Validates an explicit sequence. With a claim, every ratio must reach it
/// (relative slack 1e-12) and the claim is certified; without one, the
/// smallest ratio is certified.
LacunarySpec build_tau_explicit(std::vector<double> tau, std::optional<double> lambda_claim = std::nullopt);

enum class TrigKind { Sin, Cos };

struct ExpansionTerm {
  double frequency = 0.0;  // signed tau combination
  TrigKind kind = TrigKind::Sin;
  double coefficient = 0.0;  // +-1/2^(nu-1)
};

struct SignedFrequencyExpansion {
  std::vector<ExpansionTerm> terms;

  /// Sum of the terms at x.
  double evaluate(double x) const;
};

/// prod_{k in subset} sin(2 pi tau(k) x) as 2^(nu-1) sines or cosines,
/// expanded from the largest index downward.
SignedFrequencyExpansion expand_product(const LacunarySpec& spec, const Subset& subset);

/// Integral over [0, 1) of a single sin or cos at frequency omega.
double trig_integral(TrigKind kind, double omega);

/// Integral over [0, 1) of the product, from the expansion.
double product_integral(const LacunarySpec& spec, const Subset& subset);

/// All signed sums tau(n_nu) +- ... +- tau(n_1).
std::vector<double> signed_sums(const LacunarySpec& spec, const Subset& subset);

/// True iff every signed sum lies strictly in
/// ((lambda-2) tau(head)/(lambda-1), lambda tau(head)/(lambda-1)). Needs lambda > 2.
bool frequency_range_check(const LacunarySpec& spec, const Subset& subset);

struct CollectionBound {
  Subset subset;
  double integral = 0.0;
  double bound = 0.0;  // (lambda-1) / (pi (lambda-2) tau(head))
  bool holds = false;
};

struct TruncatedMu {
  double mu_truncated = 0.0;
  std::vector<CollectionBound> per_head_bounds;
  double prop4_bound = 0.0;  // lambda (lambda-1) / (pi (lambda-2)^2)
  /// Analytic bound on the contribution of all heads beyond n.
  double tail_estimate = 0.0;
  bool holds = false;
};

/// Sum of |product_integral| over all subsets of size <= nu_max, with the
/// per-collection and global bounds checked at absolute tolerance `tol`.
TruncatedMu truncated_mu(const LacunarySpec& spec, std::size_t nu_max, unsigned threads = 1, double tol = 1e-9);

double prop4_bound(double lambda);

struct LacunaryPart {
  std::vector<std::size_t> indices;  // zero-based positions in the parent spec
  LacunarySpec spec;
};

/// Splits into ceil(log_lambda 3) interleaved subsequences, each certified
/// with lambda' >= 3. A spec with lambda >= 3 comes back whole.
std::vector<LacunaryPart> split_lacunary(const LacunarySpec& spec);

}  // namespace multsys
