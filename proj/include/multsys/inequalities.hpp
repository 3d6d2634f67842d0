#pragma once

// Khintchin-type norm bounds and Azuma-Hoeffding-type tail bounds.

#include <optional>
#include <string>
#include <vector>

#include "multsys/moments.hpp"

namespace multsys {

/// sqrt(2) * (Gamma((p+1)/2) / sqrt(pi))^(1/p), p > 2.
double khintchine_constant(double p);

/// The same expression with pi in place of sqrt(pi); kept only so reports can
/// show how far it is from the coherent constant.
double khintchine_constant_pi_variant(double p);

/// ((p-1)!!)^(1/p) for even p >= 2.
double double_factorial_constant(unsigned p);

/// (p-1)!! as an exact integer.
mpz_class odd_double_factorial(unsigned p);

enum class KhintchinMode { General, EvenInteger };

struct KhintchinReport {
  double p = 0.0;
  KhintchinMode mode = KhintchinMode::General;
  double constant = 0.0;
  double constant_pi_variant = 0.0;
  bool constant_discrepancy = false;  // pi variant differs by more than 1e-12
  double lhs_norm = 0.0;
  double rhs = 0.0;
  std::optional<Rational> lhs_pth_power;  // E|sum a_k phi_k|^p, when p is even
  std::optional<Rational> rhs_pth_power;  // (p-1)!! (sum a_k^2)^(p/2), when p is even
  bool holds = false;
  /// Over M_min(p,n) in even mode; over the full family in general mode when
  /// n <= 12, otherwise not computed.
  std::optional<Rational> mu;
};

/// ||sum a_k phi_k||_p <= K(p) (sum a_k^2)^(1/2) for a system with sup norms <= 1.
/// EvenInteger mode requires the system to be M_p-multiplicative.
KhintchinReport verify_khintchine(const BoundedSystem& sys, std::span<const Rational> coeffs, double p,
                                  KhintchinMode mode, double rel_tol = 1e-9);

/// E (sum a_k r_k)^p averaged over all 2^n sign patterns; n <= 20, p even.
Rational rademacher_pnorm_oracle(std::span<const Rational> coeffs, unsigned p);

/// ||r_1 + ... + r_n||_p / sqrt(n), from the sign-pattern oracle.
double sharpness_ratio(std::size_t n, unsigned p);

struct TailReport {
  Rational lambda;
  Rational exact_measure;
  double bound = 0.0;
  Rational mu;
  Rational spread;  // sum (B_k - A_k)^2
  bool holds = false;
  bool mu_supplied = false;  // mu was certified by the caller, not computed
};

/// |{sum phi_k > lambda}| <= (1 + mu) exp(-2 lambda^2 / sum (B_k - A_k)^2).
TailReport hoeffding_tail(const BoundedSystem& sys, const Rational& lambda, const IndexFamily& family,
                          double abs_tol = 1e-12);

/// Same check for many levels against one precomputed sum and mu.
std::vector<TailReport> hoeffding_tails(const BoundedSystem& sys, std::span<const Rational> lambdas,
                                        const IndexFamily& family, double abs_tol = 1e-12);

/// Variant for systems whose multiplicative error is known by construction
/// (e.g. Rademacher systems too large for the moment enumeration).
std::vector<TailReport> hoeffding_tails_with_mu(const BoundedSystem& sys, std::span<const Rational> lambdas,
                                                const Rational& mu, double abs_tol = 1e-12);

struct MgfCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// E exp(gamma xi) <= exp(gamma^2 (B-A)^2 / 8) for the mean-zero {A,B}-valued xi.
MgfCheck mgf_factor_check(const Rational& lower, const Rational& upper, double gamma);

}  // namespace multsys
