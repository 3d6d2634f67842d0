#include "multsys/inequalities.hpp"

#include <cmath>
#include <numbers>

#include "multsys/error.hpp"

namespace multsys {

namespace {

bool is_even_integer(double p) { return std::floor(p) == p && std::fmod(p, 2.0) == 0.0; }

StepFunction sum_of(const BoundedSystem& sys) {
  if (sys.empty()) return StepFunction::constant(Rational(0), Rational(1));
  std::vector<Rational> ones(sys.size(), Rational(1));
  return linear_combination(ones, sys.functions());
}

Rational spread_of(const BoundedSystem& sys) {
  Rational total(0);
  for (std::size_t k = 0; k < sys.size(); ++k) {
    Rational width = sys.upper()[k] - sys.lower()[k];
    total += width * width;
  }
  return total;
}

}  // namespace

double khintchine_constant(double p) {
  if (!(p > 2.0) || !std::isfinite(p)) throw Error(ErrorCode::OutOfRange, "Khintchin constant needs p > 2");
  const double ratio = std::tgamma((p + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
  return std::numbers::sqrt2 * std::pow(ratio, 1.0 / p);
}

double khintchine_constant_pi_variant(double p) {
  if (!(p > 2.0) || !std::isfinite(p)) throw Error(ErrorCode::OutOfRange, "Khintchin constant needs p > 2");
  return std::numbers::sqrt2 * std::pow(std::tgamma((p + 1.0) / 2.0) / std::numbers::pi, 1.0 / p);
}

mpz_class odd_double_factorial(unsigned p) {
  if (p < 2 || p % 2 != 0) throw Error(ErrorCode::BadExponent, "(p-1)!! needs even p >= 2");
  mpz_class out = 1;
  for (unsigned k = p - 1; k > 1; k -= 2) out *= k;
  return out;
}

double double_factorial_constant(unsigned p) {
  return std::pow(odd_double_factorial(p).get_d(), 1.0 / static_cast<double>(p));
}

KhintchinReport verify_khintchine(const BoundedSystem& sys, std::span<const Rational> coeffs, double p,
                                  KhintchinMode mode, double rel_tol) {
  if (!(p > 2.0) || !std::isfinite(p)) throw Error(ErrorCode::OutOfRange, "Khintchin check needs p > 2");
  if (coeffs.size() != sys.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(coeffs.size()) + " coefficients for " +
                                               std::to_string(sys.size()) + " functions");
  }
  for (std::size_t k = 0; k < sys.size(); ++k) {
    for (const auto& v : sys.function(k).values()) {
      if (abs(v) > 1) {
        throw Error(ErrorCode::BoundViolation, "function " + std::to_string(k + 1) + " has sup norm above 1");
      }
    }
  }

  KhintchinReport report;
  report.p = p;
  report.mode = mode;
  const bool even = is_even_integer(p);

  if (mode == KhintchinMode::EvenInteger) {
    if (!even) throw Error(ErrorCode::BadExponent, "even-integer mode needs an even p");
    std::size_t l = std::min<std::size_t>(static_cast<std::size_t>(p), sys.size());
    report.mu = sys.empty() ? Rational(0) : multiplicative_error(sys, IndexFamily::cardinality_cap(l)).mu;
    if (*report.mu != 0) {
      throw Error(ErrorCode::NotMultiplicative, "system is not M_" + std::to_string(l) + "-multiplicative (mu = " +
                                                    to_string(*report.mu) + ")");
    }
    report.constant = double_factorial_constant(static_cast<unsigned>(p));
  } else {
    if (sys.size() <= 12) {
      report.mu = sys.empty() ? Rational(0) : multiplicative_error(sys, IndexFamily::cardinality_cap(sys.size())).mu;
    }
    report.constant = khintchine_constant(p);
  }
  report.constant_pi_variant = khintchine_constant_pi_variant(p);
  report.constant_discrepancy = std::abs(report.constant_pi_variant - khintchine_constant(p)) > 1e-12;

  Rational square_sum(0);
  for (const auto& a : coeffs) square_sum += a * a;
  report.rhs = report.constant * std::sqrt(to_double(square_sum));

  const StepFunction sum = sys.empty() ? StepFunction::constant(Rational(0), Rational(1))
                                       : linear_combination(coeffs, sys.functions());
  auto moment = convex_expectation(sum, ConvexSpec::power(p));
  const Rational domain = sys.domain_length();

  if (even) {
    const unsigned ip = static_cast<unsigned>(p);
    report.lhs_pth_power = *moment.exact / domain;
    report.rhs_pth_power = Rational(odd_double_factorial(ip)) * pow(square_sum, ip / 2);
    report.lhs_norm = std::pow(to_double(*report.lhs_pth_power), 1.0 / p);
    // (p-1)!! is the even-p value of K(p)^p in both modes.
    report.holds = *report.lhs_pth_power <= *report.rhs_pth_power;
  } else {
    report.lhs_norm = std::pow(moment.approx / to_double(domain), 1.0 / p);
    report.holds = report.lhs_norm <= report.rhs + rel_tol * report.rhs;
  }
  return report;
}

Rational rademacher_pnorm_oracle(std::span<const Rational> coeffs, unsigned p) {
  if (p == 0 || p % 2 != 0) throw Error(ErrorCode::BadExponent, "oracle needs an even p");
  if (coeffs.size() > 20) throw Error(ErrorCode::TooLarge, std::to_string(coeffs.size()) + " coefficients (max 20)");
  const std::size_t n = coeffs.size();
  const std::size_t patterns = std::size_t{1} << n;

  // Gray-code walk: one coefficient flips sign between consecutive patterns.
  Rational sum(0);
  for (const auto& a : coeffs) sum += a;
  Rational total = pow(sum, p);
  std::size_t gray = 0;
  for (std::size_t i = 1; i < patterns; ++i) {
    std::size_t next = i ^ (i >> 1);
    std::size_t bit = static_cast<std::size_t>(__builtin_ctzll(next ^ gray));
    if (next & (std::size_t{1} << bit)) {
      sum -= 2 * coeffs[bit];
    } else {
      sum += 2 * coeffs[bit];
    }
    gray = next;
    total += pow(sum, p);
  }
  return total / Rational(mpz_class(patterns));
}

double sharpness_ratio(std::size_t n, unsigned p) {
  std::vector<Rational> ones(n, Rational(1));
  double moment = to_double(rademacher_pnorm_oracle(ones, p));
  return std::pow(moment, 1.0 / p) / std::sqrt(static_cast<double>(n));
}

std::vector<TailReport> hoeffding_tails(const BoundedSystem& sys, std::span<const Rational> lambdas,
                                        const IndexFamily& family, double abs_tol) {
  for (const auto& lambda : lambdas) {
    if (lambda <= 0) throw Error(ErrorCode::NonPositiveLambda, "lambda = " + to_string(lambda));
  }
  const Rational mu = sys.empty() ? Rational(0) : multiplicative_error(sys, family).mu;
  auto out = hoeffding_tails_with_mu(sys, lambdas, mu, abs_tol);
  for (auto& r : out) r.mu_supplied = false;
  return out;
}

std::vector<TailReport> hoeffding_tails_with_mu(const BoundedSystem& sys, std::span<const Rational> lambdas,
                                                const Rational& mu, double abs_tol) {
  for (const auto& lambda : lambdas) {
    if (lambda <= 0) throw Error(ErrorCode::NonPositiveLambda, "lambda = " + to_string(lambda));
  }
  const Rational spread = spread_of(sys);
  const StepFunction sum = sum_of(sys);
  const Rational domain = sys.domain_length();

  std::vector<TailReport> out;
  out.reserve(lambdas.size());
  for (const auto& lambda : lambdas) {
    TailReport r;
    r.lambda = lambda;
    r.mu = mu;
    r.spread = spread;
    r.mu_supplied = true;
    r.exact_measure = measure_above(sum, lambda) / domain;
    const double l = to_double(lambda);
    // An empty sum never exceeds a positive level.
    r.bound = spread == 0 ? 0.0 : to_double(1 + mu) * std::exp(-2.0 * l * l / to_double(spread));
    r.holds = to_double(r.exact_measure) <= r.bound + abs_tol;
    out.push_back(std::move(r));
  }
  return out;
}

TailReport hoeffding_tail(const BoundedSystem& sys, const Rational& lambda, const IndexFamily& family,
                          double abs_tol) {
  const Rational levels[] = {lambda};
  return hoeffding_tails(sys, levels, family, abs_tol).front();
}

MgfCheck mgf_factor_check(const Rational& lower, const Rational& upper, double gamma) {
  if (!(lower < 0 && upper > 0)) throw Error(ErrorCode::BadBounds, "need A < 0 < B");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(ErrorCode::BadBounds, "need gamma > 0");
  const double a = to_double(lower);
  const double b = to_double(upper);
  MgfCheck out;
  out.lhs = (b * std::exp(gamma * a) - a * std::exp(gamma * b)) / (b - a);
  out.rhs = std::exp(gamma * gamma * (b - a) * (b - a) / 8.0);
  out.holds = out.lhs <= out.rhs + 1e-12;
  return out;
}

}  // namespace multsys
