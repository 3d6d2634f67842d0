#include "multsys/lacunary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "multsys/error.hpp"

namespace multsys {

namespace {

constexpr double kRatioSlack = 1e-12;
constexpr double kZeroFrequency = 1e-12;

void validate_tau(const std::vector<double>& tau) {
  if (tau.empty()) throw Error(ErrorCode::NotLacunary, "empty sequence");
  for (double t : tau) {
    if (!std::isfinite(t)) throw Error(ErrorCode::NotLacunary, "non-finite frequency");
  }
  if (tau.front() < 1.0) throw Error(ErrorCode::TauTooSmall, "tau(1) = " + std::to_string(tau.front()) + " < 1");
}

double min_ratio(const std::vector<double>& tau) {
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < tau.size(); ++k) r = std::min(r, tau[k + 1] / tau[k]);
  return r;
}

void validate_subset(const LacunarySpec& spec, const Subset& s) {
  if (s.empty()) throw Error(ErrorCode::BadSubset, "empty subset");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] >= spec.size()) throw Error(ErrorCode::BadSubset, format_subset(s) + " exceeds sequence length");
    if (i > 0 && s[i - 1] >= s[i]) throw Error(ErrorCode::BadSubset, format_subset(s) + " is not strictly ascending");
  }
}

void require_lambda_above_two(const LacunarySpec& spec) {
  if (!(spec.lambda > 2.0)) {
    throw Error(ErrorCode::LambdaTooSmall, "needs lambda > 2, got " + std::to_string(spec.lambda));
  }
}

// sin(2 pi w) and cos(2 pi w) with w reduced mod 1 first.
double sin_turns(double w) { return std::sin(2.0 * std::numbers::pi * (w - std::round(w))); }
double cos_turns(double w) { return std::cos(2.0 * std::numbers::pi * (w - std::round(w))); }

}  // namespace

LacunarySpec build_tau_geometric(double lambda, double tau1, std::size_t n) {
  if (!(lambda > 1.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::NotLacunary, "geometric ratio must exceed 1");
  }
  if (n == 0) throw Error(ErrorCode::NotLacunary, "empty sequence");
  LacunarySpec spec;
  spec.tau.resize(n);
  for (std::size_t k = 0; k < n; ++k) spec.tau[k] = tau1 * std::pow(lambda, static_cast<double>(k));
  validate_tau(spec.tau);
  spec.lambda = lambda;
  return spec;
}

LacunarySpec build_tau_explicit(std::vector<double> tau, std::optional<double> lambda_claim) {
  validate_tau(tau);
  const double ratio = min_ratio(tau);
  LacunarySpec spec;
  if (lambda_claim) {
    if (!(*lambda_claim > 1.0)) throw Error(ErrorCode::NotLacunary, "claimed lambda must exceed 1");
    if (tau.size() > 1 && ratio < *lambda_claim * (1.0 - kRatioSlack)) {
      throw Error(ErrorCode::NotLacunary, "ratio " + std::to_string(ratio) + " below claimed lambda " +
                                              std::to_string(*lambda_claim));
    }
    spec.lambda = *lambda_claim;
  } else {
    if (tau.size() < 2) throw Error(ErrorCode::NotLacunary, "a single frequency needs a lambda claim");
    if (!(ratio > 1.0)) throw Error(ErrorCode::NotLacunary, "sequence is not increasing geometrically");
    spec.lambda = ratio;
  }
  spec.tau = std::move(tau);
  return spec;
}

double SignedFrequencyExpansion::evaluate(double x) const {
  double total = 0.0;
  for (const auto& t : terms) {
    double turns = t.frequency * x;
    total += t.coefficient * (t.kind == TrigKind::Sin ? sin_turns(turns) : cos_turns(turns));
  }
  return total;
}

SignedFrequencyExpansion expand_product(const LacunarySpec& spec, const Subset& subset) {
  validate_subset(spec, subset);
  SignedFrequencyExpansion out;
  out.terms.push_back({spec.tau[subset.back()], TrigKind::Sin, 1.0});
  for (std::size_t i = subset.size() - 1; i-- > 0;) {
    const double b = spec.tau[subset[i]];
    std::vector<ExpansionTerm> next;
    next.reserve(2 * out.terms.size());
    for (const auto& t : out.terms) {
      const double half = t.coefficient / 2.0;
      if (t.kind == TrigKind::Sin) {
        // sin A sin B = (cos(A-B) - cos(A+B)) / 2
        next.push_back({t.frequency - b, TrigKind::Cos, half});
        next.push_back({t.frequency + b, TrigKind::Cos, -half});
      } else {
        // cos A sin B = (sin(A+B) - sin(A-B)) / 2
        next.push_back({t.frequency - b, TrigKind::Sin, -half});
        next.push_back({t.frequency + b, TrigKind::Sin, half});
      }
    }
    out.terms = std::move(next);
  }
  return out;
}

double trig_integral(TrigKind kind, double omega) {
  if (std::abs(omega) < kZeroFrequency) return kind == TrigKind::Cos ? 1.0 : 0.0;
  const double denom = 2.0 * std::numbers::pi * omega;
  if (kind == TrigKind::Sin) return (1.0 - cos_turns(omega)) / denom;
  return sin_turns(omega) / denom;
}

double product_integral(const LacunarySpec& spec, const Subset& subset) {
  double total = 0.0;
  for (const auto& t : expand_product(spec, subset).terms) total += t.coefficient * trig_integral(t.kind, t.frequency);
  return total;
}

std::vector<double> signed_sums(const LacunarySpec& spec, const Subset& subset) {
  validate_subset(spec, subset);
  std::vector<double> sums{spec.tau[subset.back()]};
  for (std::size_t i = subset.size() - 1; i-- > 0;) {
    const double b = spec.tau[subset[i]];
    std::vector<double> next;
    next.reserve(2 * sums.size());
    for (double s : sums) {
      next.push_back(s - b);
      next.push_back(s + b);
    }
    sums = std::move(next);
  }
  return sums;
}

bool frequency_range_check(const LacunarySpec& spec, const Subset& subset) {
  require_lambda_above_two(spec);
  const double head = spec.tau[subset.empty() ? 0 : subset.back()];
  const double lo = (spec.lambda - 2.0) * head / (spec.lambda - 1.0);
  const double hi = spec.lambda * head / (spec.lambda - 1.0);
  for (double s : signed_sums(spec, subset)) {
    if (!(s > lo && s < hi)) return false;
  }
  return true;
}

double prop4_bound(double lambda) {
  if (!(lambda > 2.0)) throw Error(ErrorCode::LambdaTooSmall, "needs lambda > 2");
  return lambda * (lambda - 1.0) / (std::numbers::pi * (lambda - 2.0) * (lambda - 2.0));
}

TruncatedMu truncated_mu(const LacunarySpec& spec, std::size_t nu_max, unsigned threads, double tol) {
  require_lambda_above_two(spec);
  if (nu_max > spec.size()) {
    throw Error(ErrorCode::CapTooLarge, "nu_max " + std::to_string(nu_max) + " exceeds n = " + std::to_string(spec.size()));
  }
  const double lambda = spec.lambda;
  auto subsets = enumerate_family(spec.size(), IndexFamily::cardinality_cap(nu_max));

  TruncatedMu out;
  out.per_head_bounds.resize(subsets.size());
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto& entry = out.per_head_bounds[i];
      entry.subset = subsets[i];
      entry.integral = product_integral(spec, subsets[i]);
      entry.bound = (lambda - 1.0) / (std::numbers::pi * (lambda - 2.0) * spec.tau[subsets[i].back()]);
      entry.holds = std::abs(entry.integral) <= entry.bound + tol;
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1 || subsets.size() < 2 * threads) {
    run(0, subsets.size());
  } else {
    std::vector<std::thread> workers;
    std::size_t chunk = (subsets.size() + threads - 1) / threads;
    for (std::size_t b = 0; b < subsets.size(); b += chunk) workers.emplace_back(run, b, std::min(subsets.size(), b + chunk));
    for (auto& w : workers) w.join();
  }

  bool all = true;
  for (const auto& e : out.per_head_bounds) {
    out.mu_truncated += std::abs(e.integral);
    all = all && e.holds;
  }
  out.prop4_bound = prop4_bound(lambda);
  const double n = static_cast<double>(spec.size());
  out.tail_estimate = (lambda - 1.0) * std::pow(2.0, n) /
                      (std::numbers::pi * (lambda - 2.0) * (lambda - 2.0) * spec.tau.back());
  out.holds = all && out.mu_truncated <= out.prop4_bound + tol;
  return out;
}

std::vector<LacunaryPart> split_lacunary(const LacunarySpec& spec) {
  if (!(spec.lambda > 1.0)) throw Error(ErrorCode::NotLacunary, "lambda must exceed 1");
  std::size_t s = 1;
  if (spec.lambda < 3.0) s = static_cast<std::size_t>(std::ceil(std::log(3.0) / std::log(spec.lambda) - kRatioSlack));
  s = std::max<std::size_t>(s, 1);

  std::vector<LacunaryPart> parts;
  for (std::size_t start = 0; start < std::min(s, spec.size()); ++start) {
    LacunaryPart part;
    for (std::size_t k = start; k < spec.size(); k += s) {
      part.indices.push_back(k);
      part.spec.tau.push_back(spec.tau[k]);
    }
    // Each step spans s ratios of at least lambda each.
    double certified = std::pow(spec.lambda, static_cast<double>(s));
    if (part.spec.tau.size() > 1) certified = std::min(certified, min_ratio(part.spec.tau));
    part.spec.lambda = certified;
    parts.push_back(std::move(part));
  }
  return parts;
}

}  // namespace multsys
