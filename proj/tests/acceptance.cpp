// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "multsys/error.hpp"
#include "multsys/inequalities.hpp"
#include "multsys/io.hpp"
#include "multsys/lacunary.hpp"
#include "multsys/reduction.hpp"
#include "multsys/rubinshtein.hpp"
#include "multsys/subseq.hpp"
#include "oracles.hpp"

using namespace multsys;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

Rational abs_q(const Rational& x) { return x < 0 ? Rational(-x) : x; }

// ---------------------------------------------------------------- 1
Outcome lemma00_suite() {
  Outcome o;
  for (std::size_t nu = 2; nu <= 4; ++nu) {
    for (int variant = 0; variant < 2; ++variant) {
      auto fs = variant == 0 ? lemma00_walsh(nu, Rational(1)) : lemma00_flip(nu, Rational(1));
      const std::string tag = (variant == 0 ? "walsh nu=" : "flip nu=") + std::to_string(nu);
      auto grid = oracle::merged_grid(fs);
      for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        Rational mid = (grid[i] + grid[i + 1]) / 2;
        Rational p(1);
        for (const auto& f : fs) p *= oracle::eval(f, mid);
        o.require(p == 1, tag + ": full product not 1");
      }
      for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << nu); ++mask) {
        std::vector<StepFunction> sel;
        for (std::size_t k = 0; k < nu; ++k) {
          if (mask >> k & 1U) sel.push_back(fs[k]);
        }
        o.require(oracle::product_integral(sel) == 0, tag + ": proper sub-product with nonzero integral");
      }
    }
  }
  o.detail = o.ok ? "nu in {2,3,4}, walsh and flip" : o.detail;
  return o;
}

// ---------------------------------------------------------------- 2
Outcome domination_suite() {
  Outcome o;
  std::mt19937_64 rng(1002);
  const ConvexSpec specs[] = {ConvexSpec::power(2), ConvexSpec::power(4), ConvexSpec::exp(1)};
  for (int trial = 0; trial < 100; ++trial) {
    auto sys = oracle::random_system(rng, 1 + trial % 4, 8);
    const auto family = IndexFamily::cardinality_cap(sys.size());
    auto trace = reduce_to_independent(sys, family);
    auto coeffs = oracle::random_coeffs(rng, sys.size());
    for (const auto& phi : specs) {
      auto r = verify_domination(trace, coeffs, phi, 1e-9);
      const bool even = phi.is_exact();
      o.require(r.exact_comparison == even, "comparison mode mismatch for " + r.phi);
      o.require(r.holds, "trial " + std::to_string(trial) + " " + r.phi + " violated");
    }
  }
  if (o.ok) o.detail = "100 systems x {power:2, power:4, exp:1}";
  return o;
}

// ---------------------------------------------------------------- 3
Outcome moment_preservation() {
  Outcome o;
  std::mt19937_64 rng(1003);
  for (int trial = 0; trial < 50; ++trial) {
    auto sys = oracle::random_system(rng, 1 + trial % 5, 6);
    auto bin = binarize(sys);
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << sys.size()); ++mask) {
      std::vector<StepFunction> a, b;
      for (std::size_t k = 0; k < sys.size(); ++k) {
        if (mask >> k & 1U) {
          a.push_back(sys.function(k));
          b.push_back(bin.function(k));
        }
      }
      o.require(oracle::product_integral(a) == oracle::product_integral(b),
                "trial " + std::to_string(trial) + " moment changed");
    }
  }
  if (o.ok) o.detail = "50 systems, n <= 5, all 2^n - 1 moments";
  return o;
}

// ---------------------------------------------------------------- 4
Outcome independence_suite() {
  Outcome o;
  std::mt19937_64 rng(1004);
  std::size_t runs = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto sys = oracle::random_system(rng, 1 + trial % 5, 6);
    const auto family = IndexFamily::cardinality_cap(1 + static_cast<std::size_t>(trial) % sys.size());
    auto trace = reduce_to_independent(sys, family);
    auto report = check_independence(trace.xi, family);
    o.require(report.independent, "trial " + std::to_string(trial) + " xi not independent");
    for (std::size_t k = 0; k < sys.size(); ++k) {
      const Rational& a = trace.xi.lower()[k];
      const Rational& b = trace.xi.upper()[k];
      Rational expected = b / (b - a);
      o.require(report.measure_lower[k] == expected, "marginal mismatch");
    }
    ++runs;
  }
  auto dup = BoundedSystem::unit({io::rademacher_system(1).function(0), io::rademacher_system(1).function(0)});
  o.require(check_independence(reduce_to_independent(dup, IndexFamily::cardinality_cap(2)).xi,
                               IndexFamily::cardinality_cap(2))
                .independent,
            "duplicated r1 xi not independent");
  if (o.ok) o.detail = std::to_string(runs + 1) + " pipeline runs";
  return o;
}

// ---------------------------------------------------------------- 5
Outcome khintchine_even() {
  Outcome o;
  std::mt19937_64 rng(1005);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial) % 12;
    auto coeffs = oracle::random_coeffs(rng, n);
    auto sys = io::rademacher_system(n);
    for (unsigned p : {4U, 6U, 8U}) {
      const Rational lhs = rademacher_pnorm_oracle(coeffs, p);
      o.require(lhs == oracle::sign_pattern_moment(coeffs, p), "library oracle disagrees with sign enumeration");
      Rational sq(0);
      for (const auto& a : coeffs) sq += a * a;
      Rational rhs = Rational(odd_double_factorial(p));
      for (unsigned i = 0; i < p / 2; ++i) rhs *= sq;
      o.require(lhs <= rhs, "lhs^p > (p-1)!! (sum a^2)^(p/2)");
      if (n <= 10) {
        auto r = verify_khintchine(sys, coeffs, p, KhintchinMode::EvenInteger);
        o.require(r.lhs_pth_power && *r.lhs_pth_power == lhs, "step-function moment disagrees with oracle");
        o.require(r.holds, "verify_khintchine reported a violation");
      }
    }
  }
  std::ostringstream ratios;
  double prev = 0;
  for (std::size_t n : {4U, 8U, 12U}) {
    std::vector<Rational> ones(n, Rational(1));
    const double m4 = rademacher_pnorm_oracle(ones, 4).get_d();
    const double ratio = std::pow(m4, 0.25) / std::sqrt(static_cast<double>(n));
    o.require(ratio > prev, "sharpness ratio not increasing");
    o.require(ratio < std::pow(3.0, 0.25), "sharpness ratio above 3^(1/4)");
    prev = ratio;
    ratios << " n=" << n << ":" << ratio;
  }
  o.require(prev > 1.28, "ratio at n=12 not above 1.28");
  if (o.ok) o.detail = "30 coefficient draws x p in {4,6,8}; ratios" + ratios.str();
  return o;
}

// ---------------------------------------------------------------- 6
Outcome constant_coherence() {
  Outcome o;
  for (unsigned p : {4U, 6U, 8U, 10U}) {
    const double gamma_form = khintchine_constant(p);
    const double df = double_factorial_constant(p);
    o.require(std::abs(gamma_form - df) < 1e-12, "p=" + std::to_string(p) + " constants differ");
  }
  const Rational ones[] = {Rational(1), Rational(1)};
  auto r = verify_khintchine(io::rademacher_system(2), ones, 4, KhintchinMode::General);
  const double gap = std::abs(khintchine_constant_pi_variant(4) - khintchine_constant(4));
  o.require(gap > 1e-2, "pi variant too close at p=4");
  o.require(r.constant_discrepancy, "pi variant discrepancy not flagged");
  if (o.ok) {
    std::ostringstream s;
    s << "p in {4,6,8,10}; pi variant gap at p=4: " << gap << " (flagged)";
    o.detail = s.str();
  }
  return o;
}

// ---------------------------------------------------------------- 7
Outcome tail_bounds() {
  Outcome o;
  std::mt19937_64 rng(1007);
  std::uniform_int_distribution<long> numer(1, 999);
  std::size_t checks = 0;
  for (std::size_t n : {2U, 5U, 8U, 10U, 14U, 20U}) {
    auto sys = io::rademacher_system(n);
    std::vector<Rational> lambdas;
    const std::size_t count = n == 20 ? 10 : 8;
    for (std::size_t i = 0; i < count; ++i) {
      Rational l(numer(rng) * static_cast<long>(n), 1000);
      l.canonicalize();
      lambdas.push_back(l);
    }
    // Exact mu for small n; above that the Rademacher system is multiplicative
    // by construction (every sub-product is a nonconstant Walsh function).
    auto reports = n <= 10 ? hoeffding_tails(sys, lambdas, IndexFamily::cardinality_cap(n))
                           : hoeffding_tails_with_mu(sys, lambdas, Rational(0));
    for (const auto& r : reports) {
      o.require(r.mu == 0, "Rademacher mu nonzero");
      o.require(r.exact_measure == oracle::rademacher_tail(static_cast<unsigned>(n), r.lambda),
                "measure disagrees with binomial oracle");
      o.require(r.holds, "n=" + std::to_string(n) + " tail bound violated");
      ++checks;
    }
  }
  auto r1 = io::rademacher_system(1).function(0);
  auto dup = BoundedSystem::unit({r1, r1});
  std::vector<Rational> lambdas;
  for (long i = 1; i <= 20; ++i) lambdas.push_back(ratio(i, 10));
  for (const auto& r : hoeffding_tails(dup, lambdas, IndexFamily::cardinality_cap(2))) {
    o.require(r.mu == 1, "duplicated r1 mu != 1");
    o.require(r.holds, "duplicated r1 tail bound violated");
    ++checks;
  }
  if (o.ok) o.detail = std::to_string(checks) + " levels, Rademacher n <= 20 and duplicated r1";
  return o;
}

// ---------------------------------------------------------------- 8 and 9
double prop4_closed(double lambda) { return lambda * (lambda - 1) / (std::numbers::pi * (lambda - 2) * (lambda - 2)); }

Outcome proposition4() {
  Outcome o;
  std::size_t collections = 0;
  for (double lambda : {2.5, 3.0, 4.0, 8.0}) {
    for (std::size_t n : {4U, 6U, 8U}) {
      auto spec = build_tau_geometric(lambda, 1, n);
      auto r = truncated_mu(spec, std::min<std::size_t>(4, n));
      for (const auto& c : r.per_head_bounds) {
        const double head = spec.tau[c.subset.back()];
        const double bound = (lambda - 1) / (std::numbers::pi * (lambda - 2) * head);
        o.require(std::abs(c.integral) <= bound + 1e-9, "per-collection bound violated");
        ++collections;
      }
      o.require(r.mu_truncated <= prop4_closed(lambda) + 1e-9, "mu_truncated above lambda(lambda-1)/(pi(lambda-2)^2)");
      o.require(std::abs(r.prop4_bound - prop4_closed(lambda)) < 1e-12, "prop4 bound formula");
    }
  }
  o.require(std::abs(prop4_closed(3) - 6 / std::numbers::pi) < 1e-12, "lambda=3 bound not 6/pi");

  // Closed form against adaptive Gauss-Kronrod on random subsets.
  std::mt19937_64 rng(1008);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0;
  const double lambdas[] = {2.5, 3.0, 4.0, 8.0};
  for (int trial = 0; trial < 200; ++trial) {
    const double lambda = lambdas[trial % 4];
    // heads up to tau ~ 8^5 keep the quadrature oracle within its panel cap
    const std::size_t n = lambda == 8.0 ? 6 : 8;
    auto spec = build_tau_geometric(lambda, 1 + 2 * u(rng), n);
    Subset s;
    for (std::size_t k = 0; k < n && s.size() < 4; ++k) {
      if (rng() & 1) s.push_back(k);
    }
    if (s.empty()) s.push_back(static_cast<std::size_t>(rng() % n));
    double max_freq = 0;
    for (auto k : s) max_freq += spec.tau[k];
    const double closed = product_integral(spec, s);
    const double numeric = oracle::quad(
        [&](double x) {
          double p = 1;
          for (auto k : s) p *= std::sin(2 * std::numbers::pi * spec.tau[k] * x);
          return p;
        },
        max_freq);
    worst = std::max(worst, std::abs(closed - numeric));
  }
  o.require(worst < 1e-9, "closed form vs quadrature disagreement");
  if (o.ok) {
    std::ostringstream s;
    s << collections << " collections; quadrature max error " << worst;
    o.detail = s.str();
  }
  return o;
}

Outcome frequency_containment() {
  Outcome o;
  std::size_t sums = 0;
  for (double lambda : {2.5, 3.0, 4.0, 8.0}) {
    for (std::size_t n : {4U, 6U, 8U}) {
      auto spec = build_tau_geometric(lambda, 1, n);
      for (const auto& s : enumerate_family(n, IndexFamily::cardinality_cap(std::min<std::size_t>(4, n)))) {
        const double head = spec.tau[s.back()];
        const double lo = (lambda - 2) * head / (lambda - 1);
        const double hi = lambda * head / (lambda - 1);
        auto ss = signed_sums(spec, s);
        o.require(ss.size() == (std::size_t{1} << (s.size() - 1)), "wrong number of signed sums");
        for (double v : ss) {
          o.require(v > lo && v < hi, "signed sum outside the open interval");
          ++sums;
        }
        o.require(frequency_range_check(spec, s), "frequency_range_check disagrees");
      }
    }
  }
  if (o.ok) o.detail = std::to_string(sums) + " signed sums, zero violations";
  return o;
}

// ---------------------------------------------------------------- 10
Outcome selection() {
  Outcome o;
  std::mt19937_64 rng(1010);
  auto w = walsh_system(6);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::size_t> idx(w.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::size_t n = 1 + rng() % 64;
    std::vector<StepFunction> cands;
    for (std::size_t i = 0; i < n; ++i) {
      Rational c = oracle::random_rational(rng, Rational(1, 4), Rational(1), 8);
      cands.push_back(scale(w.functions[idx[i]], rng() & 1 ? c : Rational(-c)));
    }
    const std::size_t m = 1 + rng() % 6;
    std::vector<StepFunction> targets;
    Rational norms(0);
    for (std::size_t j = 0; j < m; ++j) {
      auto t = oracle::random_step(rng, 8, Rational(-2), Rational(2), Rational(1));
      norms += oracle::product_integral({t, t});
      targets.push_back(t);
    }
    auto r = lemma5_select(cands, targets);
    Rational bound_sq = Rational(m) * norms / Rational(n);
    o.require(r.achieved_sum * r.achieved_sum <= bound_sq, "achieved_sum above the averaging bound");
    Rational direct(0);
    for (const auto& t : targets) direct += abs_q(oracle::product_integral({t, cands[r.index]}));
    o.require(direct == r.achieved_sum, "achieved_sum disagrees with direct integration");
  }

  auto w10 = walsh_system(10);
  auto cert = greedy_subsequence(w10, 8, 2);
  o.require(cert.steps.size() == 2, "expected two selection rows");
  if (cert.steps.size() == 2) {
    o.require(cert.steps[0].per_step_sum < Rational(1, 2), "step 1 sum not below 1/2");
    o.require(cert.steps[1].per_step_sum < Rational(1, 4), "step 2 sum not below 1/4");
  }
  const Rational mu = selected_mu(w10, cert);
  o.require(mu == cert.total, "selected mu differs from the certificate total");
  if (o.ok) {
    std::ostringstream s;
    s << "100 instances; walsh:10 chose";
    for (auto i : cert.chosen_indices) s << ' ' << i;
    s << ", mu = total = " << mu.get_str();
    o.detail = s.str();
  }
  return o;
}

// ---------------------------------------------------------------- 11
Outcome rubinshtein() {
  Outcome o;
  std::mt19937_64 rng(1011);
  for (int trial = 0; trial < 100; ++trial) {
    auto f = oracle::random_step(rng, 8, Rational(-1), Rational(1), Rational(1, 4));
    const std::size_t n = 1 + static_cast<std::size_t>(trial) % 5;
    auto sys = dilated_system(build_phi(f), n);
    o.require(multiplicative_error(sys, IndexFamily::cardinality_cap(n)).mu == 0,
              "trial " + std::to_string(trial) + " dilates not multiplicative");

    auto trace = reduce_to_independent(sys, IndexFamily::cardinality_cap(n));
    auto coeffs = oracle::random_coeffs(rng, n);
    for (const auto& phi : {ConvexSpec::power(2), ConvexSpec::power(4), ConvexSpec::exp(1)}) {
      o.require(verify_domination(trace, coeffs, phi).holds, "domination violated on a dilated system");
    }
    Rational top(0);
    for (std::size_t k = 0; k < n; ++k) top += sys.upper()[k];
    std::vector<Rational> lambdas;
    for (long j = 1; j <= 4; ++j) lambdas.push_back(top * ratio(j, 4));
    for (const auto& t : hoeffding_tails(sys, lambdas, IndexFamily::cardinality_cap(n))) {
      o.require(t.holds, "tail bound violated on a dilated system");
    }
  }
  if (o.ok) o.detail = "100 generators, n <= 5: mu = 0, domination and tails hold";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;  // 0: no runtime limit
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "lemma00 constructions", 1, lemma00_suite},
      {2, "domination after reduction", 30, domination_suite},
      {3, "binarize preserves moments", 0, moment_preservation},
      {4, "xi stage independence", 0, independence_suite},
      {5, "even-p Khintchin", 10, khintchine_even},
      {6, "Khintchin constant coherence", 0, constant_coherence},
      {7, "Hoeffding tail bounds", 10, tail_bounds},
      {8, "lacunary per-collection and mu bounds", 60, proposition4},
      {9, "frequency containment", 0, frequency_containment},
      {10, "Parseval selection and greedy subsequence", 0, selection},
      {11, "reflection generator dilates", 0, rubinshtein},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.ok && c.budget_seconds > 0 && secs >= c.budget_seconds) {
      o.ok = false;
      o.detail += " (over the runtime budget)";
    }
    if (!o.ok) ++failures;
    std::printf("%s criterion %d: %s [%.2fs] %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
