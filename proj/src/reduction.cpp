#include "multsys/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "multsys/error.hpp"

namespace multsys {

namespace {

std::shared_ptr<const Breakpoints> uniform_grid(const Rational& length, std::size_t pieces) {
  Breakpoints b(pieces + 1);
  for (std::size_t j = 0; j <= pieces; ++j) b[j] = length * ratio(static_cast<long>(j), pieces);
  return std::make_shared<const Breakpoints>(std::move(b));
}

void require_unit_domain(const BoundedSystem& sys, std::string_view what) {
  if (!sys.empty() && sys.domain_length() != 1) {
    throw Error(ErrorCode::DomainMismatch, std::string(what) + " expects functions on [0,1), got [0," +
                                               to_string(sys.domain_length()) + ")");
  }
}

BoundedSystem extend_with_table(const BoundedSystem& sys, const MomentTable& table) {
  const std::size_t n = sys.size();
  std::vector<std::vector<StepFunction>> pieces(n);
  for (std::size_t k = 0; k < n; ++k) pieces[k].push_back(sys.function(k));

  for (const auto& entry : table.entries) {
    // Block length is the normalized moment (the domain is [0,1)).
    const Rational& delta = entry.normalized;
    if (delta == 0) continue;
    const Subset& s = entry.subset;
    const int moment_sign = sign(entry.moment);

    std::vector<StepFunction> block;
    if (s.size() == 1) {
      block.push_back(StepFunction::constant(Rational(-moment_sign) * sys.c(s[0]), delta));
    } else {
      block = lemma00_walsh(s.size(), delta);
      for (std::size_t j = 0; j < s.size(); ++j) {
        Rational factor = sys.c(s[j]);
        // Full product must be -sign(moment) * prod C.
        if (j == 0 && moment_sign > 0) factor = -factor;
        block[j] = scale(block[j], factor);
      }
    }
    const auto zero = StepFunction::constant(Rational(0), delta);
    std::size_t next = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (next < s.size() && s[next] == k) {
        pieces[k].push_back(block[next++]);
      } else {
        pieces[k].push_back(zero);
      }
    }
  }

  std::vector<StepFunction> extended;
  extended.reserve(n);
  for (std::size_t k = 0; k < n; ++k) extended.push_back(concat_all(pieces[k]));
  return BoundedSystem::make(std::move(extended), sys.lower(), sys.upper());
}

}  // namespace

// Unimodular building blocks ----------------------------------------------

std::vector<StepFunction> lemma00_walsh(std::size_t nu, const Rational& length) {
  if (nu < 2) throw Error(ErrorCode::BadArity, "need at least two functions, got " + std::to_string(nu));
  if (length <= 0) throw Error(ErrorCode::EmptyDomain, "interval length " + to_string(length));
  if (nu - 1 >= 63) throw Error(ErrorCode::CapacityExceeded, "2^" + std::to_string(nu - 1) + " pieces");
  const std::size_t pieces = std::size_t{1} << (nu - 1);
  check_piece_count(pieces, "lemma00_walsh");

  auto grid = uniform_grid(length, pieces);
  std::vector<StepFunction> out;
  out.reserve(nu);
  std::vector<int> last(pieces, 1);
  for (std::size_t k = 1; k < nu; ++k) {
    // r_k reads bit (nu-1-k) of the piece index: r_1 is the coarsest.
    const std::size_t bit = nu - 1 - k;
    std::vector<Rational> values(pieces);
    for (std::size_t j = 0; j < pieces; ++j) {
      int s = ((j >> bit) & 1U) ? -1 : 1;
      values[j] = s;
      last[j] *= s;
    }
    out.emplace_back(grid, std::move(values));
  }
  std::vector<Rational> values(pieces);
  for (std::size_t j = 0; j < pieces; ++j) values[j] = last[j];
  out.emplace_back(grid, std::move(values));
  return out;
}

std::vector<StepFunction> lemma00_flip(std::size_t nu, const Rational& length) {
  if (nu < 2) throw Error(ErrorCode::BadArity, "need at least two functions, got " + std::to_string(nu));
  if (length <= 0) throw Error(ErrorCode::EmptyDomain, "interval length " + to_string(length));
  const std::size_t passes = (nu >= 63 ? 63 : (std::size_t{1} << nu) - 2);
  if (passes >= 63 || (std::size_t{1} << passes) > piece_cap()) {
    throw Error(ErrorCode::CapacityExceeded, "flip construction for nu=" + std::to_string(nu) + " needs up to 2^" +
                                                 std::to_string(passes) + " pieces");
  }

  Breakpoints grid{Rational(0), length};
  std::vector<std::vector<std::int8_t>> signs(nu, std::vector<std::int8_t>(1, 1));

  for (const auto& v : enumerate_family(nu, IndexFamily::cardinality_cap(nu - 1))) {
    std::size_t flip_in = v.front();
    std::size_t flip_out = 0;
    while (std::binary_search(v.begin(), v.end(), flip_out)) ++flip_out;

    // Maximal constancy intervals of the joint system.
    Breakpoints merged{grid.front()};
    std::vector<std::vector<std::int8_t>> merged_signs(nu);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      bool same = i > 0;
      for (std::size_t k = 0; same && k < nu; ++k) same = signs[k][i] == signs[k][i - 1];
      if (same) {
        merged.back() = grid[i + 1];
        continue;
      }
      merged.push_back(grid[i + 1]);
      for (std::size_t k = 0; k < nu; ++k) merged_signs[k].push_back(signs[k][i]);
    }

    const std::size_t intervals = merged.size() - 1;
    check_piece_count(2 * intervals, "lemma00_flip");
    Breakpoints next{merged.front()};
    std::vector<std::vector<std::int8_t>> next_signs(nu);
    for (std::size_t i = 0; i < intervals; ++i) {
      next.push_back((merged[i] + merged[i + 1]) / 2);
      next.push_back(merged[i + 1]);
      for (std::size_t k = 0; k < nu; ++k) {
        std::int8_t s = merged_signs[k][i];
        next_signs[k].push_back(s);
        next_signs[k].push_back((k == flip_in || k == flip_out) ? static_cast<std::int8_t>(-s) : s);
      }
    }
    grid = std::move(next);
    signs = std::move(next_signs);
  }

  auto shared = std::make_shared<const Breakpoints>(std::move(grid));
  std::vector<StepFunction> out;
  for (std::size_t k = 0; k < nu; ++k) {
    std::vector<Rational> values(signs[k].begin(), signs[k].end());
    out.emplace_back(shared, std::move(values));
  }
  return out;
}

// Extension ---------------------------------------------------------------

BoundedSystem extend_system(const BoundedSystem& sys, const IndexFamily& family, const MomentOptions& options) {
  require_unit_domain(sys, "extend_system");
  return extend_with_table(sys, moment_table(sys, family, options));
}

SampledStep approx_by_steps(std::span<const std::pair<Rational, Rational>> samples, const Rational& delta) {
  if (samples.empty()) throw Error(ErrorCode::EmptyDomain, "no samples");
  Breakpoints b{Rational(0)};
  std::vector<Rational> values{samples.front().second};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& x = samples[i].first;
    if (x < 0 || x >= 1 || (i > 0 && !(samples[i - 1].first < x))) {
      throw Error(ErrorCode::UnsortedSamples, "sample abscissae must be strictly ascending in [0,1)");
    }
    if (i > 0) {
      b.push_back(x);
      values.push_back(samples[i].second);
    }
  }
  b.emplace_back(1);
  check_piece_count(values.size(), "approx_by_steps");
  return {StepFunction(std::make_shared<const Breakpoints>(std::move(b)), std::move(values)), true, delta};
}

// Binarization ------------------------------------------------------------

BoundedSystem binarize(const BoundedSystem& sys, std::optional<std::size_t> which) {
  if (sys.empty()) return sys;
  if (which && *which >= sys.size()) throw Error(ErrorCode::BadSubset, "no function " + std::to_string(*which + 1));

  const std::size_t n = sys.size();
  std::vector<StepFunction> current = sys.functions();
  const std::size_t first = which ? *which : 0;
  const std::size_t last = which ? *which + 1 : n;

  for (std::size_t k = first; k < last; ++k) {
    auto aligned = common_refinement(current);
    const auto grid = aligned.front().breakpoints();
    const Rational& lo = sys.lower()[k];
    const Rational& hi = sys.upper()[k];
    const Rational spread = hi - lo;

    Breakpoints next{grid.front()};
    std::vector<std::vector<Rational>> values(n);
    Rational cut;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const Rational& alpha = grid[i];
      const Rational& beta = grid[i + 1];
      const Rational& v = aligned[k].values()[i];
      if (v < lo || v > hi) {
        throw Error(ErrorCode::ValueOutOfBounds, "function " + std::to_string(k + 1) + " takes " + to_string(v));
      }
      cut = (hi * alpha - lo * beta + v * (beta - alpha)) / spread;
      auto emit = [&](const Rational& end, const Rational& level) {
        next.push_back(end);
        for (std::size_t j = 0; j < n; ++j) values[j].push_back(j == k ? level : aligned[j].values()[i]);
      };
      if (cut > alpha) emit(cut, hi);
      if (cut < beta) emit(beta, lo);
    }
    check_piece_count(next.size() - 1, "binarize");
    auto shared = std::make_shared<const Breakpoints>(std::move(next));
    for (std::size_t j = 0; j < n; ++j) current[j] = StepFunction(shared, std::move(values[j]));
  }
  return BoundedSystem::make(std::move(current), sys.lower(), sys.upper());
}

// Independence ------------------------------------------------------------

IndependenceReport check_independence(const BoundedSystem& sys, const IndexFamily& family) {
  IndependenceReport report;
  const Rational domain = sys.domain_length();
  for (std::size_t k = 0; k < sys.size(); ++k) {
    const auto& f = sys.function(k);
    for (const auto& v : f.values()) {
      if (v != sys.lower()[k] && v != sys.upper()[k]) {
        throw Error(ErrorCode::NotTwoValued, "function " + std::to_string(k + 1) + " takes " + to_string(v));
      }
    }
    if (integral(f) != 0) throw Error(ErrorCode::NonZeroMean, "function " + std::to_string(k + 1));
    Rational lower_measure = measure_equal(f, sys.lower()[k]) / domain;
    report.marginals_match.push_back(lower_measure == sys.upper()[k] / (sys.upper()[k] - sys.lower()[k]));
    report.measure_lower.push_back(std::move(lower_measure));
  }
  if (std::find(report.marginals_match.begin(), report.marginals_match.end(), false) != report.marginals_match.end()) {
    report.independent = false;
  }

  const auto subsets = enumerate_family(sys.size(), family);
  if (subsets.empty()) return report;
  auto aligned = common_refinement(sys.functions());
  const auto grid = aligned.front().breakpoints();

  for (const auto& m : subsets) {
    if (m.size() >= 24) throw Error(ErrorCode::CapacityExceeded, "sign patterns for " + format_subset(m));
    std::vector<Rational> bins(std::size_t{1} << m.size(), Rational(0));
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      std::size_t pattern = 0;
      for (std::size_t j = 0; j < m.size(); ++j) {
        if (aligned[m[j]].values()[i] == sys.upper()[m[j]]) pattern |= std::size_t{1} << j;
      }
      bins[pattern] += grid[i + 1] - grid[i];
    }
    for (std::size_t pattern = 0; pattern < bins.size(); ++pattern) {
      Rational joint = bins[pattern] / domain;
      Rational expected(1);
      std::vector<bool> upper(m.size());
      for (std::size_t j = 0; j < m.size(); ++j) {
        upper[j] = (pattern >> j) & 1U;
        const Rational& p_lower = report.measure_lower[m[j]];
        expected *= upper[j] ? Rational(1 - p_lower) : p_lower;
      }
      ++report.patterns_checked;
      if (joint != expected) {
        report.independent = false;
        report.failures.push_back({m, std::move(upper), std::move(joint), std::move(expected)});
      }
    }
  }
  return report;
}

// Pipeline ----------------------------------------------------------------

ReductionTrace reduce_to_independent(const BoundedSystem& sys, const IndexFamily& family,
                                     const MomentOptions& options) {
  require_unit_domain(sys, "reduce_to_independent");
  ReductionTrace trace;
  trace.family = family;
  trace.original = sys;

  auto error = multiplicative_error(sys, family, options);
  trace.mu = error.mu;
  trace.stage_tables.push_back({"original", error.table});

  trace.extended = extend_with_table(sys, error.table);
  trace.stage_tables.push_back({"extended", moment_table(trace.extended, family, options)});

  trace.binarized = binarize(trace.extended);
  trace.stage_tables.push_back({"binarized", moment_table(trace.binarized, family, options)});

  const Rational stretch = 1 + trace.mu;
  std::vector<StepFunction> xi;
  xi.reserve(sys.size());
  for (const auto& g : trace.binarized.functions()) xi.push_back(dilate(g, stretch));
  trace.xi = BoundedSystem::make(std::move(xi), sys.lower(), sys.upper());
  trace.stage_tables.push_back({"xi", moment_table(trace.xi, family, options)});
  return trace;
}

namespace {

StepFunction weighted_sum(const BoundedSystem& sys, std::span<const Rational> coeffs) {
  if (coeffs.size() != sys.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(coeffs.size()) + " coefficients for " +
                                               std::to_string(sys.size()) + " functions");
  }
  if (sys.empty()) return StepFunction::constant(Rational(0), Rational(1));
  return linear_combination(coeffs, sys.functions());
}

}  // namespace

DominationReport verify_domination(const ReductionTrace& trace, std::span<const Rational> coeffs,
                                   const ConvexSpec& phi, double rel_tol) {
  DominationReport report;
  report.mu = trace.mu;
  report.phi = phi.name();

  auto lhs = convex_expectation(weighted_sum(trace.original, coeffs), phi);
  auto rhs = convex_expectation(weighted_sum(trace.xi, coeffs), phi);
  const Rational lhs_domain = trace.original.domain_length();
  const Rational stretch = 1 + trace.mu;

  report.lhs = lhs.approx / to_double(lhs_domain);
  report.rhs = to_double(stretch) * rhs.approx;
  if (lhs.exact && rhs.exact) {
    report.lhs_exact = *lhs.exact / lhs_domain;
    report.rhs_exact = stretch * *rhs.exact;
    report.lhs = to_double(*report.lhs_exact);
    report.rhs = to_double(*report.rhs_exact);
    report.exact_comparison = true;
    report.holds = *report.lhs_exact <= *report.rhs_exact;
  } else {
    report.holds = report.lhs <= report.rhs + rel_tol * std::abs(report.rhs);
  }
  return report;
}

DominationReport verify_domination(const BoundedSystem& sys, const IndexFamily& family,
                                   std::span<const Rational> coeffs, const ConvexSpec& phi, double rel_tol) {
  if (coeffs.size() != sys.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(coeffs.size()) + " coefficients for " +
                                               std::to_string(sys.size()) + " functions");
  }
  return verify_domination(reduce_to_independent(sys, family), coeffs, phi, rel_tol);
}

}  // namespace multsys
