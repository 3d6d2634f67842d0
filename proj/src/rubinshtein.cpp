#include "multsys/rubinshtein.hpp"

#include <algorithm>

#include "multsys/error.hpp"

namespace multsys {

namespace {

// x -> f(L - x) on [0, L).
StepFunction reflect(const StepFunction& f) {
  const auto b = f.breakpoints();
  const auto v = f.values();
  const Rational& len = f.length();
  std::vector<Rational> rb;
  std::vector<Rational> rv;
  rb.reserve(b.size());
  rv.reserve(v.size());
  for (std::size_t i = b.size(); i-- > 0;) rb.push_back(len - b[i]);
  for (std::size_t i = v.size(); i-- > 0;) rv.push_back(v[i]);
  return StepFunction(std::make_shared<const Breakpoints>(std::move(rb)), std::move(rv));
}

}  // namespace

ReflectionGenerator build_phi(const StepFunction& f) {
  if (f.is_empty() || f.length() != Rational(1, 4)) {
    throw Error(ErrorCode::WrongDomain, "generator must live on [0,1/4), got length " + to_string(f.length()));
  }
  const StepFunction mirrored = reflect(f);
  const StepFunction parts[] = {f, mirrored, scale(f, Rational(-1)), scale(mirrored, Rational(-1))};
  return {f, concat_all(parts)};
}

BoundedSystem dilated_system(const ReflectionGenerator& gen, std::size_t n) {
  if (n > 12) throw Error(ErrorCode::CapacityExceeded, "dilation depth " + std::to_string(n) + " (max 12)");
  if (n == 0) return BoundedSystem{};

  Rational lo = min_value(gen.phi);
  Rational hi = max_value(gen.phi);
  if (lo == 0 && hi == 0) {
    lo = -1;
    hi = 1;
  }

  const auto b = gen.phi.breakpoints();
  const auto v = gen.phi.values();
  std::vector<StepFunction> functions;
  std::vector<Rational> lower(n, lo), upper(n, hi);
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t copies = std::size_t{1} << k;
    check_piece_count(copies * v.size(), "dyadic dilation");
    const Rational period = ratio(1, copies);
    Breakpoints grid;
    grid.reserve(copies * v.size() + 1);
    std::vector<Rational> values;
    values.reserve(copies * v.size());
    for (std::size_t j = 0; j < copies; ++j) {
      const Rational offset = period * Rational(mpz_class(j));
      for (std::size_t i = 0; i < v.size(); ++i) {
        grid.push_back(offset + b[i] * period);
        values.push_back(v[i]);
      }
    }
    grid.push_back(Rational(1));
    functions.emplace_back(std::make_shared<const Breakpoints>(std::move(grid)), std::move(values));
  }
  return BoundedSystem::make(std::move(functions), std::move(lower), std::move(upper));
}

RubinshteinReport verify_rubinshtein(const StepFunction& f, std::size_t n, std::size_t l, const ConvexSpec& phi,
                                     std::vector<Rational> lambdas) {
  const auto gen = build_phi(f);
  const auto sys = dilated_system(gen, n);

  RubinshteinReport report;
  report.n = n;
  report.l = l;
  if (sys.empty()) {
    report.mu = 0;
    report.multiplicative = true;
    report.holds = true;
    return report;
  }

  const auto family = IndexFamily::cardinality_cap(l);
  const auto trace = reduce_to_independent(sys, family);
  report.mu = trace.mu;
  report.multiplicative = trace.mu == 0;

  const std::vector<Rational> ones(n, Rational(1));
  report.domination = verify_domination(trace, ones, phi);

  if (lambdas.empty()) {
    for (int j = 1; j <= 4; ++j) lambdas.push_back(ratio(static_cast<long>(n) * j, 4) * sys.upper()[0]);
  }
  report.tails = hoeffding_tails_with_mu(sys, lambdas, report.mu);
  for (auto& t : report.tails) t.mu_supplied = false;

  const bool unit_sup = max_value(gen.phi) <= 1;
  if (unit_sup && report.multiplicative && l >= std::min<std::size_t>(4, n)) {
    report.khintchine = verify_khintchine(sys, ones, 4.0, KhintchinMode::EvenInteger);
  }

  report.holds = report.multiplicative && report.domination->holds &&
                 std::all_of(report.tails.begin(), report.tails.end(), [](const TailReport& t) { return t.holds; }) &&
                 (!report.khintchine || report.khintchine->holds);
  return report;
}

}  // namespace multsys
