#include <doctest.h>

#include <cmath>
#include <random>

#include "multsys/error.hpp"
#include "multsys/io.hpp"
#include "multsys/reduction.hpp"
#include "oracles.hpp"

using namespace multsys;

namespace {

Rational q(const char* s) { return parse_rational(s); }

StepFunction rad(std::size_t k) { return io::rademacher_system(k).function(k - 1); }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ParseError;
}

// Full product == 1 pointwise and every proper sub-product integrates to 0.
void check_unimodular(const std::vector<StepFunction>& fs) {
  const std::size_t nu = fs.size();
  for (const auto& f : fs) {
    for (const auto& v : f.values()) CHECK((v == 1 || v == -1));
  }
  auto grid = oracle::merged_grid(fs);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    Rational mid = (grid[i] + grid[i + 1]) / 2;
    Rational p(1);
    for (const auto& f : fs) p *= oracle::eval(f, mid);
    CHECK(p == 1);
  }
  for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << nu); ++mask) {
    std::vector<StepFunction> sel;
    for (std::size_t k = 0; k < nu; ++k) {
      if (mask >> k & 1U) sel.push_back(fs[k]);
    }
    CHECK(oracle::product_integral(sel) == 0);
  }
}

}  // namespace

TEST_CASE("lemma00 constructions") {
  for (std::size_t nu = 2; nu <= 4; ++nu) {
    for (const auto& len : {Rational(1), q("3/7")}) {
      auto w = lemma00_walsh(nu, len);
      CHECK(w.size() == nu);
      CHECK(w.front().pieces() == (std::size_t{1} << (nu - 1)));
      CHECK(w.front().length() == len);
      check_unimodular(w);
      auto f = lemma00_flip(nu, len);
      CHECK(f.size() == nu);
      CHECK(f.front().pieces() <= (std::size_t{1} << ((std::size_t{1} << nu) - 2)));
      check_unimodular(f);
    }
  }
  // nu = 3 is r1, r2, r1 r2.
  auto w3 = lemma00_walsh(3, Rational(1));
  CHECK(equivalent(w3[0], rad(1)));
  CHECK(equivalent(w3[1], rad(2)));
  CHECK(code_of([] { lemma00_walsh(1, Rational(1)); }) == ErrorCode::BadArity);
  CHECK(code_of([] { lemma00_flip(5, Rational(1)); }) == ErrorCode::CapacityExceeded);
}

TEST_CASE("extend_system examples") {
  auto rad3 = io::rademacher_system(3);
  CHECK(extend_system(rad3, IndexFamily::cardinality_cap(3)) == rad3);

  auto dup = BoundedSystem::unit({rad(1), rad(1)});
  auto ext = extend_system(dup, IndexFamily::cardinality_cap(2));
  CHECK(ext.domain_length() == 2);
  CHECK(mixed_moment(ext, {0, 1}) == 0);
  CHECK(mixed_moment(ext, {0}) == 0);
  auto b1 = restrict_to(ext.function(0), Rational(2));
  // On [1,2) the two functions multiply to -1.
  for (const auto& x : {q("1"), q("5/4"), q("3/2"), q("7/4")}) {
    CHECK(evaluate(ext.function(0), x) * evaluate(ext.function(1), x) == -1);
  }
  (void)b1;

  auto half = BoundedSystem::unit({StepFunction::constant(q("1/2"), Rational(1))});
  auto eh = extend_system(half, IndexFamily::cardinality_cap(1));
  CHECK(eh.domain_length() == q("3/2"));
  CHECK(integral(eh.function(0)) == 0);
  CHECK(evaluate(eh.function(0), q("5/4")) == -1);
  CHECK(code_of([] { extend_system(BoundedSystem::unit({StepFunction::constant(Rational(0), Rational(2))}),
                                   IndexFamily::cardinality_cap(1)); }) == ErrorCode::DomainMismatch);
}

TEST_CASE("extend_system properties") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    auto sys = oracle::random_system(rng, 1 + trial % 4, 6);
    const std::size_t l = 1 + trial % sys.size();
    auto ext = extend_system(sys, IndexFamily::cardinality_cap(l));
    auto mu = multiplicative_error(sys, IndexFamily::cardinality_cap(l)).mu;
    CHECK(ext.domain_length() == 1 + mu);
    for (const auto& e : moment_table(ext, IndexFamily::cardinality_cap(l)).entries) CHECK(e.moment == 0);
    for (std::size_t k = 0; k < sys.size(); ++k) {
      auto head = restrict_to(ext.function(k), Rational(1));
      CHECK(head == sys.function(k));
      for (const auto& v : ext.function(k).values()) CHECK((v >= sys.lower()[k] && v <= sys.upper()[k]));
    }
  }
}

TEST_CASE("approx_by_steps examples") {
  auto f = make_step({q("0"), q("1/3"), q("1/2"), q("1")}, {q("2"), q("-1"), q("1/5")});
  std::vector<std::pair<Rational, Rational>> samples{{q("0"), q("2")}, {q("1/3"), q("-1")}, {q("1/2"), q("1/5")}};
  auto s = approx_by_steps(samples, q("1/100"));
  CHECK(s.heuristic);
  CHECK(s.function == f);

  std::vector<std::pair<Rational, Rational>> one{{q("0"), q("7")}};
  CHECK(approx_by_steps(one, q("1/10")).function == StepFunction::constant(q("7"), Rational(1)));

  std::vector<std::pair<Rational, Rational>> sine;
  for (int i = 0; i < 1024; ++i) {
    Rational x(i, 1024);
    x.canonicalize();
    sine.emplace_back(x, rational_from_double(std::sin(2 * std::numbers::pi * i / 1024.0)));
  }
  CHECK(approx_by_steps(sine, q("1/1024")).function.pieces() == 1024);

  std::vector<std::pair<Rational, Rational>> bad{{q("1/2"), q("1")}, {q("1/4"), q("1")}};
  CHECK(code_of([&] { approx_by_steps(bad, q("1/10")); }) == ErrorCode::UnsortedSamples);
}

TEST_CASE("binarize examples") {
  auto zero = BoundedSystem::unit({StepFunction::constant(Rational(0), Rational(1))});
  auto bz = binarize(zero);
  CHECK(equivalent(bz.function(0), rad(1)));

  auto two = BoundedSystem::unit({rad(2)});
  CHECK(equivalent(binarize(two).function(0), rad(2)));

  auto half = BoundedSystem::unit({StepFunction::constant(q("1/2"), Rational(1))});
  auto bh = binarize(half).function(0);
  CHECK(equivalent(bh, make_step({q("0"), q("3/4"), q("1")}, {q("1"), q("-1")})));

  auto bad = BoundedSystem::unit({rad(1)});
  CHECK(code_of([&] { binarize(bad, 3); }) == ErrorCode::BadSubset);
}

TEST_CASE("binarize preserves every mixed moment") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 40; ++trial) {
    auto sys = oracle::random_system(rng, 1 + trial % 5, 5);
    auto bin = binarize(sys);
    for (std::size_t k = 0; k < sys.size(); ++k) {
      for (const auto& v : bin.function(k).values()) CHECK((v == sys.lower()[k] || v == sys.upper()[k]));
    }
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << sys.size()); ++mask) {
      std::vector<StepFunction> a, b;
      for (std::size_t k = 0; k < sys.size(); ++k) {
        if (mask >> k & 1U) {
          a.push_back(sys.function(k));
          b.push_back(bin.function(k));
        }
      }
      CHECK(oracle::product_integral(a) == oracle::product_integral(b));
    }
  }
}

TEST_CASE("binarize never decreases convex functionals") {
  std::mt19937_64 rng(33);
  const ConvexSpec specs[] = {ConvexSpec::power(2), ConvexSpec::power(3), ConvexSpec::power(4), ConvexSpec::exp(1),
                              ConvexSpec::hinge_square(0.5), ConvexSpec::abs()};
  for (int trial = 0; trial < 40; ++trial) {
    auto sys = oracle::random_system(rng, 1 + trial % 4, 6);
    auto bin = binarize(sys);
    auto coeffs = oracle::random_coeffs(rng, sys.size());
    auto a = linear_combination(coeffs, sys.functions());
    auto b = linear_combination(coeffs, bin.functions());
    for (const auto& phi : specs) {
      auto ea = convex_expectation(a, phi);
      auto eb = convex_expectation(b, phi);
      if (ea.exact && eb.exact) {
        CHECK(*ea.exact <= *eb.exact);
      } else {
        CHECK(ea.approx <= eb.approx * (1 + 1e-9) + 1e-12);
      }
    }
  }
}

TEST_CASE("check_independence examples") {
  CHECK(check_independence(io::rademacher_system(2), IndexFamily::cardinality_cap(2)).independent);
  auto dup = BoundedSystem::unit({rad(1), rad(1)});
  auto report = check_independence(dup, IndexFamily::cardinality_cap(2));
  CHECK_FALSE(report.independent);
  REQUIRE_FALSE(report.failures.empty());
  CHECK(report.failures.front().product == q("1/4"));
  CHECK((report.failures.front().joint == 0 || report.failures.front().joint == q("1/2")));

  auto three = BoundedSystem::unit({make_step({q("0"), q("1/2"), q("1")}, {q("0"), q("0")})});
  CHECK(code_of([&] { check_independence(three, IndexFamily::cardinality_cap(1)); }) == ErrorCode::NotTwoValued);
  auto biased = BoundedSystem::unit({make_step({q("0"), q("3/4"), q("1")}, {q("1"), q("-1")})});
  CHECK(code_of([&] { check_independence(biased, IndexFamily::cardinality_cap(1)); }) == ErrorCode::NonZeroMean);
}

TEST_CASE("reduce_to_independent examples") {
  auto rad3 = io::rademacher_system(3);
  auto t = reduce_to_independent(rad3, IndexFamily::cardinality_cap(3));
  CHECK(t.mu == 0);
  for (std::size_t k = 0; k < 3; ++k) CHECK(equivalent(t.xi.function(k), rad3.function(k)));

  auto dup = BoundedSystem::unit({rad(1), rad(1)});
  auto td = reduce_to_independent(dup, IndexFamily::cardinality_cap(2));
  CHECK(td.mu == 1);
  CHECK(td.xi.domain_length() == 1);
  CHECK(check_independence(td.xi, IndexFamily::cardinality_cap(2)).independent);
  CHECK(td.stage_tables.size() == 4);

  auto three = BoundedSystem::unit({make_step({q("0"), q("1/4"), q("3/4"), q("1")}, {q("1"), q("0"), q("-1")})});
  auto tt = reduce_to_independent(three, IndexFamily::cardinality_cap(1));
  CHECK(tt.mu == 0);
  for (const auto& v : tt.xi.function(0).values()) CHECK((v == 1 || v == -1));
  CHECK(integral(tt.xi.function(0)) == 0);
}

TEST_CASE("pipeline invariants on random systems") {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 40; ++trial) {
    auto sys = oracle::random_system(rng, 1 + trial % 4, 6);
    const auto family = IndexFamily::cardinality_cap(1 + trial % sys.size());
    auto t = reduce_to_independent(sys, family);
    for (const auto& e : moment_table(t.extended, family).entries) CHECK(e.moment == 0);
    auto full = IndexFamily::cardinality_cap(sys.size());
    auto ext_full = moment_table(t.extended, full);
    auto bin_full = moment_table(t.binarized, full);
    for (std::size_t i = 0; i < ext_full.entries.size(); ++i) CHECK(ext_full.entries[i].moment == bin_full.entries[i].moment);
    CHECK(check_independence(t.xi, family).independent);

    // Running the pipeline on its own output is a fixed point.
    auto again = reduce_to_independent(t.xi, family);
    CHECK(again.mu == 0);
    for (std::size_t k = 0; k < sys.size(); ++k) CHECK(equivalent(again.xi.function(k), t.xi.function(k)));
  }
}

TEST_CASE("verify_domination examples") {
  auto rad3 = io::rademacher_system(3);
  const Rational c3[] = {q("1/2"), q("-3"), q("2")};
  auto r = verify_domination(rad3, IndexFamily::cardinality_cap(3), c3, ConvexSpec::power(2));
  CHECK(r.holds);
  CHECK(r.exact_comparison);
  CHECK(r.mu == 0);

  const Rational zeros[] = {Rational(0), Rational(0), Rational(0)};
  auto z = verify_domination(rad3, IndexFamily::cardinality_cap(3), zeros, ConvexSpec::exp(1));
  CHECK(z.holds);
  CHECK(z.lhs == doctest::Approx(1.0));

  auto dup = BoundedSystem::unit({rad(1), rad(1)});
  const Rational ones[] = {Rational(1), Rational(1)};
  auto d = verify_domination(dup, IndexFamily::cardinality_cap(2), ones, ConvexSpec::power(2));
  CHECK(*d.lhs_exact == 4);
  CHECK(*d.rhs_exact == 4);
  CHECK(d.holds);

  const Rational one[] = {Rational(1)};
  CHECK(code_of([&] { verify_domination(dup, IndexFamily::cardinality_cap(2), one, ConvexSpec::power(2)); }) ==
        ErrorCode::LengthMismatch);
}
