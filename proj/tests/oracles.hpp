#pragma once

// Slow reference implementations used only by the tests. None of them calls
// the library routine it is checking.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "multsys/moments.hpp"
#include "multsys/rational.hpp"
#include "multsys/stepfn.hpp"

namespace oracle {

using multsys::Rational;
using multsys::StepFunction;

// Binary search for the piece containing x.
inline Rational eval(const StepFunction& f, const Rational& x) {
  auto b = f.breakpoints();
  if (b.empty() || x < b.front() || !(x < b.back())) throw std::out_of_range("oracle::eval");
  auto it = std::upper_bound(b.begin(), b.end(), x);
  return f.values()[static_cast<std::size_t>(it - b.begin()) - 1];
}

inline std::vector<Rational> merged_grid(const std::vector<StepFunction>& fs) {
  std::set<Rational> pts;
  for (const auto& f : fs) {
    for (const auto& x : f.breakpoints()) pts.insert(x);
  }
  return {pts.begin(), pts.end()};
}

// Integral of a pointwise map of the functions, piece by piece on the merged grid.
inline Rational integrate(const std::vector<StepFunction>& fs,
                          const std::function<Rational(const std::vector<Rational>&)>& g) {
  auto grid = merged_grid(fs);
  Rational total(0);
  std::vector<Rational> vals(fs.size());
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    Rational mid = (grid[i] + grid[i + 1]) / 2;
    for (std::size_t k = 0; k < fs.size(); ++k) vals[k] = eval(fs[k], mid);
    total += g(vals) * (grid[i + 1] - grid[i]);
  }
  return total;
}

inline Rational product_integral(const std::vector<StepFunction>& fs) {
  return integrate(fs, [](const std::vector<Rational>& v) {
    Rational p(1);
    for (const auto& x : v) p *= x;
    return p;
  });
}

// mu over all subsets with |S| <= l, subsets enumerated by bitmask.
inline Rational brute_mu(const multsys::BoundedSystem& sys, std::size_t l) {
  const std::size_t n = sys.size();
  Rational mu(0);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) > l) continue;
    std::vector<StepFunction> sel;
    Rational c(1);
    for (std::size_t k = 0; k < n; ++k) {
      if (mask >> k & 1U) {
        sel.push_back(sys.function(k));
        c *= std::min(Rational(-sys.lower()[k]), sys.upper()[k]);
      }
    }
    Rational m = product_integral(sel) / sys.domain_length();
    mu += (m < 0 ? Rational(-m) : m) / c;
  }
  return mu;
}

inline std::uint64_t binom(unsigned n, unsigned k) {
  std::uint64_t r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// |{r_1 + ... + r_n > lambda}| = #{j : 2j - n > lambda} weighted by C(n, j) / 2^n.
inline Rational rademacher_tail(unsigned n, const Rational& lambda) {
  mpz_class count = 0;
  for (unsigned j = 0; j <= n; ++j) {
    if (Rational(2 * static_cast<long>(j) - static_cast<long>(n)) > lambda) count += mpz_class(std::to_string(binom(n, j)));
  }
  Rational out(count, mpz_class(1) << n);
  out.canonicalize();
  return out;
}

// E (sum a_k eps_k)^p over all sign patterns, plain bitmask loop.
inline Rational sign_pattern_moment(const std::vector<Rational>& a, unsigned p) {
  const std::size_t n = a.size();
  Rational total(0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Rational s(0);
    for (std::size_t k = 0; k < n; ++k) s += (mask >> k & 1U) ? Rational(-a[k]) : a[k];
    Rational t(1);
    for (unsigned i = 0; i < p; ++i) t *= s;
    total += t;
  }
  Rational out = total / Rational(mpz_class(1) << n);
  out.canonicalize();
  return out;
}

// Gauss-Kronrod on equal panels, the panel count growing with the highest
// frequency until two refinements agree to 1e-12; capped at 1e6 panels.
inline double quad(const std::function<double(double)>& g, double max_frequency) {
  auto run = [&](std::size_t panels) {
    double total = 0.0;
    const double h = 1.0 / static_cast<double>(panels);
    for (std::size_t i = 0; i < panels; ++i) {
      const double a = h * static_cast<double>(i);
      total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, a, a + h, 0);
    }
    return total;
  };
  std::size_t panels = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(2.0 * max_frequency)));
  double prev = run(panels);
  while (panels * 2 <= 1000000) {
    panels *= 2;
    double next = run(panels);
    if (std::abs(next - prev) < 1e-12) return next;
    prev = next;
  }
  return prev;
}

// Random rational in [lo, hi] with denominator up to `den`.
inline Rational random_rational(std::mt19937_64& rng, const Rational& lo, const Rational& hi, long den = 16) {
  std::uniform_int_distribution<long> d(0, den);
  Rational t(d(rng), den);
  t.canonicalize();
  return lo + (hi - lo) * t;
}

// Up to `max_pieces` pieces on [0, length) with values in [lo, hi].
inline StepFunction random_step(std::mt19937_64& rng, std::size_t max_pieces, const Rational& lo, const Rational& hi,
                                const Rational& length = Rational(1)) {
  std::uniform_int_distribution<std::size_t> pc(1, max_pieces);
  const std::size_t pieces = pc(rng);
  std::set<Rational> inner;
  std::uniform_int_distribution<long> num(1, 31);
  while (inner.size() + 1 < pieces) {
    Rational x(num(rng), 32);
    x.canonicalize();
    inner.insert(x * length);
  }
  std::vector<Rational> b{Rational(0)};
  b.insert(b.end(), inner.begin(), inner.end());
  b.push_back(length);
  std::vector<Rational> v;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) v.push_back(random_rational(rng, lo, hi));
  return StepFunction::make(std::move(b), std::move(v));
}

// n functions with random bounds A < 0 < B and values inside them.
inline multsys::BoundedSystem random_system(std::mt19937_64& rng, std::size_t n, std::size_t max_pieces) {
  std::vector<StepFunction> fs;
  std::vector<Rational> lo, hi;
  std::uniform_int_distribution<long> bd(1, 4);
  for (std::size_t k = 0; k < n; ++k) {
    Rational a(-bd(rng), bd(rng));
    Rational b(bd(rng), bd(rng));
    a.canonicalize();
    b.canonicalize();
    lo.push_back(a);
    hi.push_back(b);
    fs.push_back(random_step(rng, max_pieces, a, b));
  }
  return multsys::BoundedSystem::make(std::move(fs), std::move(lo), std::move(hi));
}

inline std::vector<Rational> random_coeffs(std::mt19937_64& rng, std::size_t n) {
  std::vector<Rational> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(random_rational(rng, Rational(-2), Rational(2), 8));
  return out;
}

}  // namespace oracle
