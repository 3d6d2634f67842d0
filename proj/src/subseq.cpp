#include "multsys/subseq.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

#include "multsys/error.hpp"

namespace multsys {

namespace {

// Functions on one shared grid, for repeated exact inner products.
struct Aligned {
  std::vector<StepFunction> fs;
  std::vector<Rational> lengths;
  bool uniform = true;

  explicit Aligned(std::vector<StepFunction> input) {
    for (const auto& f : input) {
      if (f.length() != 1) throw Error(ErrorCode::DomainMismatch, "orthogonal systems live on [0,1)");
    }
    fs = common_refinement(input);
    if (fs.empty()) return;
    const auto grid = fs.front().breakpoints();
    lengths.resize(grid.size() - 1);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) lengths[i] = grid[i + 1] - grid[i];
    uniform = std::all_of(lengths.begin(), lengths.end(), [&](const Rational& x) { return x == lengths[0]; });
  }

  // E(f_a f_b) on [0, 1).
  Rational inner(std::size_t a, std::size_t b) const {
    const auto va = fs[a].values();
    const auto vb = fs[b].values();
    Rational total(0), term;
    for (std::size_t i = 0; i < va.size(); ++i) {
      if (va[i] == 0 || vb[i] == 0) continue;
      mpq_mul(term.get_mpq_t(), va[i].get_mpq_t(), vb[i].get_mpq_t());
      if (!uniform) term *= lengths[i];
      total += term;
    }
    if (uniform && !lengths.empty()) total *= lengths[0];
    return total;
  }
};

template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  threads = std::max(1u, threads);
  if (threads == 1 || count < 2 * threads) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> workers;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (std::size_t begin = 0; begin < count; begin += chunk) {
    workers.emplace_back([&, begin] {
      for (std::size_t i = begin; i < std::min(count, begin + chunk); ++i) body(i);
    });
  }
  for (auto& w : workers) w.join();
}

Rational max_abs(const StepFunction& f) {
  Rational m(0);
  for (const auto& v : f.values()) m = std::max(m, abs(v));
  return m;
}

}  // namespace

std::vector<StepFunction> OrthogonalSystem::normalized() const {
  if (sup_bound == 1) return functions;
  std::vector<StepFunction> out;
  out.reserve(functions.size());
  const Rational factor = 1 / sup_bound;
  for (const auto& f : functions) out.push_back(scale(f, factor));
  return out;
}

OrthogonalSystem certify(std::vector<StepFunction> functions) {
  Aligned aligned(functions);
  for (std::size_t i = 0; i < functions.size(); ++i) {
    for (std::size_t j = i + 1; j < functions.size(); ++j) {
      if (aligned.inner(i, j) != 0) {
        throw Error(ErrorCode::NotOrthogonal, "functions " + std::to_string(i + 1) + " and " +
                                                  std::to_string(j + 1) + " have nonzero inner product");
      }
    }
  }
  OrthogonalSystem sys;
  sys.sup_bound = 0;
  for (const auto& f : functions) sys.sup_bound = std::max(sys.sup_bound, max_abs(f));
  if (sys.sup_bound == 0) sys.sup_bound = 1;
  sys.functions = std::move(functions);
  sys.certified_orthogonal = true;
  return sys;
}

OrthogonalSystem walsh_system(unsigned m) {
  if (m > 12) throw Error(ErrorCode::TooLarge, "walsh:" + std::to_string(m) + " (max 12)");
  const std::size_t size = std::size_t{1} << m;
  Breakpoints grid(size + 1);
  for (std::size_t t = 0; t <= size; ++t) grid[t] = ratio(static_cast<long>(t), size);
  auto shared = std::make_shared<const Breakpoints>(std::move(grid));

  // r_i reads bit (m - i) of the piece index; w_j multiplies r_i for each set bit i-1 of j.
  std::vector<std::size_t> reversed(size);
  for (std::size_t t = 0; t < size; ++t) {
    std::size_t r = 0;
    for (unsigned b = 0; b < m; ++b) {
      if (t & (std::size_t{1} << b)) r |= std::size_t{1} << (m - 1 - b);
    }
    reversed[t] = r;
  }

  OrthogonalSystem sys;
  sys.functions.reserve(size);
  for (std::size_t j = 0; j < size; ++j) {
    std::vector<Rational> values(size);
    for (std::size_t t = 0; t < size; ++t) values[t] = (std::popcount(j & reversed[t]) % 2) ? -1 : 1;
    sys.functions.emplace_back(shared, std::move(values));
  }
  sys.certified_orthogonal = true;
  sys.sup_bound = 1;
  return sys;
}

SelectionResult lemma5_select(std::span<const StepFunction> candidates, std::span<const StepFunction> targets,
                              bool verify_candidates, unsigned threads) {
  if (candidates.empty()) throw Error(ErrorCode::EmptyCandidates, "no candidates to select from");
  const std::size_t n = candidates.size();
  const std::size_t m = targets.size();

  std::vector<StepFunction> all(candidates.begin(), candidates.end());
  all.insert(all.end(), targets.begin(), targets.end());
  Aligned aligned(std::move(all));

  if (verify_candidates) {
    for (std::size_t i = 0; i < n; ++i) {
      if (aligned.inner(i, i) > 1) {
        throw Error(ErrorCode::NotOrthogonal, "candidate " + std::to_string(i + 1) + " has L2 norm above 1");
      }
      for (std::size_t j = i + 1; j < n; ++j) {
        if (aligned.inner(i, j) != 0) {
          throw Error(ErrorCode::NotOrthogonal, "candidates " + std::to_string(i + 1) + " and " +
                                                    std::to_string(j + 1) + " are not orthogonal");
        }
      }
    }
  }

  std::vector<Rational> sums(n);
  parallel_for(n, threads, [&](std::size_t l) {
    Rational s(0);
    for (std::size_t j = 0; j < m; ++j) s += abs(aligned.inner(n + j, l));
    sums[l] = s;
  });

  SelectionResult out;
  out.index = static_cast<std::size_t>(std::min_element(sums.begin(), sums.end()) - sums.begin());
  out.achieved_sum = sums[out.index];
  Rational norms(0);
  for (std::size_t j = 0; j < m; ++j) norms += aligned.inner(n + j, n + j);
  out.bound_squared = Rational(static_cast<unsigned long>(m)) * norms / Rational(static_cast<unsigned long>(n));
  out.holds = out.achieved_sum * out.achieved_sum <= out.bound_squared;
  return out;
}

SelectionCertificate greedy_subsequence(const OrthogonalSystem& sys, std::size_t rho, std::size_t steps,
                                        unsigned threads) {
  if (rho < 8) throw Error(ErrorCode::OutOfRange, "window base must be at least 8");
  if (steps > 16) throw Error(ErrorCode::CapacityExceeded, "2^m target products capped at m <= 16");
  if (sys.functions.empty()) throw Error(ErrorCode::EmptyCandidates, "empty system");

  const OrthogonalSystem checked = sys.certified_orthogonal ? sys : certify(sys.functions);
  const auto fs = checked.normalized();
  const std::size_t total = fs.size();

  SelectionCertificate cert;
  cert.window_base = rho;
  cert.chosen_indices.push_back(1);
  cert.head_term = abs(integral(fs[0]));
  cert.total = cert.head_term;

  std::vector<StepFunction> products{StepFunction::constant(Rational(1), Rational(1)), fs[0]};
  std::size_t lo = 1;
  for (std::size_t m = 1; m <= steps; ++m) {
    lo *= rho;
    const std::size_t hi = lo * rho;
    if (lo > total) {
      throw Error(ErrorCode::WindowExhausted, "window [" + std::to_string(lo) + "," + std::to_string(hi) +
                                                  ") lies beyond the " + std::to_string(total) + " functions");
    }
    const std::size_t hi_trunc = std::min(hi, total + 1);
    std::span<const StepFunction> window(fs.begin() + static_cast<std::ptrdiff_t>(lo - 1),
                                         fs.begin() + static_cast<std::ptrdiff_t>(hi_trunc - 1));
    auto sel = lemma5_select(window, products, false, threads);

    SelectionStep step;
    step.step = m;
    step.window_lo = lo;
    step.window_hi = hi_trunc;
    step.full_window = hi_trunc == hi;
    step.chosen = lo + sel.index;
    step.targets = products.size();
    step.per_step_sum = sel.achieved_sum;
    step.per_step_bound_squared = sel.bound_squared;
    step.per_step_bound = std::sqrt(to_double(sel.bound_squared));
    step.within_bound = sel.holds;
    step.below_half_power = step.per_step_sum * Rational(mpz_class(1) << static_cast<mp_bitcnt_t>(m)) < 1;

    const StepFunction& picked = fs[step.chosen - 1];
    const std::size_t before = products.size();
    for (std::size_t i = 0; i < before; ++i) {
      const StepFunction pair[] = {products[i], picked};
      products.push_back(product(pair));
    }
    cert.chosen_indices.push_back(step.chosen);
    cert.total += step.per_step_sum;
    cert.steps.push_back(std::move(step));
  }
  return cert;
}

BoundedSystem selected_system(const OrthogonalSystem& sys, std::span<const std::size_t> chosen_one_based) {
  std::vector<StepFunction> picked;
  const Rational factor = 1 / sys.sup_bound;
  for (auto idx : chosen_one_based) {
    if (idx == 0 || idx > sys.size()) throw Error(ErrorCode::BadSubset, "index " + std::to_string(idx) + " out of range");
    picked.push_back(sys.sup_bound == 1 ? sys.functions[idx - 1] : scale(sys.functions[idx - 1], factor));
  }
  return BoundedSystem::unit(std::move(picked));
}

Rational selected_mu(const OrthogonalSystem& sys, const SelectionCertificate& cert) {
  auto selected = selected_system(sys, cert.chosen_indices);
  if (selected.empty()) return Rational(0);
  return multiplicative_error(selected, IndexFamily::cardinality_cap(selected.size())).mu;
}

MergedSelection merge_selections(const OrthogonalSystem& sys, const SelectionCertificate& a,
                                 const SelectionCertificate& b) {
  MergedSelection out;
  std::set_union(a.chosen_indices.begin(), a.chosen_indices.end(), b.chosen_indices.begin(), b.chosen_indices.end(),
                 std::back_inserter(out.indices));
  auto selected = selected_system(sys, out.indices);
  out.mu = selected.empty() ? Rational(0)
                            : multiplicative_error(selected, IndexFamily::cardinality_cap(selected.size())).mu;
  out.certificate_sum = a.total + b.total;
  return out;
}

}  // namespace multsys
