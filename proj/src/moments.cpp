#include "multsys/moments.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <thread>

#include "multsys/error.hpp"

namespace multsys {

// BoundedSystem -----------------------------------------------------------

BoundedSystem BoundedSystem::make(std::vector<StepFunction> functions, std::vector<Rational> lower,
                                  std::vector<Rational> upper) {
  if (lower.size() != functions.size() || upper.size() != functions.size()) {
    throw Error(ErrorCode::LengthMismatch, "bounds do not match the number of functions");
  }
  for (std::size_t k = 0; k < functions.size(); ++k) {
    lower[k].canonicalize();
    upper[k].canonicalize();
    if (!(lower[k] < 0 && upper[k] > 0)) {
      throw Error(ErrorCode::BadBounds, "function " + std::to_string(k + 1) + " needs A < 0 < B, got [" +
                                            to_string(lower[k]) + "," + to_string(upper[k]) + "]");
    }
    if (functions[k].is_empty()) throw Error(ErrorCode::EmptyDomain, "function " + std::to_string(k + 1));
    if (functions[k].length() != functions[0].length()) {
      throw Error(ErrorCode::DomainMismatch, "function " + std::to_string(k + 1) + " has a different domain");
    }
    for (const auto& v : functions[k].values()) {
      if (v < lower[k] || v > upper[k]) {
        throw Error(ErrorCode::ValueOutOfBounds, "function " + std::to_string(k + 1) + " takes value " +
                                                     to_string(v) + " outside [" + to_string(lower[k]) + "," +
                                                     to_string(upper[k]) + "]");
      }
    }
  }
  BoundedSystem sys;
  sys.functions_ = std::move(functions);
  sys.lower_ = std::move(lower);
  sys.upper_ = std::move(upper);
  return sys;
}

BoundedSystem BoundedSystem::unit(std::vector<StepFunction> functions) {
  std::vector<Rational> lower(functions.size(), Rational(-1));
  std::vector<Rational> upper(functions.size(), Rational(1));
  return make(std::move(functions), std::move(lower), std::move(upper));
}

Rational BoundedSystem::domain_length() const {
  return functions_.empty() ? Rational(1) : functions_.front().length();
}

Rational BoundedSystem::c(std::size_t k) const {
  Rational neg_lower = -lower_[k];
  return std::min(neg_lower, upper_[k]);
}

// Families ----------------------------------------------------------------

std::string format_subset(const Subset& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s[i] + 1);
  }
  return out + "}";
}

std::string IndexFamily::describe() const {
  if (auto cap = std::get_if<CardinalityCap>(&family_)) return "l=" + std::to_string(cap->l);
  const auto& list = std::get<Explicit>(family_).subsets;
  std::string out = "explicit[";
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) out += ',';
    out += format_subset(list[i]);
  }
  return out + "]";
}

namespace {

bool cardinality_less(const Subset& a, const Subset& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::size_t capped_family_size(std::size_t n, std::size_t l) {
  // Sum of C(n, v) for v = 1..l, saturating above the family cap.
  long double total = 0, binom = 1;
  for (std::size_t v = 1; v <= l; ++v) {
    binom = binom * static_cast<long double>(n - v + 1) / static_cast<long double>(v);
    total += binom;
    if (total > static_cast<long double>(kFamilyCap)) return kFamilyCap + 1;
  }
  return static_cast<std::size_t>(total + 0.5L);
}

}  // namespace

std::vector<Subset> enumerate_family(std::size_t n, const IndexFamily& family) {
  std::vector<Subset> out;
  if (auto cap = std::get_if<IndexFamily::CardinalityCap>(&family.variant())) {
    if (n == 0) return out;
    if (cap->l < 1 || cap->l > n) {
      throw Error(ErrorCode::CapTooLarge, "cardinality cap " + std::to_string(cap->l) + " not in [1," +
                                              std::to_string(n) + "]");
    }
    std::size_t count = capped_family_size(n, cap->l);
    if (count > kFamilyCap) {
      throw Error(ErrorCode::CapacityExceeded, "family M_" + std::to_string(cap->l) + " over " + std::to_string(n) +
                                                   " indices exceeds 2^22 subsets");
    }
    out.reserve(count);
    for (std::size_t size = 1; size <= cap->l; ++size) {
      Subset s(size);
      std::iota(s.begin(), s.end(), std::size_t{0});
      while (true) {
        out.push_back(s);
        // Next combination in lexicographic order.
        std::size_t i = size;
        while (i > 0 && s[i - 1] == n - size + i - 1) --i;
        if (i == 0) break;
        ++s[i - 1];
        for (std::size_t j = i; j < size; ++j) s[j] = s[j - 1] + 1;
      }
    }
    return out;
  }

  out = std::get<IndexFamily::Explicit>(family.variant()).subsets;
  if (out.size() > kFamilyCap) throw Error(ErrorCode::CapacityExceeded, "explicit family exceeds 2^22 subsets");
  for (const auto& s : out) {
    if (s.empty()) throw Error(ErrorCode::BadSubset, "empty subset");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= n) throw Error(ErrorCode::BadSubset, format_subset(s) + " has index beyond " + std::to_string(n));
      if (i > 0 && s[i - 1] >= s[i]) throw Error(ErrorCode::BadSubset, format_subset(s) + " is not strictly ascending");
    }
  }
  std::sort(out.begin(), out.end(), cardinality_less);
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw Error(ErrorCode::BadSubset, "duplicate subsets in explicit family");
  }
  return out;
}

// Moments -----------------------------------------------------------------

namespace {

void validate_subset(const BoundedSystem& sys, const Subset& s) {
  if (s.empty()) throw Error(ErrorCode::BadSubset, "empty subset");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] >= sys.size()) throw Error(ErrorCode::BadSubset, format_subset(s) + " exceeds system size");
    if (i > 0 && s[i - 1] >= s[i]) throw Error(ErrorCode::BadSubset, format_subset(s) + " is not strictly ascending");
  }
}

// Evaluates moments of lexicographically ordered subsets, reusing the running
// product of the longest shared prefix.
class PrefixProducts {
 public:
  PrefixProducts(const std::vector<StepFunction>& aligned, const std::vector<Rational>& lengths, bool uniform,
                 const Rational& domain)
      : aligned_(aligned), lengths_(lengths), uniform_(uniform), domain_(domain) {}

  Rational moment(const Subset& s) {
    std::size_t shared = 0;
    while (shared < s.size() && shared < prefix_.size() && prefix_[shared] == s[shared]) ++shared;
    prefix_.resize(shared);
    if (levels_.size() < s.size()) levels_.resize(s.size());

    for (std::size_t d = shared; d < s.size(); ++d) {
      auto v = aligned_[s[d]].values();
      auto& level = levels_[d];
      level.resize(v.size());
      if (d == 0) {
        std::copy(v.begin(), v.end(), level.begin());
      } else {
        const auto& prev = levels_[d - 1];
        for (std::size_t i = 0; i < v.size(); ++i) mpq_mul(level[i].get_mpq_t(), prev[i].get_mpq_t(), v[i].get_mpq_t());
      }
      prefix_.push_back(s[d]);
    }

    const auto& top = levels_[s.size() - 1];
    Rational total(0);
    if (uniform_) {
      for (const auto& x : top) total += x;
      total *= lengths_.front();
    } else {
      for (std::size_t i = 0; i < top.size(); ++i) {
        if (top[i] == 0) continue;
        mpq_mul(term_.get_mpq_t(), top[i].get_mpq_t(), lengths_[i].get_mpq_t());
        total += term_;
      }
    }
    total /= domain_;
    return total;
  }

 private:
  const std::vector<StepFunction>& aligned_;
  const std::vector<Rational>& lengths_;
  bool uniform_;
  Rational domain_;
  Subset prefix_;
  std::vector<std::vector<Rational>> levels_;
  Rational term_;
};

}  // namespace

Rational mixed_moment(const BoundedSystem& sys, const Subset& subset) {
  validate_subset(sys, subset);
  std::vector<StepFunction> selected;
  for (auto k : subset) selected.push_back(sys.function(k));
  return integral(product(selected)) / sys.domain_length();
}

std::vector<Rational> mixed_moments(const BoundedSystem& sys, const std::vector<Subset>& subsets,
                                    const MomentOptions& options) {
  for (const auto& s : subsets) validate_subset(sys, s);
  std::vector<Rational> result(subsets.size());
  if (subsets.empty()) return result;

  auto aligned = common_refinement(sys.functions());
  const auto& grid = aligned.front().breakpoints();
  std::vector<Rational> lengths(grid.size() - 1);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) lengths[i] = grid[i + 1] - grid[i];
  bool uniform = std::all_of(lengths.begin(), lengths.end(), [&](const Rational& x) { return x == lengths[0]; });

  std::vector<std::size_t> order(subsets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return subsets[a] < subsets[b]; });

  const Rational domain = sys.domain_length();
  auto run_chunk = [&](std::size_t begin, std::size_t end) {
    PrefixProducts products(aligned, lengths, uniform, domain);
    for (std::size_t i = begin; i < end; ++i) result[order[i]] = products.moment(subsets[order[i]]);
  };

  unsigned threads = std::max(1u, options.threads);
  if (threads == 1 || subsets.size() < 2 * threads) {
    run_chunk(0, order.size());
    return result;
  }
  std::vector<std::thread> workers;
  std::size_t chunk = (order.size() + threads - 1) / threads;
  for (std::size_t begin = 0; begin < order.size(); begin += chunk) {
    workers.emplace_back(run_chunk, begin, std::min(order.size(), begin + chunk));
  }
  for (auto& w : workers) w.join();
  return result;
}

MomentTable moment_table(const BoundedSystem& sys, const IndexFamily& family, const MomentOptions& options) {
  auto subsets = enumerate_family(sys.size(), family);
  auto moments = mixed_moments(sys, subsets, options);
  MomentTable table;
  table.entries.reserve(subsets.size());
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    Rational denom(1);
    for (auto k : subsets[i]) denom *= sys.c(k);
    Rational normalized = abs(moments[i]) / denom;
    table.entries.push_back({std::move(subsets[i]), std::move(moments[i]), std::move(normalized)});
  }
  return table;
}

std::string MomentTable::to_csv() const {
  std::ostringstream out;
  out << "subset;moment;normalized\n";
  for (const auto& e : entries) out << format_subset(e.subset) << ';' << to_string(e.moment) << ';' << to_string(e.normalized) << '\n';
  return out.str();
}

MultiplicativeError multiplicative_error(const BoundedSystem& sys, const IndexFamily& family,
                                         const MomentOptions& options) {
  MultiplicativeError out;
  out.table = moment_table(sys, family, options);
  out.mu = 0;
  // Summed in family order so the result never depends on the thread count.
  for (const auto& e : out.table.entries) out.mu += e.normalized;
  return out;
}

bool is_multiplicative(const BoundedSystem& sys, const IndexFamily& family, const MomentOptions& options) {
  return multiplicative_error(sys, family, options).mu == 0;
}

}  // namespace multsys
