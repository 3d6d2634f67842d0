#pragma once

// Bounded systems, index families, mixed moments and the multiplicative error.

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "multsys/rational.hpp"
#include "multsys/stepfn.hpp"

namespace multsys {

/// n step functions on a common [0, T) with bounds A_k < 0 < B_k.
class BoundedSystem {
 public:
  BoundedSystem() = default;

  /// Validates shared domain, A_k < 0 < B_k and A_k <= values <= B_k.
  static BoundedSystem make(std::vector<StepFunction> functions, std::vector<Rational> lower,
                            std::vector<Rational> upper);
  /// Bounds (-1, 1) for every function.
  static BoundedSystem unit(std::vector<StepFunction> functions);

  std::size_t size() const { return functions_.size(); }
  bool empty() const { return functions_.empty(); }
  /// Domain length T; 1 for the empty system.
  Rational domain_length() const;

  const std::vector<StepFunction>& functions() const { return functions_; }
  const StepFunction& function(std::size_t k) const { return functions_[k]; }
  const std::vector<Rational>& lower() const { return lower_; }
  const std::vector<Rational>& upper() const { return upper_; }
  /// C_k = min(-A_k, B_k).
  Rational c(std::size_t k) const;

  friend bool operator==(const BoundedSystem&, const BoundedSystem&) = default;

 private:
  std::vector<StepFunction> functions_;
  std::vector<Rational> lower_;
  std::vector<Rational> upper_;
};

/// Zero-based, strictly ascending index list.
using Subset = std::vector<std::size_t>;

/// "{1,2}" with one-based indices.
std::string format_subset(const Subset& s);

/// Either all nonempty subsets of cardinality <= l, or an explicit list.
class IndexFamily {
 public:
  struct CardinalityCap {
    std::size_t l;
  };
  struct Explicit {
    std::vector<Subset> subsets;
  };

  static IndexFamily cardinality_cap(std::size_t l) { return IndexFamily(CardinalityCap{l}); }
  /// Subsets given with zero-based indices.
  static IndexFamily explicit_list(std::vector<Subset> subsets) { return IndexFamily(Explicit{std::move(subsets)}); }

  const std::variant<CardinalityCap, Explicit>& variant() const { return family_; }
  std::string describe() const;

 private:
  explicit IndexFamily(std::variant<CardinalityCap, Explicit> f) : family_(std::move(f)) {}
  std::variant<CardinalityCap, Explicit> family_;
};

/// Upper bound on enumerated family size (2^22).
inline constexpr std::size_t kFamilyCap = std::size_t{1} << 22;

/// Deterministic order: ascending cardinality, then lexicographic.
std::vector<Subset> enumerate_family(std::size_t n, const IndexFamily& family);

/// (1/T) * integral of the product of the selected functions.
Rational mixed_moment(const BoundedSystem& sys, const Subset& subset);

struct MomentEntry {
  Subset subset;
  Rational moment;      // (1/T) ∫ ∏ φ
  Rational normalized;  // |moment| / ∏ C
};

struct MomentTable {
  std::vector<MomentEntry> entries;

  /// "subset;moment;normalized" rows, rationals as p/q.
  std::string to_csv() const;
};

struct MomentOptions {
  unsigned threads = 1;
};

/// Exact moments for every subset, in the given order.
std::vector<Rational> mixed_moments(const BoundedSystem& sys, const std::vector<Subset>& subsets,
                                    const MomentOptions& options = {});

MomentTable moment_table(const BoundedSystem& sys, const IndexFamily& family, const MomentOptions& options = {});

struct MultiplicativeError {
  Rational mu;
  MomentTable table;
};

/// mu = sum over the family of |E ∏ φ| / ∏ C.
MultiplicativeError multiplicative_error(const BoundedSystem& sys, const IndexFamily& family,
                                         const MomentOptions& options = {});

bool is_multiplicative(const BoundedSystem& sys, const IndexFamily& family, const MomentOptions& options = {});

}  // namespace multsys
