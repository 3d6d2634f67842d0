#include "multsys/stepfn.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iterator>
#include <string>

#include "multsys/error.hpp"

namespace multsys {

namespace {

std::atomic<std::size_t> g_piece_cap{std::size_t{1} << 20};

std::shared_ptr<const Breakpoints> share(Breakpoints b) {
  return std::make_shared<const Breakpoints>(std::move(b));
}

void require_same_domain(std::span<const StepFunction> fs) {
  for (std::size_t i = 1; i < fs.size(); ++i) {
    if (fs[i].length() != fs[0].length()) {
      throw Error(ErrorCode::DomainMismatch, "domain lengths " + to_string(fs[0].length()) + " and " +
                                                 to_string(fs[i].length()) + " differ");
    }
  }
}

// Sorted union of the breakpoints of all fs (shared when already aligned).
std::shared_ptr<const Breakpoints> union_breakpoints(std::span<const StepFunction> fs) {
  require_same_domain(fs);
  std::vector<const Breakpoints*> distinct;
  for (const auto& f : fs) {
    const Breakpoints* p = f.shared_breakpoints().get();
    if (std::find(distinct.begin(), distinct.end(), p) == distinct.end()) distinct.push_back(p);
  }
  if (distinct.size() == 1) return fs[0].shared_breakpoints();

  Breakpoints merged = *distinct[0];
  Breakpoints scratch;
  for (std::size_t i = 1; i < distinct.size(); ++i) {
    scratch.clear();
    scratch.reserve(merged.size() + distinct[i]->size());
    std::set_union(merged.begin(), merged.end(), distinct[i]->begin(), distinct[i]->end(),
                   std::back_inserter(scratch));
    merged.swap(scratch);
    check_piece_count(merged.size() - 1, "common refinement");
  }
  return share(std::move(merged));
}

// Calls visit(i, value) with f's value on piece i of `grid`, which must refine f.
template <class Visit>
void walk_aligned(const Breakpoints& grid, const StepFunction& f, Visit&& visit) {
  const auto fb = f.breakpoints();
  const auto fv = f.values();
  if (&grid == f.shared_breakpoints().get()) {
    for (std::size_t i = 0; i < fv.size(); ++i) visit(i, fv[i]);
    return;
  }
  std::size_t j = 0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    while (fb[j + 1] <= grid[i]) ++j;
    visit(i, fv[j]);
  }
}

}  // namespace

std::size_t piece_cap() { return g_piece_cap.load(std::memory_order_relaxed); }

void set_piece_cap(std::size_t cap) { g_piece_cap.store(cap, std::memory_order_relaxed); }

void check_piece_count(std::size_t pieces, std::string_view what) {
  if (pieces > piece_cap()) {
    throw Error(ErrorCode::CapacityExceeded, std::string(what) + " needs " + std::to_string(pieces) +
                                                 " pieces, cap is " + std::to_string(piece_cap()));
  }
}

// StepFunction ------------------------------------------------------------

StepFunction::StepFunction(std::shared_ptr<const Breakpoints> breakpoints, std::vector<Rational> values)
    : breaks_(std::move(breakpoints)), values_(std::move(values)) {}

StepFunction StepFunction::make(std::vector<Rational> breakpoints, std::vector<Rational> values) {
  if (breakpoints.size() < 2) throw Error(ErrorCode::EmptyDomain, "need at least two breakpoints");
  for (auto& b : breakpoints) b.canonicalize();
  for (auto& v : values) v.canonicalize();
  if (breakpoints.front() != 0) {
    throw Error(ErrorCode::NonAscendingBreakpoints, "first breakpoint must be 0");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i - 1] < breakpoints[i])) {
      throw Error(ErrorCode::NonAscendingBreakpoints,
                  "breakpoint " + to_string(breakpoints[i]) + " does not exceed " + to_string(breakpoints[i - 1]));
    }
  }
  if (values.size() + 1 != breakpoints.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(breakpoints.size()) + " breakpoints but " +
                                               std::to_string(values.size()) + " values");
  }
  check_piece_count(values.size(), "make_step");
  return StepFunction(share(std::move(breakpoints)), std::move(values));
}

StepFunction StepFunction::constant(const Rational& value, const Rational& length) {
  return make({Rational(0), length}, {value});
}

StepFunction StepFunction::empty() { return StepFunction(share(Breakpoints{Rational(0)}), {}); }

bool operator==(const StepFunction& a, const StepFunction& b) {
  return (a.breaks_ == b.breaks_ || *a.breaks_ == *b.breaks_) && a.values_ == b.values_;
}

StepFunction make_step(std::vector<Rational> breakpoints, std::vector<Rational> values) {
  return StepFunction::make(std::move(breakpoints), std::move(values));
}

// Algebra -----------------------------------------------------------------

std::vector<StepFunction> common_refinement(std::span<const StepFunction> fs) {
  if (fs.empty()) return {};
  auto grid = union_breakpoints(fs);
  std::vector<StepFunction> out;
  out.reserve(fs.size());
  for (const auto& f : fs) {
    if (f.shared_breakpoints() == grid) {
      out.push_back(f);
      continue;
    }
    std::vector<Rational> values(grid->size() - 1);
    walk_aligned(*grid, f, [&](std::size_t i, const Rational& v) { values[i] = v; });
    out.emplace_back(grid, std::move(values));
  }
  return out;
}

StepFunction product(std::span<const StepFunction> fs) {
  if (fs.empty()) throw Error(ErrorCode::EmptyDomain, "product of no functions");
  auto grid = union_breakpoints(fs);
  std::vector<Rational> values(grid->size() - 1, Rational(1));
  for (const auto& f : fs) {
    walk_aligned(*grid, f, [&](std::size_t i, const Rational& v) { values[i] *= v; });
  }
  return StepFunction(grid, std::move(values));
}

StepFunction linear_combination(std::span<const Rational> coeffs, std::span<const StepFunction> fs) {
  if (coeffs.size() != fs.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(coeffs.size()) + " coefficients for " +
                                               std::to_string(fs.size()) + " functions");
  }
  if (fs.empty()) throw Error(ErrorCode::EmptyDomain, "linear combination of no functions");
  auto grid = union_breakpoints(fs);
  std::vector<Rational> values(grid->size() - 1, Rational(0));
  Rational term;
  for (std::size_t k = 0; k < fs.size(); ++k) {
    if (coeffs[k] == 0) continue;
    walk_aligned(*grid, fs[k], [&](std::size_t i, const Rational& v) {
      term = coeffs[k] * v;
      values[i] += term;
    });
  }
  return StepFunction(grid, std::move(values));
}

StepFunction scale(const StepFunction& f, const Rational& factor) {
  std::vector<Rational> values(f.values().begin(), f.values().end());
  for (auto& v : values) v *= factor;
  return StepFunction(f.shared_breakpoints(), std::move(values));
}

Rational integral(const StepFunction& f) {
  Rational total(0);
  Rational term;
  const auto b = f.breakpoints();
  const auto v = f.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    term = b[i + 1] - b[i];
    term *= v[i];
    total += term;
  }
  return total;
}

Rational evaluate(const StepFunction& f, const Rational& x) {
  if (x < 0 || x >= f.length()) {
    throw Error(ErrorCode::OutOfDomain, to_string(x) + " outside [0," + to_string(f.length()) + ")");
  }
  const auto b = f.breakpoints();
  // First breakpoint strictly greater than x closes the piece containing x.
  auto it = std::upper_bound(b.begin(), b.end(), x);
  return f.values()[static_cast<std::size_t>(it - b.begin()) - 1];
}

StepFunction dilate(const StepFunction& f, const Rational& factor) {
  if (factor <= 0) throw Error(ErrorCode::NonPositiveFactor, "dilation factor " + to_string(factor));
  if (factor == 1) return f;
  Breakpoints b(f.breakpoints().begin(), f.breakpoints().end());
  for (auto& x : b) x /= factor;
  return StepFunction(share(std::move(b)), std::vector<Rational>(f.values().begin(), f.values().end()));
}

StepFunction concat(const StepFunction& f, const StepFunction& g) {
  const StepFunction parts[] = {f, g};
  return concat_all(parts);
}

StepFunction concat_all(std::span<const StepFunction> fs) {
  std::vector<const StepFunction*> parts;
  std::size_t pieces = 0;
  for (const auto& f : fs) {
    if (f.is_empty()) continue;
    parts.push_back(&f);
    pieces += f.pieces();
  }
  if (parts.empty()) return StepFunction::empty();
  if (parts.size() == 1) return *parts.front();
  check_piece_count(pieces, "concat");

  Breakpoints b{Rational(0)};
  std::vector<Rational> values;
  b.reserve(pieces + 1);
  values.reserve(pieces);
  Rational offset(0);
  for (const auto* f : parts) {
    auto fb = f->breakpoints();
    for (std::size_t i = 1; i < fb.size(); ++i) b.push_back(fb[i] + offset);
    values.insert(values.end(), f->values().begin(), f->values().end());
    offset += f->length();
  }
  return StepFunction(share(std::move(b)), std::move(values));
}

StepFunction restrict_to(const StepFunction& f, const Rational& end) {
  if (end <= 0 || end > f.length()) {
    throw Error(ErrorCode::OutOfDomain, "restriction end " + to_string(end) + " outside (0," +
                                            to_string(f.length()) + "]");
  }
  if (end == f.length()) return f;
  const auto fb = f.breakpoints();
  Breakpoints b;
  std::vector<Rational> values;
  for (std::size_t i = 0; i < f.pieces() && fb[i] < end; ++i) {
    b.push_back(fb[i]);
    values.push_back(f.values()[i]);
  }
  b.push_back(end);
  return StepFunction(share(std::move(b)), std::move(values));
}

StepFunction normalize(const StepFunction& f) {
  if (f.is_empty()) return f;
  const auto fb = f.breakpoints();
  const auto fv = f.values();
  Breakpoints b{fb[0]};
  std::vector<Rational> values{fv[0]};
  for (std::size_t i = 1; i < fv.size(); ++i) {
    if (fv[i] == values.back()) continue;
    b.push_back(fb[i]);
    values.push_back(fv[i]);
  }
  b.push_back(fb.back());
  return StepFunction(share(std::move(b)), std::move(values));
}

bool equivalent(const StepFunction& f, const StepFunction& g) {
  if (f.length() != g.length()) return false;
  if (f.is_empty()) return true;
  const StepFunction pair[] = {f, g};
  auto aligned = common_refinement(pair);
  return std::equal(aligned[0].values().begin(), aligned[0].values().end(), aligned[1].values().begin());
}

Rational measure_above(const StepFunction& f, const Rational& level) {
  Rational total(0);
  for (std::size_t i = 0; i < f.pieces(); ++i) {
    if (f.values()[i] > level) total += f.piece_length(i);
  }
  return total;
}

Rational measure_equal(const StepFunction& f, const Rational& level) {
  Rational total(0);
  for (std::size_t i = 0; i < f.pieces(); ++i) {
    if (f.values()[i] == level) total += f.piece_length(i);
  }
  return total;
}

Rational min_value(const StepFunction& f) {
  if (f.is_empty()) throw Error(ErrorCode::EmptyDomain, "min of empty function");
  return *std::min_element(f.values().begin(), f.values().end());
}

Rational max_value(const StepFunction& f) {
  if (f.is_empty()) throw Error(ErrorCode::EmptyDomain, "max of empty function");
  return *std::max_element(f.values().begin(), f.values().end());
}

// ConvexSpec --------------------------------------------------------------

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_integral(double p) { return std::floor(p) == p && p <= 1024.0; }
}  // namespace

ConvexSpec ConvexSpec::power(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorCode::OutOfRange, "power exponent must be >= 1");
  return ConvexSpec(PowerPhi{p});
}

ConvexSpec ConvexSpec::exp(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(ErrorCode::OutOfRange, "exp rate must be > 0");
  return ConvexSpec(ExpPhi{gamma});
}

ConvexSpec ConvexSpec::hinge_square(double lambda) {
  if (!std::isfinite(lambda)) throw Error(ErrorCode::OutOfRange, "hinge level must be finite");
  return ConvexSpec(HingeSquarePhi{lambda});
}

ConvexSpec ConvexSpec::abs() { return ConvexSpec(AbsPhi{}); }

ConvexSpec ConvexSpec::parse(std::string_view text) {
  auto colon = text.find(':');
  std::string kind(text.substr(0, colon));
  if (kind == "abs" && colon == std::string_view::npos) return abs();
  if (colon == std::string_view::npos) throw Error(ErrorCode::ParseError, "convex spec needs a parameter");
  double param = to_double(parse_rational(text.substr(colon + 1)));
  if (kind == "power") return power(param);
  if (kind == "exp") return exp(param);
  if (kind == "hinge") return hinge_square(param);
  throw Error(ErrorCode::ParseError, "unknown convex spec '" + std::string(text) + "'");
}

double ConvexSpec::operator()(double t) const {
  return std::visit(overloaded{
                        [&](const PowerPhi& s) { return std::pow(std::fabs(t), s.p); },
                        [&](const ExpPhi& s) { return std::exp(s.gamma * t); },
                        [&](const HingeSquarePhi& s) {
                          double h = std::max(t - s.lambda, 0.0);
                          return h * h;
                        },
                        [&](const AbsPhi&) { return std::fabs(t); },
                    },
                    phi_);
}

bool ConvexSpec::is_exact() const {
  return std::visit(overloaded{
                        [](const PowerPhi& s) { return is_integral(s.p); },
                        [](const ExpPhi&) { return false; },
                        [](const HingeSquarePhi&) { return true; },
                        [](const AbsPhi&) { return true; },
                    },
                    phi_);
}

std::optional<Rational> ConvexSpec::exact(const Rational& t) const {
  if (!is_exact()) return std::nullopt;
  return std::visit(overloaded{
                        [&](const PowerPhi& s) -> std::optional<Rational> {
                          return multsys::pow(multsys::abs(t), static_cast<unsigned>(s.p));
                        },
                        [&](const ExpPhi&) -> std::optional<Rational> { return std::nullopt; },
                        [&](const HingeSquarePhi& s) -> std::optional<Rational> {
                          Rational h = t - rational_from_double(s.lambda);
                          if (h < 0) return Rational(0);
                          return Rational(h * h);
                        },
                        [&](const AbsPhi&) -> std::optional<Rational> { return multsys::abs(t); },
                    },
                    phi_);
}

std::string ConvexSpec::name() const {
  auto fmt = [](double x) {
    std::string s = std::to_string(x);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  };
  return std::visit(overloaded{
                        [&](const PowerPhi& s) { return "power:" + fmt(s.p); },
                        [&](const ExpPhi& s) { return "exp:" + fmt(s.gamma); },
                        [&](const HingeSquarePhi& s) { return "hinge:" + fmt(s.lambda); },
                        [](const AbsPhi&) { return std::string("abs"); },
                    },
                    phi_);
}

ConvexValue convex_expectation(const StepFunction& f, const ConvexSpec& phi) {
  ConvexValue out;
  if (phi.is_exact()) {
    Rational total(0);
    for (std::size_t i = 0; i < f.pieces(); ++i) total += *phi.exact(f.values()[i]) * f.piece_length(i);
    out.approx = to_double(total);
    out.exact = std::move(total);
    return out;
  }
  long double total = 0.0L;
  for (std::size_t i = 0; i < f.pieces(); ++i) {
    total += static_cast<long double>(phi(to_double(f.values()[i]))) * to_double(f.piece_length(i));
  }
  out.approx = static_cast<double>(total);
  return out;
}

}  // namespace multsys
