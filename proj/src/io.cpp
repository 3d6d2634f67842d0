#include "multsys/io.hpp"

#include <fstream>
#include <sstream>

#include "multsys/error.hpp"

namespace multsys::io {

namespace {

json exact_list(std::span<const Rational> values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(exact(v));
  return out;
}

json subset_json(const Subset& s) {
  json out = json::array();
  for (auto k : s) out.push_back(k + 1);
  return out;
}

json optional_exact(const std::optional<Rational>& v) { return v ? exact(*v) : json(nullptr); }

std::size_t parse_count(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-') {
    throw Error(ErrorCode::ParseError, "bad " + what + " '" + text + "'");
  }
  return static_cast<std::size_t>(value);
}

}  // namespace

json exact(const Rational& value) { return to_string(value); }

json approx(double value) { return json{{"value", value}, {"approx", true}}; }

Rational rational_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(mpz_class(std::to_string(j.get<long long>())));
  throw Error(ErrorCode::ParseError, "expected an exact rational (string or integer), got " + j.dump());
}

json to_json(const StepFunction& f) {
  return json{{"breakpoints", exact_list(f.breakpoints())}, {"values", exact_list(f.values())}};
}

StepFunction step_from_json(const json& j) {
  if (!j.is_object() || !j.contains("breakpoints") || !j.contains("values") || !j["breakpoints"].is_array() ||
      !j["values"].is_array()) {
    throw Error(ErrorCode::ParseError, "step function needs 'breakpoints' and 'values' arrays");
  }
  std::vector<Rational> b, v;
  for (const auto& x : j["breakpoints"]) b.push_back(rational_from_json(x));
  for (const auto& x : j["values"]) v.push_back(rational_from_json(x));
  return StepFunction::make(std::move(b), std::move(v));
}

json to_json(const BoundedSystem& sys) {
  json functions = json::array();
  for (const auto& f : sys.functions()) functions.push_back(to_json(f));
  return json{{"functions", functions},
              {"lower_bounds", exact_list(sys.lower())},
              {"upper_bounds", exact_list(sys.upper())}};
}

BoundedSystem system_from_json(const json& j) {
  if (!j.is_object() || !j.contains("functions") || !j["functions"].is_array()) {
    throw Error(ErrorCode::ParseError, "system needs a 'functions' array");
  }
  std::vector<StepFunction> functions;
  for (const auto& f : j["functions"]) functions.push_back(step_from_json(f));
  auto bounds = [&](const char* key, int fallback) {
    std::vector<Rational> out;
    if (!j.contains(key)) return std::vector<Rational>(functions.size(), Rational(fallback));
    if (!j[key].is_array()) throw Error(ErrorCode::ParseError, std::string("'") + key + "' must be an array");
    for (const auto& x : j[key]) out.push_back(rational_from_json(x));
    return out;
  };
  auto lower = bounds("lower_bounds", -1);
  auto upper = bounds("upper_bounds", 1);
  return BoundedSystem::make(std::move(functions), std::move(lower), std::move(upper));
}

json to_json(const MomentTable& table) {
  json rows = json::array();
  for (const auto& e : table.entries) {
    rows.push_back({{"subset", subset_json(e.subset)}, {"moment", exact(e.moment)}, {"normalized", exact(e.normalized)}});
  }
  return rows;
}

json to_json(const IndependenceReport& report) {
  json failures = json::array();
  for (const auto& f : report.failures) {
    json pattern = json::array();
    for (bool u : f.upper) pattern.push_back(u ? "B" : "A");
    failures.push_back({{"subset", subset_json(f.subset)},
                        {"pattern", pattern},
                        {"joint", exact(f.joint)},
                        {"product", exact(f.product)}});
  }
  return json{{"independent", report.independent},
              {"measure_lower", exact_list(report.measure_lower)},
              {"marginals_match", report.marginals_match},
              {"failures", failures},
              {"patterns_checked", report.patterns_checked}};
}

json to_json(const ReductionTrace& trace) {
  json stages = json::object();
  for (const auto& s : trace.stage_tables) stages[s.stage] = to_json(s.table);
  return json{{"mu", exact(trace.mu)},
              {"family", trace.family.describe()},
              {"original", to_json(trace.original)},
              {"extended", to_json(trace.extended)},
              {"binarized", to_json(trace.binarized)},
              {"xi", to_json(trace.xi)},
              {"stage_tables", stages}};
}

json to_json(const DominationReport& report) {
  return json{{"phi", report.phi},
              {"lhs", approx(report.lhs)},
              {"rhs", approx(report.rhs)},
              {"lhs_exact", optional_exact(report.lhs_exact)},
              {"rhs_exact", optional_exact(report.rhs_exact)},
              {"mu", exact(report.mu)},
              {"exact_comparison", report.exact_comparison},
              {"holds", report.holds}};
}

json to_json(const KhintchinReport& report) {
  return json{{"p", approx(report.p)},
              {"mode", report.mode == KhintchinMode::EvenInteger ? "even" : "general"},
              {"constant", approx(report.constant)},
              {"constant_pi_variant", approx(report.constant_pi_variant)},
              {"constant_discrepancy", report.constant_discrepancy},
              {"lhs_norm", approx(report.lhs_norm)},
              {"rhs", approx(report.rhs)},
              {"lhs_pth_power", optional_exact(report.lhs_pth_power)},
              {"rhs_pth_power", optional_exact(report.rhs_pth_power)},
              {"mu", optional_exact(report.mu)},
              {"holds", report.holds}};
}

json to_json(const TailReport& report) {
  return json{{"lambda", exact(report.lambda)},
              {"exact_measure", exact(report.exact_measure)},
              {"bound", approx(report.bound)},
              {"mu", exact(report.mu)},
              {"mu_supplied", report.mu_supplied},
              {"spread", exact(report.spread)},
              {"holds", report.holds}};
}

json to_json(const MgfCheck& check) {
  return json{{"lhs", approx(check.lhs)}, {"rhs", approx(check.rhs)}, {"holds", check.holds}};
}

json to_json(const LacunarySpec& spec) {
  json tau = json::array();
  for (double t : spec.tau) tau.push_back(approx(t));
  return json{{"tau", tau}, {"lambda", approx(spec.lambda)}, {"n", spec.size()}};
}

json to_json(const TruncatedMu& result) {
  json collections = json::array();
  json violations = json::array();
  for (const auto& c : result.per_head_bounds) {
    json row{{"subset", subset_json(c.subset)},
             {"integral", approx(c.integral)},
             {"bound", approx(c.bound)},
             {"holds", c.holds}};
    if (!c.holds) violations.push_back(row);
    collections.push_back(std::move(row));
  }
  return json{{"mu_truncated", approx(result.mu_truncated)},
              {"prop4_bound", approx(result.prop4_bound)},
              {"tail_estimate", approx(result.tail_estimate)},
              {"collections", collections},
              {"violations", violations},
              {"holds", result.holds}};
}

json to_json(const SelectionCertificate& cert) {
  json steps = json::array();
  for (const auto& s : cert.steps) {
    steps.push_back({{"step", s.step},
                     {"window", {s.window_lo, s.window_hi}},
                     {"full_window", s.full_window},
                     {"chosen", s.chosen},
                     {"targets", s.targets},
                     {"per_step_sum", exact(s.per_step_sum)},
                     {"per_step_bound_squared", exact(s.per_step_bound_squared)},
                     {"per_step_bound", approx(s.per_step_bound)},
                     {"within_bound", s.within_bound},
                     {"below_half_power", s.below_half_power}});
  }
  return json{{"chosen_indices", cert.chosen_indices},
              {"steps", steps},
              {"head_term", exact(cert.head_term)},
              {"total", exact(cert.total)},
              {"window_base", cert.window_base}};
}

json to_json(const RubinshteinReport& report) {
  json tails = json::array();
  for (const auto& t : report.tails) tails.push_back(to_json(t));
  return json{{"n", report.n},
              {"l", report.l},
              {"mu", exact(report.mu)},
              {"multiplicative", report.multiplicative},
              {"domination", report.domination ? to_json(*report.domination) : json(nullptr)},
              {"tails", tails},
              {"khintchine", report.khintchine ? to_json(*report.khintchine) : json(nullptr)},
              {"holds", report.holds}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

BoundedSystem load_system_file(const std::filesystem::path& path) {
  try {
    return system_from_json(read_json_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

StepFunction load_step_file(const std::filesystem::path& path) {
  try {
    return step_from_json(read_json_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

BoundedSystem rademacher_system(std::size_t n) {
  if (n >= 40) throw Error(ErrorCode::CapacityExceeded, "rademacher:" + std::to_string(n));
  check_piece_count(std::size_t{1} << n, "rademacher:" + std::to_string(n));
  std::vector<StepFunction> functions;
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t pieces = std::size_t{1} << k;
    Breakpoints grid(pieces + 1);
    for (std::size_t j = 0; j <= pieces; ++j) grid[j] = ratio(static_cast<long>(j), pieces);
    std::vector<Rational> values(pieces);
    for (std::size_t j = 0; j < pieces; ++j) values[j] = (j % 2 == 0) ? 1 : -1;
    functions.emplace_back(std::make_shared<const Breakpoints>(std::move(grid)), std::move(values));
  }
  return BoundedSystem::unit(std::move(functions));
}

bool is_builtin_name(const std::string& name) {
  return name.rfind("rademacher:", 0) == 0 || name.rfind("walsh:", 0) == 0 || name.rfind("rubinshtein:", 0) == 0;
}

BoundedSystem builtin_system(const std::string& name) {
  if (name.rfind("rademacher:", 0) == 0) return rademacher_system(parse_count(name.substr(11), "size"));
  if (name.rfind("walsh:", 0) == 0) {
    auto m = parse_count(name.substr(6), "walsh order");
    if (m > 12) throw Error(ErrorCode::TooLarge, name + " (max walsh:12)");
    return BoundedSystem::unit(walsh_system(static_cast<unsigned>(m)).functions);
  }
  if (name.rfind("rubinshtein:", 0) == 0) {
    const auto rest = name.substr(12);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos || colon == 0) {
      throw Error(ErrorCode::ParseError, "expected rubinshtein:<f-path>:n, got " + name);
    }
    auto n = parse_count(rest.substr(colon + 1), "dilation depth");
    return dilated_system(build_phi(load_step_file(rest.substr(0, colon))), n);
  }
  throw Error(ErrorCode::UnknownBuiltin, "'" + name + "'");
}

BoundedSystem resolve_system(const std::string& spec) {
  if (is_builtin_name(spec)) return builtin_system(spec);
  if (std::filesystem::exists(spec)) return load_system_file(spec);
  if (spec.find(':') != std::string::npos) throw Error(ErrorCode::UnknownBuiltin, "'" + spec + "'");
  throw Error(ErrorCode::ParseError, "no such system file: " + spec);
}

IndexFamily parse_family(const std::string& spec, std::size_t n) {
  if (spec == "full") return IndexFamily::cardinality_cap(n == 0 ? 1 : n);
  if (spec.rfind("l=", 0) == 0) return IndexFamily::cardinality_cap(parse_count(spec.substr(2), "family cap"));
  json j = read_json_file(spec);
  if (j.is_object() && j.contains("subsets")) j = j["subsets"];
  if (!j.is_array()) throw Error(ErrorCode::ParseError, spec + ": expected a list of index lists");
  std::vector<Subset> subsets;
  for (const auto& row : j) {
    if (!row.is_array()) throw Error(ErrorCode::ParseError, spec + ": expected a list of index lists");
    Subset s;
    for (const auto& k : row) {
      if (!k.is_number_integer() || k.get<long long>() < 1) {
        throw Error(ErrorCode::BadSubset, spec + ": indices are one-based positive integers");
      }
      s.push_back(static_cast<std::size_t>(k.get<long long>() - 1));
    }
    subsets.push_back(std::move(s));
  }
  return IndexFamily::explicit_list(std::move(subsets));
}

}  // namespace multsys::io
