#include "multsys/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "multsys/error.hpp"
#include "multsys/io.hpp"

namespace multsys::cli {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

json verdict(const std::string& check, bool holds, json detail = json::object()) {
  json v{{"check", check}, {"holds", holds}};
  if (!detail.empty()) v["detail"] = std::move(detail);
  return v;
}

std::vector<Rational> parse_rationals(const std::vector<std::string>& items) {
  std::vector<Rational> out;
  for (const auto& item : items) {
    // A JSON file holding a list of rationals may stand in for inline values.
    if (item.find_first_of("/.,") != std::string::npos && std::filesystem::is_regular_file(item)) {
      const auto j = io::read_json_file(item);
      if (!j.is_array()) throw Error(ErrorCode::ParseError, item + ": expected a list of rationals");
      for (const auto& x : j) out.push_back(io::rational_from_json(x));
      continue;
    }
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(parse_rational(part));
    }
  }
  return out;
}

std::vector<Rational> coefficients(const RunConfig& config, std::size_t n) {
  if (config.coeffs.empty()) return std::vector<Rational>(n, Rational(1));
  auto c = parse_rationals(config.coeffs);
  if (c.size() != n) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(c.size()) + " coefficients for " + std::to_string(n) +
                                               " functions");
  }
  return c;
}

double parse_real(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw Error(ErrorCode::ParseError, "bad " + what + " '" + text + "'");
  return value;
}

LacunarySpec parse_rule(const RunConfig& config) {
  const auto& rule = config.rule;
  if (rule.rfind("geometric:", 0) == 0) {
    const auto rest = rule.substr(10);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::ParseError, "expected geometric:<lambda>:<tau1>");
    if (config.n == 0) throw Error(ErrorCode::ParseError, "geometric rule needs --n");
    return build_tau_geometric(parse_real(rest.substr(0, colon), "lambda"), parse_real(rest.substr(colon + 1), "tau1"),
                               config.n);
  }
  if (rule.rfind("explicit:", 0) == 0) {
    std::vector<double> tau;
    std::stringstream ss(rule.substr(9));
    std::string part;
    while (std::getline(ss, part, ',')) tau.push_back(parse_real(part, "frequency"));
    if (config.n != 0 && config.n < tau.size()) tau.resize(config.n);
    return build_tau_explicit(std::move(tau), config.lambda_claim);
  }
  throw Error(ErrorCode::ParseError, "unknown lacunary rule '" + rule + "'");
}

std::vector<ConvexSpec> convex_specs(const RunConfig& config, std::vector<std::string> fallback) {
  const auto& names = config.phis.empty() ? fallback : config.phis;
  std::vector<ConvexSpec> out;
  for (const auto& name : names) out.push_back(ConvexSpec::parse(name));
  return out;
}

json analyze(const RunConfig& config, std::string& csv) {
  const auto sys = io::resolve_system(config.system);
  const auto family = io::parse_family(config.family, sys.size());
  auto error = multiplicative_error(sys, family, MomentOptions{config.threads});
  csv = error.table.to_csv();
  return json{{"system", io::to_json(sys)},
              {"family", family.describe()},
              {"mu", io::exact(error.mu)},
              {"multiplicative", error.mu == 0},
              {"moments", io::to_json(error.table)},
              {"verdicts", json::array()}};
}

json reduce(const RunConfig& config, std::string& csv) {
  const auto sys = io::resolve_system(config.system);
  const auto family = io::parse_family(config.family, sys.size());
  const auto trace = reduce_to_independent(sys, family, MomentOptions{config.threads});
  csv = trace.stage_tables.front().table.to_csv();

  json verdicts = json::array();
  const MomentTable* extended = nullptr;
  const MomentTable* binarized = nullptr;
  for (const auto& s : trace.stage_tables) {
    if (s.stage == "extended") extended = &s.table;
    if (s.stage == "binarized") binarized = &s.table;
  }
  if (extended && binarized) {
    bool same = extended->entries.size() == binarized->entries.size();
    for (std::size_t i = 0; same && i < extended->entries.size(); ++i) {
      same = extended->entries[i].moment == binarized->entries[i].moment;
    }
    verdicts.push_back(verdict("binarize_preserves_moments", same));
  }

  const auto independence = check_independence(trace.xi, family);
  verdicts.push_back(verdict("xi_independent", independence.independent));

  const auto coeffs = coefficients(config, sys.size());
  json domination = json::array();
  for (const auto& phi : convex_specs(config, {"power:2", "power:4", "exp:1"})) {
    auto report = verify_domination(trace, coeffs, phi, config.rel_tol);
    verdicts.push_back(verdict("domination:" + report.phi, report.holds));
    domination.push_back(io::to_json(report));
  }
  return json{{"trace", io::to_json(trace)},
              {"mu", io::exact(trace.mu)},
              {"independence", io::to_json(independence)},
              {"domination", domination},
              {"verdicts", verdicts}};
}

json khintchine(const RunConfig& config) {
  const auto sys = io::resolve_system(config.system);
  KhintchinMode mode;
  if (config.mode == "general") {
    mode = KhintchinMode::General;
  } else if (config.mode == "even") {
    mode = KhintchinMode::EvenInteger;
  } else {
    throw Error(ErrorCode::ParseError, "mode must be general or even");
  }
  const auto coeffs = coefficients(config, sys.size());
  auto report = verify_khintchine(sys, coeffs, config.p, mode, config.rel_tol);
  json verdicts = json::array({verdict("khintchine", report.holds)});
  return json{{"system", io::to_json(sys)}, {"khintchine", io::to_json(report)}, {"verdicts", verdicts}};
}

json tail(const RunConfig& config) {
  if (config.lambdas.empty()) throw Error(ErrorCode::ParseError, "tail needs at least one --lambda");
  const auto lambdas = parse_rationals(config.lambdas);
  for (const auto& l : lambdas) {
    if (l <= 0) throw Error(ErrorCode::NonPositiveLambda, "lambda = " + to_string(l));
  }
  const auto sys = io::resolve_system(config.system);
  const auto family = io::parse_family(config.family, sys.size());
  auto reports = hoeffding_tails(sys, lambdas, family, config.abs_tol);
  json tails = json::array();
  json verdicts = json::array();
  for (const auto& r : reports) {
    tails.push_back(io::to_json(r));
    verdicts.push_back(verdict("tail:" + to_string(r.lambda), r.holds));
  }
  return json{{"system", io::to_json(sys)}, {"family", family.describe()}, {"tails", tails}, {"verdicts", verdicts}};
}

json lacunary(const RunConfig& config) {
  const auto spec = parse_rule(config);
  const std::size_t nu_max = config.nu_max == 0 ? spec.size() : config.nu_max;
  auto result = truncated_mu(spec, nu_max, config.threads, config.rel_tol);

  json containment = json::array();
  for (const auto& c : result.per_head_bounds) {
    if (!frequency_range_check(spec, c.subset)) {
      json s = json::array();
      for (auto k : c.subset) s.push_back(k + 1);
      containment.push_back(s);
    }
  }
  json parts = json::array();
  for (const auto& part : split_lacunary(spec)) {
    json idx = json::array();
    for (auto k : part.indices) idx.push_back(k + 1);
    parts.push_back({{"indices", idx}, {"lambda", io::approx(part.spec.lambda)}});
  }

  json body = io::to_json(result);
  bool collections_ok = body["violations"].empty();
  bool global_ok = result.mu_truncated <= result.prop4_bound + config.rel_tol;
  json verdicts = json::array({verdict("per_collection_bound", collections_ok), verdict("prop4_bound", global_ok),
                               verdict("frequency_containment", containment.empty())});
  return json{{"spec", io::to_json(spec)},
              {"nu_max", nu_max},
              {"mu_truncated", body["mu_truncated"]},
              {"prop4_bound", body["prop4_bound"]},
              {"tail_estimate", body["tail_estimate"]},
              {"violations", body["violations"]},
              {"collections", body["collections"]},
              {"frequency_violations", containment},
              {"split", parts},
              {"verdicts", verdicts}};
}

json select(const RunConfig& config) {
  OrthogonalSystem sys;
  if (config.system.rfind("walsh:", 0) == 0) {
    auto bounded = io::builtin_system(config.system);  // validates the order
    sys.functions = bounded.functions();
    sys.certified_orthogonal = true;
  } else {
    sys = certify(io::resolve_system(config.system).functions());
  }
  auto cert = greedy_subsequence(sys, config.rho, config.steps, config.threads);
  auto mu = selected_mu(sys, cert);

  json verdicts = json::array();
  for (const auto& s : cert.steps) {
    verdicts.push_back(verdict("step" + std::to_string(s.step) + ":lemma_bound", s.within_bound));
    if (s.full_window) verdicts.push_back(verdict("step" + std::to_string(s.step) + ":below_2^-m", s.below_half_power));
  }
  verdicts.push_back(verdict("mu_within_certificate", mu <= cert.total,
                             json{{"mu", io::exact(mu)}, {"total", io::exact(cert.total)}}));
  return json{{"certificate", io::to_json(cert)},
              {"selected_mu", io::exact(mu)},
              {"system_size", sys.size()},
              {"verdicts", verdicts}};
}

json rubinshtein(const RunConfig& config) {
  if (config.f.empty()) throw Error(ErrorCode::ParseError, "rubinshtein needs --f");
  const auto f = io::load_step_file(config.f);
  const std::size_t l = config.l.value_or(config.n);
  auto phis = convex_specs(config, {"power:4"});
  auto report = verify_rubinshtein(f, config.n, l, phis.front(), parse_rationals(config.lambdas));
  const auto gen = build_phi(f);

  json verdicts = json::array({verdict("multiplicative", report.multiplicative)});
  if (report.domination) verdicts.push_back(verdict("domination:" + report.domination->phi, report.domination->holds));
  for (const auto& t : report.tails) verdicts.push_back(verdict("tail:" + to_string(t.lambda), t.holds));
  if (report.khintchine) verdicts.push_back(verdict("khintchine:even4", report.khintchine->holds));
  return json{{"generator", io::to_json(gen.phi)},
              {"system", io::to_json(dilated_system(gen, config.n))},
              {"rubinshtein", io::to_json(report)},
              {"verdicts", verdicts}};
}

std::string verdict_csv(const json& report) {
  std::ostringstream out;
  out << "check;holds\n";
  for (const auto& v : report["verdicts"]) out << v["check"].get<std::string>() << ';' << (v["holds"].get<bool>() ? "true" : "false") << '\n';
  return out.str();
}

void apply_piece_cap_env() {
  const char* raw = std::getenv("MULTSYS_PIECE_CAP");
  if (!raw || !*raw) return;
  std::string text(raw);
  std::size_t used = 0;
  unsigned long long cap = 0;
  try {
    cap = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || cap == 0 || text.front() == '-') {
    throw Error(ErrorCode::ParseError, "MULTSYS_PIECE_CAP must be a positive integer, got '" + text + "'");
  }
  set_piece_cap(static_cast<std::size_t>(cap));
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::ParseError, "cannot write " + path);
  file << text;
}

}  // namespace

json config_json(const RunConfig& config) {
  json c{{"command", config.command},
         {"system", config.system},
         {"family", config.family},
         {"threads", config.threads},
         {"rel_tol", config.rel_tol},
         {"abs_tol", config.abs_tol},
         {"coeffs", config.coeffs},
         {"lambdas", config.lambdas},
         {"phis", config.phis},
         {"p", config.p},
         {"mode", config.mode},
         {"rule", config.rule},
         {"n", config.n},
         {"nu_max", config.nu_max},
         {"rho", config.rho},
         {"steps", config.steps},
         {"f", config.f},
         {"piece_cap", piece_cap()}};
  c["lambda_claim"] = config.lambda_claim ? json(*config.lambda_claim) : json(nullptr);
  c["l"] = config.l ? json(*config.l) : json(nullptr);
  return c;
}

json build_report(const RunConfig& config) {
  std::string csv;
  json report;
  if (config.command == "analyze") {
    report = analyze(config, csv);
  } else if (config.command == "reduce") {
    report = reduce(config, csv);
  } else if (config.command == "khintchine") {
    report = khintchine(config);
  } else if (config.command == "tail") {
    report = tail(config);
  } else if (config.command == "lacunary") {
    report = lacunary(config);
  } else if (config.command == "select") {
    report = select(config);
  } else if (config.command == "rubinshtein") {
    report = rubinshtein(config);
  } else {
    throw Error(ErrorCode::ParseError, "unknown command '" + config.command + "'");
  }
  report["config"] = config_json(config);
  if (!csv.empty()) report["_csv"] = csv;
  return report;
}

bool all_verdicts_hold(const json& report) {
  for (const auto& v : report.at("verdicts")) {
    if (!v.at("holds").get<bool>()) return false;
  }
  return true;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  json report;
  try {
    apply_piece_cap_env();
    report = build_report(config);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: ParseError: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  std::string csv = report.contains("_csv") ? report["_csv"].get<std::string>() : verdict_csv(report);
  report.erase("_csv");
  if (!config.no_meta) report["meta"] = json{{"tool", "multsys"}, {"version", kVersion}, {"generated_at", utc_timestamp()}};
  const std::string text = report.dump(2) + "\n";
  try {
    if (config.out.empty()) {
      out << text;
    } else {
      write_file(config.out, text);
    }
    if (!config.csv.empty()) write_file(config.csv, csv);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return all_verdicts_hold(report) ? 0 : 1;
}

}  // namespace multsys::cli
