#pragma once

// JSON serialization and system loading. Exact values are "p/q" strings;
// floating values are {"value": x, "approx": true}.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "multsys/inequalities.hpp"
#include "multsys/lacunary.hpp"
#include "multsys/moments.hpp"
#include "multsys/reduction.hpp"
#include "multsys/rubinshtein.hpp"
#include "multsys/subseq.hpp"

namespace multsys::io {

using nlohmann::json;

json exact(const Rational& value);
json approx(double value);
/// Accepts "p/q", decimal strings and JSON integers.
Rational rational_from_json(const json& j);

json to_json(const StepFunction& f);
StepFunction step_from_json(const json& j);

/// {"functions": [{"breakpoints": [...], "values": [...]}, ...],
///  "lower_bounds": [...], "upper_bounds": [...]}; bounds default to -1 and 1.
json to_json(const BoundedSystem& sys);
BoundedSystem system_from_json(const json& j);

json to_json(const MomentTable& table);
json to_json(const IndependenceReport& report);
json to_json(const ReductionTrace& trace);
json to_json(const DominationReport& report);
json to_json(const KhintchinReport& report);
json to_json(const TailReport& report);
json to_json(const MgfCheck& check);
json to_json(const LacunarySpec& spec);
json to_json(const TruncatedMu& result);
json to_json(const SelectionCertificate& cert);
json to_json(const RubinshteinReport& report);

json read_json_file(const std::filesystem::path& path);
BoundedSystem load_system_file(const std::filesystem::path& path);
StepFunction load_step_file(const std::filesystem::path& path);

/// "rademacher:n", "walsh:m" or "rubinshtein:<f-path>:n".
BoundedSystem builtin_system(const std::string& name);
bool is_builtin_name(const std::string& name);

/// A builtin name or a path to a system file.
BoundedSystem resolve_system(const std::string& spec);

/// "l=k", "full", or a path to a JSON list of one-based index lists.
IndexFamily parse_family(const std::string& spec, std::size_t n);

/// r_1..r_n, r_k on 2^k equal pieces starting at +1.
BoundedSystem rademacher_system(std::size_t n);

}  // namespace multsys::io
