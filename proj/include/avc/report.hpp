// JSON report records for verdicts, profiles, estimates and simulations, and
// the flat CSV projection.
#pragma once

#include <string>

#include "avc/attack.hpp"
#include "avc/canonical.hpp"
#include "avc/capacity.hpp"
#include "avc/codegen.hpp"
#include "avc/decode.hpp"
#include "json.hpp"

namespace avc {

nlohmann::json to_json(const Dist& p);
nlohmann::json to_json(const JointDist& p);
nlohmann::json to_json(const CondDist& c);
nlohmann::json to_json(const JammingKernel& k);
nlohmann::json to_json(const CpDecomposition& d);
nlohmann::json to_json(const SymVerdict& v);
nlohmann::json to_json(const SymProfile& p);
nlohmann::json to_json(const SingletonResult& r);
nlohmann::json to_json(const SeparationReport& r);
nlohmann::json to_json(const CapacityEstimate& e);
nlohmann::json to_json(const SgBounds& b);
nlohmann::json to_json(const CpAttackPlan& p);
nlohmann::json to_json(const AttackTranscript& t);
nlohmann::json to_json(const McError& e);
nlohmann::json to_json(const TimeshareSubcode& t);

// One "path,value" row per scalar leaf; arrays indexed, objects dotted.
// Arrays of flat objects under the root's "rows" key become a header + rows table.
std::string to_csv(const nlohmann::json& j);

// Fixed layout: two-space indent, keys sorted, trailing newline.
std::string render(const nlohmann::json& j, const std::string& format);

}  // namespace avc
