#pragma once
#include <string>
#include <vector>

#include <json.hpp>

#include "efb/bandit.hpp"
#include "efb/bounds.hpp"
#include "efb/family.hpp"
#include "efb/region.hpp"

namespace efb {

using json = nlohmann::json;

json load_json_file(const std::string& path);

// Rejects keys outside `allowed` (schema rule: unknown fields are errors).
void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& context);

FamilyModel parse_family(const json& j);
NaturalParam parse_theta(const json& j, int K);
ParamRegion parse_region(const FamilyModel& m, const json& j);
BanditInstance parse_instance(const json& j);

// 17 significant digits, reproducible diffs
std::string format_real(double v);
// FNV-1a over the canonical dump
std::string hash_hex(const json& j);

}  // namespace efb
