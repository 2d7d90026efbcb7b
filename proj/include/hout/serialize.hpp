#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "hout/decomp.hpp"
#include "hout/experiments.hpp"
#include "hout/sigma.hpp"

namespace hout {

using Json = nlohmann::json;

// Formats a double with 17 significant digits (round-trip safe) for CSV.
std::string format_number(double x);

Json tensor_to_json(const SymTensor& t);
SymTensor tensor_from_json(const Json& j);

Json moments_to_json(const MomentSet& m);
MomentSet moments_from_json(const Json& j);

Json decomposition_to_json(const Rank1Decomposition& d);
std::string decomposition_residuals_csv(const Rank1Decomposition& d);

Json ensemble_to_json(const SigmaEnsemble& e);
std::string ensemble_to_csv(const SigmaEnsemble& e);

std::string poly_study_csv(const std::vector<PolyStudyRow>& rows);
std::string skill_report_csv(const SkillReport& r);
Json skill_report_to_json(const SkillReport& r);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace hout
