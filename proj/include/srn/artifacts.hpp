#pragma once

#include <string>
#include <vector>

#include "srn/mlmc.hpp"

namespace srn {

inline constexpr int kSchemaVersion = 1;

std::string plan_to_json(const LevelPlan& plan);
// Throws std::invalid_argument on a schema or model-hash mismatch (empty hash skips the check).
LevelPlan plan_from_json(const std::string& text, const std::string& expected_model_hash);

std::string report_to_json(const EstimateReport& report);

// Columns: level,dt,delta,M,psi,vhat,EI,N_TL,N_K1,N_K2,exit_fraction
std::string plan_levels_csv(const LevelPlan& plan);
// Columns: level,M,mean_diff,var_diff,psi,vhat,N_TL,N_K1,N_K2,exit_fraction
std::string report_levels_csv(const EstimateReport& report);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace srn
