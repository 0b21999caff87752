#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "elicit/analysis.hpp"

namespace elicit {

nlohmann::json to_json(const AnalysisReport& r);

/// Writes report.json (with `metadata` embedded) and one CSV per table.
/// Returns the written file names in a fixed order.
std::vector<std::string> write_report(const AnalysisReport& r, const nlohmann::json& metadata,
                                      const std::filesystem::path& out_dir);

}  // namespace elicit
