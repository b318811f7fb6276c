#pragma once

#include "invariance/criterion.hpp"
#include "invariance/falsify.hpp"
#include "invariance/parabolicity.hpp"
#include "invariance/simulate.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace invariance {

nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const Verdict& verdict);
nlohmann::json to_json(const ParabolicityReport& report);
nlohmann::json to_json(const StabilityGate& gate);
nlohmann::json to_json(const ConvexBody& body);

/// Problems found when checking a report against the schema of its "kind"
/// (parabolicity, check, simulate, falsify). Empty means valid.
std::vector<std::string> report_schema_errors(const nlohmann::json& report);

/// CSV with header "t,max_violation".
void write_trace_csv(const std::filesystem::path& path, const std::vector<TracePoint>& trace);

/// Row-major float64 dump (axes..., component) plus a JSON header next to it.
void write_field_dump(const std::filesystem::path& bin, const std::filesystem::path& header, const SolutionField& u,
                      double dt, const nlohmann::json& extra = nlohmann::json::object());

/// Reads a dump written by write_field_dump.
SolutionField read_field_dump(const std::filesystem::path& bin, const std::filesystem::path& header);

}  // namespace invariance
