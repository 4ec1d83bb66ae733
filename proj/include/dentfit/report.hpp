#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dentfit/fit.hpp"
#include "dentfit/pipeline.hpp"
#include "dentfit/srm.hpp"

namespace dentfit {

using Json = nlohmann::ordered_json;

// Rounds to 9 significant digits so serialised reports are stable.
double round9(double value);

Json to_json(const DentParams& params);
Json to_json(const Pose& pose);
Json to_json(const SrmMeasures& srm);
Json to_json(const FitReport& report);
Json to_json(const CompareReport& report);
Json to_json(const PlaneFrame& frame);

// Adds the base-plane frame and the dent centre in input coordinates to the
// report's pose (both modes, for a compare report).
void attach_frame(Json& report, const PlaneFrame& frame);

// Reads back the params and pose of a serialised FitReport.
DentParams params_from_json(const Json& json);
Pose pose_from_json(const Json& json);

std::string dump(const Json& json);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace dentfit
