#pragma once

#include <json.hpp>
#include <string>

#include "spsaa/harness/experiments.hpp"

namespace spsaa::harness {

/// experiment_id,method,N,replication,seed_path,metric,inner_gap_bound,wall_time
std::string to_csv(const Report& report);
nlohmann::ordered_json summary_json(const Report& report);

enum class Format { csv, json, both };

Format parse_format(const std::string& name);

/// Writes <dir>/<id>_<kind>.csv and/or .json; returns the paths written.
std::vector<std::string> emit(const Report& report, const std::string& dir, Format format);

/// Writes text to path, throwing IoError on failure.
void write_file(const std::string& path, const std::string& text);

}  // namespace spsaa::harness
