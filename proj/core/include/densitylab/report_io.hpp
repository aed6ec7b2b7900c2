#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "densitylab/cascade.hpp"
#include "densitylab/density.hpp"

namespace densitylab {

// "checkpoint,count,ratio" rows.  Deterministic formatting (%.12g ratios):
// identical reports serialize byte-identically.
std::string density_report_csv(const DensityReport& report);

// JSON with the report fields; no volatile metadata here (the experiment
// layer adds its own run block).
std::string density_report_json(const DensityReport& report);

std::string cascade_trace_json(const CascadeTrace& trace);

// Write-to-temp-then-rename in the target directory, so a crash never leaves
// a half-written report at the final path.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace densitylab
