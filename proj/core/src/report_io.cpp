#include "densitylab/report_io.hpp"

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace densitylab {

namespace {

std::string format_ratio(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::string density_report_csv(const DensityReport& report) {
    std::string out = "checkpoint,count,ratio\n";
    for (std::size_t i = 0; i < report.checkpoints.size(); ++i) {
        out += std::to_string(report.checkpoints[i]);
        out += ',';
        out += std::to_string(report.counts[i]);
        out += ',';
        out += format_ratio(report.ratios[i]);
        out += '\n';
    }
    return out;
}

namespace {

nlohmann::json density_report_to_json(const DensityReport& r) {
    return nlohmann::json{
        {"label", r.label},
        {"limit", r.limit},
        {"schedule", r.schedule},
        {"tail_fraction", r.tail_fraction},
        {"checkpoints", r.checkpoints},
        {"counts", r.counts},
        {"ratios", r.ratios},
        {"lower_est", r.lower_est},
        {"upper_est", r.upper_est},
    };
}

}  // namespace

std::string density_report_json(const DensityReport& report) {
    return density_report_to_json(report).dump(2) + "\n";
}

std::string cascade_trace_json(const CascadeTrace& trace) {
    nlohmann::json milestones = nlohmann::json::array();
    for (const auto& m : trace.milestones) {
        nlohmann::json jm{
            {"stage", m.stage},
            {"case", m.case_tag},
            {"n_before", m.n_before},
            {"n_after", m.n_after},
            {"witness_n", m.witness_n},
            {"witness_count", m.witness_count},
        };
        if (m.drop_hi >= m.drop_lo && m.drop_hi != 0)
            jm["dropped"] = {m.drop_lo, m.drop_hi};
        else
            jm["dropped"] = nullptr;
        if (m.case_tag == "I") {
            jm["search_bound"] = m.search_bound;
            jm["truncated"] = m.truncated;
        }
        milestones.push_back(std::move(jm));
    }
    nlohmann::json j{
        {"alpha", trace.alpha},
        {"beta", trace.beta},
        {"n0", trace.n0},
        {"limit", trace.limit},
        {"stages_run", trace.stages_run},
        {"stopped_early", trace.stopped_early},
        {"stop_reason", trace.stop_reason},
        {"milestones", std::move(milestones)},
    };
    return j.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    fs::path dir = path.parent_path();
    if (dir.empty()) dir = ".";
    fs::create_directories(dir);
    fs::path tmp = dir / (path.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("write_file_atomic: cannot open " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("write_file_atomic: write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

}  // namespace densitylab
