#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pqs/barriers.hpp"
#include "pqs/config.hpp"
#include "pqs/diagnostics.hpp"

namespace pqs {

using json = nlohmann::json;

json spec_json(const ProblemSpec& spec);
json fit_json(const ExponentFit& fit);
json sobolev_json(const SobolevProbe& probe);
json nonexistence_json(const NonexistenceReport& rep);

/// Owns one run's artifact tree: manifest.json, fields/*.csv,
/// traces/*.json, verdicts/*.json, plotdata/*.csv. A non-empty requested
/// directory is versioned with a numeric suffix instead of being reused.
class RunWriter {
public:
    explicit RunWriter(const std::filesystem::path& requested);

    const std::filesystem::path& dir() const { return dir_; }

    std::filesystem::path write_field(const std::string& name, const DiscreteField& u);
    std::filesystem::path write_mesh(const std::string& name, const Mesh& mesh);
    std::filesystem::path write_theta(const std::string& name, const ThetaTable& table);
    std::filesystem::path write_trace(const std::string& name, const ContinuationTrace& trace);
    std::filesystem::path write_verdict(const std::string& name, const json& doc);
    std::filesystem::path write_plot(const std::string& name, const std::string& csv);
    std::filesystem::path write_error(const json& doc);

    void attach_config(const KeyTree& tree);

    /// Files produced outside the writer (plot bundles) still belong in
    /// the manifest.
    void register_output(const std::string& rel) { outputs_.push_back(rel); }

    /// Writes manifest.json referencing every produced file exactly once.
    void finalize(const std::string& command, double wall_seconds);

private:
    std::filesystem::path emit(const std::string& rel, const std::string& payload);

    std::filesystem::path dir_;
    std::vector<std::string> outputs_;
    json config_ = json::object();
};

struct PlotBundle {
    std::vector<std::string> written;  // paths relative to the run directory
    std::vector<std::string> warnings;
};

/// Collects the per-figure CSV bundles out of a finished run directory.
/// Missing inputs are listed as warnings; the bundle stays partial.
PlotBundle emit_plot_data(const std::filesystem::path& run_dir);

}  // namespace pqs
