#include "pqs/artifacts.hpp"

#include <fstream>
#include <sstream>

#include "pqs/barriers.hpp"
#include "pqs/io_util.hpp"

namespace pqs {

namespace fs = std::filesystem;

json spec_json(const ProblemSpec& spec) {
    json j{{"p", spec.p},
           {"q", spec.q},
           {"delta", spec.delta},
           {"beta", spec.beta},
           {"c_f", spec.amplitude}};
    j["domain"] = spec.domain.kind == DomainKind::Interval ? "interval" : "ball";
    j["extent"] = spec.domain.extent;
    j["dimension"] = spec.domain.dimension;
    switch (spec.regime()) {
        case Regime::Sublinear: j["regime"] = "sublinear"; break;
        case Regime::Critical: j["regime"] = "critical"; break;
        case Regime::Superlinear: j["regime"] = "superlinear"; break;
    }
    j["solvability"] = spec.solvability() == Solvability::Solvable ? "solvable" : "non-existence";
    if (spec.degenerate_pq()) j["degenerate_pq_test_mode"] = true;  // outside the q < p theory
    return j;
}

json fit_json(const ExponentFit& fit) {
    return json{{"d_min", fit.window.d_min},   {"d_max", fit.window.d_max},
                {"slope", fit.slope},          {"intercept", fit.intercept},
                {"residual", fit.residual},    {"count", fit.count},
                {"asymmetry", fit.asymmetry},  {"half_drift", fit.half_drift}};
}

json sobolev_json(const SobolevProbe& probe) {
    json j{{"probe", "sobolev"},
           {"rho", probe.rho},
           {"rho0", probe.rho0},
           {"eps", probe.eps},
           {"grading", probe.grading},
           {"levels", probe.levels},
           {"energies", probe.energies},
           {"ratios", probe.ratios},
           {"bounded_ratio", kBoundedRatio},
           {"divergent_ratio", kDivergentRatio},
           {"verdict", to_string(probe.verdict)}};
    if (!probe.failure.empty()) j["failure"] = probe.failure;
    return j;
}

json nonexistence_json(const NonexistenceReport& rep) {
    json j{{"probe", "nonexistence"},
           {"beta_tilde", rep.beta_tilde},
           {"tau_expected", rep.tau_expected},
           {"tau_fitted", rep.tau_fitted},
           {"tau_tolerance", rep.tau_tolerance},
           {"gammas", rep.gammas},
           {"levels", rep.levels},
           {"hardy", rep.hardy},
           {"growth_threshold", rep.growth_threshold},
           {"tau_trend_ok", rep.tau_trend_ok},
           {"hardy_growth_ok", rep.hardy_growth_ok},
           {"verdict", rep.confirmed ? "non-existence signature confirmed" : "not confirmed"}};
    if (!rep.failure.empty()) j["failure"] = rep.failure;
    return j;
}

RunWriter::RunWriter(const fs::path& requested) {
    dir_ = requested;
    if (fs::exists(dir_) && !fs::is_empty(dir_)) {
        for (int k = 1;; ++k) {
            fs::path candidate = requested;
            candidate += "-" + std::to_string(k);
            if (!fs::exists(candidate) || fs::is_empty(candidate)) {
                dir_ = candidate;
                break;
            }
        }
    }
    fs::create_directories(dir_);
}

fs::path RunWriter::emit(const std::string& rel, const std::string& payload) {
    const fs::path path = dir_ / rel;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << payload;
    outputs_.push_back(rel);
    return path;
}

fs::path RunWriter::write_field(const std::string& name, const DiscreteField& u) {
    std::ostringstream ss;
    u.write_csv(ss);
    return emit("fields/" + name + ".csv", ss.str());
}

fs::path RunWriter::write_mesh(const std::string& name, const Mesh& mesh) {
    std::ostringstream ss;
    mesh.write_csv(ss);
    return emit("fields/" + name + ".csv", ss.str());
}

fs::path RunWriter::write_theta(const std::string& name, const ThetaTable& table) {
    std::ostringstream ss;
    table.write_csv(ss);
    return emit("fields/" + name + ".csv", ss.str());
}

fs::path RunWriter::write_trace(const std::string& name, const ContinuationTrace& trace) {
    json arr = json::array();
    for (std::size_t k = 0; k < trace.entries.size(); ++k) {
        const TraceEntry& e = trace.entries[k];
        const std::string field_name = name + "_k" + std::to_string(k);
        write_field(field_name, e.field);
        arr.push_back(json{{"eps", e.eps},
                           {"picard_iterations", e.picard_iterations},
                           {"newton_iterations", e.newton_iterations},
                           {"energy", e.energy},
                           {"seconds", e.seconds},
                           {"sup_change_from_previous", e.sup_change_from_previous},
                           {"sup_norm", e.field.sup_norm()},
                           {"field_csv", "fields/" + field_name + ".csv"}});
    }
    return emit("traces/" + name + ".json", arr.dump(2) + "\n");
}

fs::path RunWriter::write_verdict(const std::string& name, const json& doc) {
    return emit("verdicts/" + name + ".json", doc.dump(2) + "\n");
}

fs::path RunWriter::write_plot(const std::string& name, const std::string& csv) {
    return emit("plotdata/" + name + ".csv", csv);
}

fs::path RunWriter::write_error(const json& doc) {
    return emit("error.json", doc.dump(2) + "\n");
}

void RunWriter::attach_config(const KeyTree& tree) {
    config_ = json::object();
    for (const auto& [key, value] : tree.entries()) config_[key] = value;
}

void RunWriter::finalize(const std::string& command, double wall_seconds) {
    json manifest{{"command", command},
                  {"code_version", "pqsing 0.1.0"},
                  {"config", config_},
                  {"wall_seconds", wall_seconds},  // excluded from determinism hashes
                  {"outputs", outputs_}};
    manifest["outputs"].push_back("manifest.json");
    const fs::path path = dir_ / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    out << manifest.dump(2) << "\n";
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

}  // namespace

PlotBundle emit_plot_data(const fs::path& run_dir) {
    PlotBundle bundle;
    auto& warnings = bundle.warnings;
    if (!fs::exists(run_dir)) {
        warnings.push_back("run directory does not exist: " + run_dir.string());
        return bundle;
    }
    fs::create_directories(run_dir / "plotdata");

    // (log d, log u) fit series from every stored field
    {
        std::ostringstream csv;
        csv << "field,log_d,log_u\n";
        bool any = false;
        if (fs::exists(run_dir / "fields")) {
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(run_dir / "fields"))
                if (entry.path().extension() == ".csv") files.push_back(entry.path());
            std::sort(files.begin(), files.end());
            for (const auto& file : files) {
                std::ifstream in(file);
                std::string line;
                std::getline(in, line);
                if (line != "index,x,d,u") continue;  // mesh/theta tables are not fit series
                any = true;
                while (std::getline(in, line)) {
                    const auto cols = split(line, ',');
                    if (cols.size() != 4) continue;
                    const double d = std::stod(cols[2]), u = std::stod(cols[3]);
                    if (d > 0.0 && u > 0.0)
                        csv << file.stem().string() << ',' << io::shortest(std::log(d)) << ','
                            << io::shortest(std::log(u)) << '\n';
                }
            }
        }
        if (any) {
            std::ofstream out(run_dir / "plotdata/fit_series.csv", std::ios::binary);
            out << csv.str();
            bundle.written.push_back("plotdata/fit_series.csv");
        } else {
            warnings.push_back("no field CSVs found; fit series skipped");
        }
    }

    // (eps, sup norm) continuation series
    {
        std::ostringstream csv;
        csv << "trace,eps,sup_norm\n";
        bool any = false;
        if (fs::exists(run_dir / "traces")) {
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(run_dir / "traces"))
                files.push_back(entry.path());
            std::sort(files.begin(), files.end());
            for (const auto& file : files) {
                std::ifstream in(file);
                json arr = json::parse(in, nullptr, false);
                if (arr.is_discarded() || !arr.is_array()) continue;
                for (const auto& e : arr) {
                    any = true;
                    csv << file.stem().string() << ',' << io::shortest(e.at("eps").get<double>())
                        << ',' << io::shortest(e.at("sup_norm").get<double>()) << '\n';
                }
            }
        }
        if (any) {
            std::ofstream out(run_dir / "plotdata/continuation_series.csv", std::ios::binary);
            out << csv.str();
            bundle.written.push_back("plotdata/continuation_series.csv");
        } else {
            warnings.push_back("no traces found; continuation series skipped");
        }
    }

    // (rho, growth ratio) and (beta_tilde, H) series from the verdicts
    {
        std::ostringstream sob, non;
        sob << "rho,n,energy,ratio\n";
        non << "gamma,beta_tilde,n,hardy\n";
        bool any_sob = false, any_non = false;
        if (fs::exists(run_dir / "verdicts")) {
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(run_dir / "verdicts"))
                files.push_back(entry.path());
            std::sort(files.begin(), files.end());
            for (const auto& file : files) {
                std::ifstream in(file);
                json doc = json::parse(in, nullptr, false);
                if (doc.is_discarded() || !doc.is_object()) continue;
                const std::string probe = doc.value("probe", "");
                if (probe == "sobolev") {
                    any_sob = true;
                    const auto& levels = doc.at("levels");
                    const auto& energies = doc.at("energies");
                    for (std::size_t j = 0; j < energies.size(); ++j) {
                        sob << io::shortest(doc.at("rho").get<double>()) << ','
                            << levels[j].get<std::size_t>() << ','
                            << io::shortest(energies[j].get<double>()) << ',';
                        if (j > 0)
                            sob << io::shortest(energies[j].get<double>() /
                                                energies[j - 1].get<double>());
                        sob << '\n';
                    }
                } else if (probe == "nonexistence") {
                    any_non = true;
                    const auto& gammas = doc.at("gammas");
                    const auto& betas = doc.at("beta_tilde");
                    const auto& levels = doc.at("levels");
                    const auto& hardy = doc.at("hardy");
                    for (std::size_t g = 0; g < gammas.size(); ++g)
                        for (std::size_t b = 0; b < betas.size(); ++b)
                            for (std::size_t j = 0; j < hardy[g][b].size(); ++j)
                                non << io::shortest(gammas[g].get<double>()) << ','
                                    << io::shortest(betas[b].get<double>()) << ','
                                    << levels[j].get<std::size_t>() << ','
                                    << io::shortest(hardy[g][b][j].get<double>()) << '\n';
                }
            }
        }
        if (any_sob) {
            std::ofstream out(run_dir / "plotdata/sobolev_series.csv", std::ios::binary);
            out << sob.str();
            bundle.written.push_back("plotdata/sobolev_series.csv");
        } else {
            warnings.push_back("no sobolev verdicts found; sobolev series skipped");
        }
        if (any_non) {
            std::ofstream out(run_dir / "plotdata/nonexistence_series.csv", std::ios::binary);
            out << non.str();
            bundle.written.push_back("plotdata/nonexistence_series.csv");
        } else {
            warnings.push_back("no nonexistence verdicts found; nonexistence series skipped");
        }
    }
    return bundle;
}

}  // namespace pqs
