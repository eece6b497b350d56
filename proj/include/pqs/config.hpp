#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pqs/solver.hpp"
#include "pqs/weights.hpp"

namespace pqs {

/// Flat section.key -> value store parsed from the run configuration file.
/// Command-line overrides (--section.key=value) land in the same map.
class KeyTree {
public:
    static KeyTree parse_file(const std::string& path);
    static KeyTree parse_text(const std::string& text);

    void set(const std::string& section_key, const std::string& value);
    bool has(const std::string& section_key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const;
    std::vector<std::size_t> get_sizes(const std::string& key,
                                       std::vector<std::size_t> fallback) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

struct ContinuationParams {
    double eps0 = 1e-2;
    double ratio = 0.1;
    int steps = 4;
};

/// Validated run configuration: the problem block, mesh block, solver
/// block, continuation block and everything command-specific stays in the
/// raw tree for the command handlers.
struct RunConfig {
    ProblemSpec problem;
    std::size_t mesh_n = 2048;
    double mesh_grading = 3.0;
    SolverSettings solver;
    ContinuationParams continuation;
    std::string output_dir = "out";
    KeyTree raw;

    static RunConfig from_tree(const KeyTree& tree);
    void validate() const;
};

}  // namespace pqs
