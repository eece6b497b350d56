#include "pqs/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pqs {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

KeyTree KeyTree::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

KeyTree KeyTree::parse_text(const std::string& text) {
    KeyTree tree;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: bad section header at line " +
                                            std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " +
                                        std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config: empty key at line " + std::to_string(lineno));
        tree.set(section.empty() ? key : section + "." + key, value);
    }
    return tree;
}

void KeyTree::set(const std::string& section_key, const std::string& value) {
    entries_[section_key] = value;
}

bool KeyTree::has(const std::string& key) const { return entries_.count(key) != 0; }

std::string KeyTree::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double KeyTree::get_double(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size())
        throw std::invalid_argument("config: bad number for " + key + ": " + it->second);
    return v;
}

int KeyTree::get_int(const std::string& key, int fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::size_t pos = 0;
    const int v = std::stoi(it->second, &pos);
    if (pos != it->second.size())
        throw std::invalid_argument("config: bad integer for " + key + ": " + it->second);
    return v;
}

bool KeyTree::get_bool(const std::string& key, bool fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    if (it->second == "true" || it->second == "on" || it->second == "1") return true;
    if (it->second == "false" || it->second == "off" || it->second == "0") return false;
    throw std::invalid_argument("config: bad boolean for " + key + ": " + it->second);
}

std::vector<double> KeyTree::get_list(const std::string& key,
                                      std::vector<double> fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::vector<double> out;
    std::istringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    if (out.empty()) throw std::invalid_argument("config: empty list for " + key);
    return out;
}

std::vector<std::size_t> KeyTree::get_sizes(const std::string& key,
                                            std::vector<std::size_t> fallback) const {
    const auto doubles = get_list(key, {});
    if (doubles.empty()) return fallback;
    std::vector<std::size_t> out;
    for (double v : doubles) {
        if (v < 1 || v != double(std::size_t(v)))
            throw std::invalid_argument("config: " + key + " must hold positive integers");
        out.push_back(std::size_t(v));
    }
    return out;
}

RunConfig RunConfig::from_tree(const KeyTree& tree) {
    RunConfig cfg;
    cfg.raw = tree;

    const std::string kind = tree.get_string("problem.domain", "interval");
    if (kind == "interval") {
        cfg.problem.domain = Domain::interval(tree.get_double("problem.length", 1.0));
    } else if (kind == "ball") {
        cfg.problem.domain = Domain::ball(tree.get_double("problem.radius", 1.0),
                                          tree.get_int("problem.dimension", 1));
    } else {
        throw std::invalid_argument("config: problem.domain must be interval or ball");
    }
    cfg.problem.p = tree.get_double("problem.p", 2.0);
    cfg.problem.q = tree.get_double("problem.q", 2.0);
    cfg.problem.delta = tree.get_double("problem.delta", 1.0);
    cfg.problem.beta = tree.get_double("problem.beta", 0.0);
    cfg.problem.amplitude = tree.get_double("problem.c_f", 1.0);

    const double n = tree.get_double("mesh.n", 2048);
    if (n < 2 || n != double(std::size_t(n)))
        throw std::invalid_argument("config: mesh.n must be an integer >= 2");
    cfg.mesh_n = std::size_t(n);
    cfg.mesh_grading = tree.get_double("mesh.grading", 3.0);

    cfg.solver.mu_schedule = tree.get_list("solver.mu_schedule", cfg.solver.mu_schedule);
    cfg.solver.newton_tol = tree.get_double("solver.newton_tol", cfg.solver.newton_tol);
    cfg.solver.newton_max_iter =
        tree.get_int("solver.newton_max_iter", cfg.solver.newton_max_iter);
    cfg.solver.picard_tol = tree.get_double("solver.picard_tol", cfg.solver.picard_tol);
    cfg.solver.picard_max_iter =
        tree.get_int("solver.picard_max_iter", cfg.solver.picard_max_iter);
    cfg.solver.line_search_shrink =
        tree.get_double("solver.line_search_shrink", cfg.solver.line_search_shrink);

    cfg.continuation.eps0 = tree.get_double("continuation.eps0", cfg.continuation.eps0);
    cfg.continuation.ratio = tree.get_double("continuation.ratio", cfg.continuation.ratio);
    cfg.continuation.steps = tree.get_int("continuation.steps", cfg.continuation.steps);

    cfg.output_dir = tree.get_string("output.dir", cfg.output_dir);
    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    problem.validate();
    solver.validate();
    if (!(continuation.eps0 > 0.0))
        throw std::invalid_argument("config: continuation.eps0 must be positive");
    if (!(continuation.ratio > 0.0 && continuation.ratio < 1.0))
        throw std::invalid_argument("config: continuation.ratio must lie in (0,1)");
    if (continuation.steps < 0)
        throw std::invalid_argument("config: continuation.steps must be >= 0");
    if (output_dir.empty()) throw std::invalid_argument("config: output.dir must be set");
    // determinism is seed-free and always on; reject configs that try to turn it off
    if (!raw.get_bool("run.deterministic", true))
        throw std::invalid_argument("config: run.deterministic cannot be disabled");
}

}  // namespace pqs
