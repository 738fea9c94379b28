#include "umlab/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace umlab {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_double(v[i]);
    }
    return out;
}

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out;
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

std::vector<double> split_doubles(const std::string& s) {
    std::vector<double> out;
    for (const auto& item : split_list(s)) out.push_back(std::stod(item));
    return out;
}

std::vector<int> split_ints(const std::string& s) {
    std::vector<int> out;
    for (const auto& item : split_list(s)) out.push_back(std::stoi(item));
    return out;
}

std::string ExperimentConfig::to_text() const {
    std::ostringstream out;
    out << "[grid]\n";
    out << "horizon = " << format_double(horizon) << "\n";
    out << "steps = " << steps << "\n";
    out << "\n[mc]\n";
    out << "paths = " << paths << "\n";
    out << "seed = " << seed << "\n";
    out << "\n[market]\n";
    out << "kind = " << market_kind << "\n";
    out << "params = " << join_doubles(market_params) << "\n";
    out << "\n[utility]\n";
    out << "kind = " << utility << "\n";
    out << "gamma = " << format_double(gamma) << "\n";
    out << "\n[solve]\n";
    out << "initial_wealth = " << format_double(initial_wealth) << "\n";
    out << "\n[dual]\n";
    out << "y_grid = " << join_doubles(dual_y) << "\n";
    out << "nu_min = " << format_double(nu_min) << "\n";
    out << "nu_max = " << format_double(nu_max) << "\n";
    out << "nu_step = " << format_double(nu_step) << "\n";
    out << "\n[sweep]\n";
    out << "kind = " << sweep_kind << "\n";
    out << "base = " << format_double(sweep_base) << "\n";
    out << "n_list = " << join_ints(sweep_n) << "\n";
    out << "\n[counterexample]\n";
    out << "n_list = " << join_ints(ce_n) << "\n";
    out << "\n[ui]\n";
    out << "k_grid = " << join_doubles(ui_k) << "\n";
    out << "threshold = " << format_double(ui_threshold) << "\n";
    out << "\n[output]\n";
    out << "dir = " << out_dir << "\n";
    return out.str();
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": malformed section header");
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string qualified = section + "." + key;

        if (qualified == "grid.horizon") cfg.horizon = std::stod(value);
        else if (qualified == "grid.steps") cfg.steps = std::stoi(value);
        else if (qualified == "mc.paths") cfg.paths = std::stoll(value);
        else if (qualified == "mc.seed") cfg.seed = std::stoull(value);
        else if (qualified == "market.kind") cfg.market_kind = value;
        else if (qualified == "market.params") cfg.market_params = split_doubles(value);
        else if (qualified == "utility.kind") cfg.utility = value;
        else if (qualified == "utility.gamma") cfg.gamma = std::stod(value);
        else if (qualified == "solve.initial_wealth") cfg.initial_wealth = std::stod(value);
        else if (qualified == "dual.y_grid") cfg.dual_y = split_doubles(value);
        else if (qualified == "dual.nu_min") cfg.nu_min = std::stod(value);
        else if (qualified == "dual.nu_max") cfg.nu_max = std::stod(value);
        else if (qualified == "dual.nu_step") cfg.nu_step = std::stod(value);
        else if (qualified == "sweep.kind") cfg.sweep_kind = value;
        else if (qualified == "sweep.base") cfg.sweep_base = std::stod(value);
        else if (qualified == "sweep.n_list") cfg.sweep_n = split_ints(value);
        else if (qualified == "counterexample.n_list") cfg.ce_n = split_ints(value);
        else if (qualified == "ui.k_grid") cfg.ui_k = split_doubles(value);
        else if (qualified == "ui.threshold") cfg.ui_threshold = std::stod(value);
        else if (qualified == "output.dir") cfg.out_dir = value;
        else
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": unknown key '" + qualified + "'");
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

}  // namespace umlab
