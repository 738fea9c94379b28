#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace umlab {

/// Experiment configuration: flat key = value lines under [section]
/// headers.  to_text/from_text are exact inverses (doubles are written
/// with 17 significant digits).
struct ExperimentConfig {
    // [grid]
    double horizon = 1.0;
    int steps = 256;
    // [mc]
    std::int64_t paths = 100000;
    std::uint64_t seed = 42;
    // [market]
    std::string market_kind = "constant";  // constant | time_poly | counterexample
    std::vector<double> market_params = {0.2};
    // [utility]
    std::string utility = "log";  // log | power
    double gamma = 0.5;
    // [solve]
    double initial_wealth = 1.0;
    // [dual]
    std::vector<double> dual_y = {1.0};
    double nu_min = -0.5;
    double nu_max = 0.5;
    double nu_step = 0.1;
    // [sweep]
    std::string sweep_kind = "scaled_constant";  // scaled_constant | counterexample
    double sweep_base = 0.2;
    std::vector<int> sweep_n = {1, 2, 4, 8, 16, 32, 64};
    // [counterexample]
    std::vector<int> ce_n = {2, 10, 100};
    // [ui]
    std::vector<double> ui_k = {1.0, 10.0, 100.0, 1000.0};
    double ui_threshold = 1e-2;
    // [output]
    std::string out_dir = "out";

    std::string to_text() const;
    static ExperimentConfig from_text(const std::string& text);
    static ExperimentConfig load(const std::string& path);

    bool operator==(const ExperimentConfig&) const = default;
};

/// 17-significant-digit formatting used for config and CSV output; the
/// shortest representation that round-trips every double exactly.
std::string format_double(double v);
std::string join_doubles(const std::vector<double>& v);
std::string join_ints(const std::vector<int>& v);
std::vector<double> split_doubles(const std::string& s);
std::vector<int> split_ints(const std::string& s);

}  // namespace umlab
