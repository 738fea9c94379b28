#include "umlab/runner.hpp"

#include "umlab/case_studies.hpp"
#include "umlab/duality.hpp"
#include "umlab/market.hpp"
#include "umlab/preferences.hpp"
#include "umlab/stability.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

namespace umlab {

namespace {

RiskProcess market_from_config(const ExperimentConfig& cfg) {
    if (cfg.market_kind == "constant") {
        if (cfg.market_params.size() != 1)
            throw std::invalid_argument("market: constant kind takes one parameter");
        return RiskProcess::constant(cfg.market_params[0]);
    }
    if (cfg.market_kind == "time_poly") {
        Vec coeffs(static_cast<Index>(cfg.market_params.size()));
        for (std::size_t i = 0; i < cfg.market_params.size(); ++i)
            coeffs[static_cast<Index>(i)] = cfg.market_params[i];
        return RiskProcess::time_poly(coeffs);
    }
    if (cfg.market_kind == "counterexample") {
        if (cfg.market_params.size() != 1)
            throw std::invalid_argument("market: counterexample kind takes the index n");
        return RiskProcess::counterexample(static_cast<int>(cfg.market_params[0]));
    }
    throw std::invalid_argument("market: unknown kind '" + cfg.market_kind + "'");
}

UtilityPair utility_from_config(const ExperimentConfig& cfg) {
    if (cfg.utility == "log") return make_log();
    if (cfg.utility == "power") return make_power(cfg.gamma);
    throw std::invalid_argument("utility: unknown kind '" + cfg.utility + "'");
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += "\"\"";
        else quoted += c;
    }
    quoted += "\"";
    return quoted;
}

class Csv {
  public:
    void header(const std::vector<std::string>& cols) { append_row(cols); }
    void row(const std::vector<std::string>& cols) { append_row(cols); }
    const std::string& text() const { return text_; }

  private:
    void append_row(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (i) text_ += ",";
            text_ += csv_field(cols[i]);
        }
        text_ += "\n";
    }
    std::string text_;
};

std::string fd(double v) { return format_double(v); }
std::string fi(long long v) { return std::to_string(v); }

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

void write_outputs(const ExperimentConfig& cfg, const std::string& subcommand, const Csv& csv) {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / (subcommand + ".csv"), csv.text());
    std::ostringstream manifest;
    manifest << "umlab " << kVersion << "\n";
    manifest << "subcommand = " << subcommand << "\n\n";
    manifest << cfg.to_text();
    write_file(dir / "manifest.txt", manifest.str());
}

std::shared_ptr<const PathEnsemble> make_ensemble(const ExperimentConfig& cfg,
                                                  bool with_second_driver) {
    return std::make_shared<const PathEnsemble>(simulate_driver(
        TimeGrid::uniform(cfg.horizon, cfg.steps), cfg.paths, cfg.seed, with_second_driver));
}

MarketSequence sequence_from_config(const ExperimentConfig& cfg,
                                    std::shared_ptr<const PathEnsemble> ens) {
    if (cfg.sweep_kind == "scaled_constant")
        return scaled_constant_sequence(cfg.sweep_base, cfg.sweep_n, std::move(ens));
    if (cfg.sweep_kind == "counterexample") {
        std::vector<int> ns;
        for (int n : cfg.sweep_n)
            if (n >= 2) ns.push_back(n);
        if (ns.empty()) throw std::invalid_argument("sweep: counterexample indices must be >= 2");
        return counterexample_sequence(ns, std::move(ens));
    }
    throw std::invalid_argument("sweep: unknown kind '" + cfg.sweep_kind + "'");
}

int run_simulate(const ExperimentConfig& cfg) {
    auto ens = make_ensemble(cfg, false);
    Csv csv;
    csv.header({"k", "t", "mean_m", "se_m", "qv_cum", "paths", "seed"});
    double qv_cum = 0.0;
    for (Index k = 0; k < ens->grid.n_points(); ++k) {
        if (k > 0) qv_cum += ens->qv[k - 1];
        const MCStat m = mc_mean(ens->m.col(k));
        csv.row({fi(k), fd(ens->grid.t(k)), fd(m.value), fd(m.se), fd(qv_cum), fi(cfg.paths),
                 std::to_string(cfg.seed)});
    }
    write_outputs(cfg, "simulate", csv);
    return 0;
}

int run_solve(const ExperimentConfig& cfg) {
    const RiskProcess market = market_from_config(cfg);
    const UtilityPair u = utility_from_config(cfg);
    auto ens = make_ensemble(cfg, false);
    const Vec z = deflator_terminal(market, *ens);
    const Solution sol = solve_complete(CompleteMarketProblem(z, u, cfg.initial_wealth));

    Csv csv;
    csv.header({"market", "params", "utility", "gamma", "x", "y", "primal", "primal_se", "dual",
                "dual_se", "budget_residual", "iterations", "paths", "steps", "seed"});
    csv.row({cfg.market_kind, join_doubles(cfg.market_params), cfg.utility,
             cfg.utility == "power" ? fd(cfg.gamma) : "",
             fd(cfg.initial_wealth), fd(sol.y), fd(sol.primal.value), fd(sol.primal.se),
             fd(sol.dual.value), fd(sol.dual.se), fd(sol.budget_residual), fi(sol.iterations),
             fi(cfg.paths), fi(cfg.steps), std::to_string(cfg.seed)});
    write_outputs(cfg, "solve", csv);
    return 0;
}

int run_dual(const ExperimentConfig& cfg) {
    const RiskProcess market = market_from_config(cfg);
    const UtilityPair u = utility_from_config(cfg);
    auto ens = make_ensemble(cfg, true);
    const Vec z = deflator_terminal(market, *ens);

    std::vector<DualCandidate> family;
    bool has_zero = false;
    const int n_nu = static_cast<int>(std::floor((cfg.nu_max - cfg.nu_min) / cfg.nu_step + 0.5));
    for (int i = 0; i <= n_nu; ++i) {
        double nu = cfg.nu_min + i * cfg.nu_step;
        if (std::abs(nu) < 1e-12) nu = 0.0;
        has_zero = has_zero || nu == 0.0;
        family.push_back(DualCandidate::constant(nu));
    }
    if (!has_zero) family.push_back(DualCandidate::zero());

    Csv csv;
    csv.header({"y", "dual_value", "dual_se", "best_nu", "best_value", "best_se", "candidates",
                "paths", "steps", "seed"});
    for (double y : cfg.dual_y) {
        const MCStat dv = dual_value(z, u, y);
        const DualSearchResult res = incomplete_dual_search(z, *ens, family, u, y);
        const double best_nu = family[res.best_index].nu.coeffs()[0];
        csv.row({fd(y), fd(dv.value), fd(dv.se), fd(best_nu), fd(res.best_value.value),
                 fd(res.best_value.se), fi(static_cast<long long>(family.size())), fi(cfg.paths),
                 fi(cfg.steps), std::to_string(cfg.seed)});
    }
    write_outputs(cfg, "dual", csv);
    return 0;
}

int run_counterexample(const ExperimentConfig& cfg) {
    Csv csv;
    csv.header({"n", "alpha", "beta", "mean_f", "c", "y4_closed", "y4_mc", "y4_mc_se",
                "norm_bound", "kyfan_two_thirds", "budget", "budget_se", "paths", "seed"});
    for (int n : cfg.ce_n) {
        const CounterexampleParams p = counterexample_params(n);
        const double y = counterexample_multiplier(n);
        const CounterexampleWealth w = counterexample_wealth(n, cfg.paths, cfg.seed);
        csv.row({fi(n), fd(p.alpha), fd(p.beta), fd(p.mean_f), fd(p.c), fd(std::pow(y, 4.0)),
                 fd(w.y4_mc.value), fd(w.y4_mc.se), fd(counterexample_norm_bound(n)),
                 fd(w.ky_fan_to_two_thirds), fd(w.budget.value), fd(w.budget.se), fi(cfg.paths),
                 std::to_string(cfg.seed)});
    }
    write_outputs(cfg, "counterexample", csv);
    return 0;
}

int run_sweep(const ExperimentConfig& cfg) {
    auto ens = make_ensemble(cfg, false);
    const MarketSequence seq = sequence_from_config(cfg, ens);
    const UtilityPair u = utility_from_config(cfg);
    const auto rows = stability_sweep(seq, u, cfg.initial_wealth);

    Csv csv;
    csv.header({"n", "l2_distance", "ucp_distance", "value_gap", "multiplier", "wealth_kyfan",
                "deflator_kyfan", "error", "paths", "steps", "seed"});
    for (const auto& r : rows) {
        csv.row({fi(r.n), fd(r.l2_distance), fd(r.ucp_distance), fd(r.value_gap),
                 fd(r.multiplier), fd(r.wealth_kyfan), fd(r.deflator_kyfan), r.error,
                 fi(cfg.paths), fi(cfg.steps), std::to_string(cfg.seed)});
    }
    write_outputs(cfg, "sweep", csv);
    return 0;
}

int run_ui_diag(const ExperimentConfig& cfg) {
    auto ens = make_ensemble(cfg, false);
    const MarketSequence seq = sequence_from_config(cfg, ens);
    const UtilityPair u = utility_from_config(cfg);

    std::vector<Vec> family;
    family.push_back(deflator_terminal(seq.limit, *ens));
    for (const auto& [n, market] : seq.terms) family.push_back(deflator_terminal(market, *ens));

    Vec k_grid(static_cast<Index>(cfg.ui_k.size()));
    for (std::size_t i = 0; i < cfg.ui_k.size(); ++i) k_grid[static_cast<Index>(i)] = cfg.ui_k[i];
    const UICertificate cert = v_relative_compactness_diag(family, u, k_grid, cfg.ui_threshold);

    Csv csv;
    csv.header({"k", "tail_sup", "threshold", "verdict", "paths", "steps", "seed"});
    for (Index j = 0; j < cert.k_grid.size(); ++j) {
        csv.row({fd(cert.k_grid[j]), fd(cert.tail_curve[j]), fd(cert.threshold),
                 cert.pass ? "pass" : "fail", fi(cfg.paths), fi(cfg.steps),
                 std::to_string(cfg.seed)});
    }
    write_outputs(cfg, "ui-diag", csv);
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Monte Carlo laboratory for utility maximization and its stability"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "configuration file (key = value with sections)");
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Monte Carlo seed");
    std::int64_t paths = 0;
    auto* paths_opt = app.add_option("--paths", paths, "number of Monte Carlo paths");
    int steps = 0;
    auto* steps_opt = app.add_option("--steps", steps, "time steps per path");
    std::string out_dir;
    auto* out_opt = app.add_option("--out", out_dir, "output directory");

    auto* sub_simulate = app.add_subcommand("simulate", "simulate the driver ensemble");
    auto* sub_solve = app.add_subcommand("solve", "complete-market utility maximization");
    auto* sub_dual = app.add_subcommand("dual", "dual value and parametric dual search");
    auto* sub_ce = app.add_subcommand("counterexample", "instability market family");
    auto* sub_sweep = app.add_subcommand("sweep", "stability sweep over a market sequence");
    auto* sub_ui = app.add_subcommand("ui-diag", "uniform-integrability diagnostic");

    std::string lambda_kind, utility_kind, sweep_kind;
    std::vector<double> market_params;
    double gamma = 0.0, x0 = 0.0, base = 0.0, threshold = 0.0;
    std::vector<int> n_list;
    std::vector<double> y_grid, k_grid;

    for (auto* sub : {sub_solve, sub_dual}) {
        sub->add_option("--market", lambda_kind, "market kind: constant|time_poly|counterexample");
        sub->add_option("--params", market_params, "market parameters")->delimiter(',');
    }
    for (auto* sub : {sub_solve, sub_dual, sub_sweep, sub_ui}) {
        sub->add_option("--utility", utility_kind, "utility kind: log|power");
        sub->add_option("--gamma", gamma, "power utility exponent");
    }
    for (auto* sub : {sub_solve, sub_sweep}) {
        sub->add_option("--x", x0, "initial wealth");
    }
    sub_dual->add_option("--y", y_grid, "multiplier grid")->delimiter(',');
    sub_ce->add_option("--n-list", n_list, "counterexample indices")->delimiter(',');
    for (auto* sub : {sub_sweep, sub_ui}) {
        sub->add_option("--sweep-kind", sweep_kind, "scaled_constant|counterexample");
        sub->add_option("--base", base, "base market price of risk");
        sub->add_option("--n-list", n_list, "sequence indices")->delimiter(',');
    }
    sub_ui->add_option("--k-grid", k_grid, "truncation levels")->delimiter(',');
    sub_ui->add_option("--threshold", threshold, "pass threshold");

    std::vector<const char*> argv;
    argv.push_back("umlab");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = ExperimentConfig::load(config_path);
        if (seed_opt->count()) cfg.seed = seed;
        if (paths_opt->count()) cfg.paths = paths;
        if (steps_opt->count()) cfg.steps = steps;
        if (out_opt->count()) cfg.out_dir = out_dir;

        if (!lambda_kind.empty()) cfg.market_kind = lambda_kind;
        if (!market_params.empty()) cfg.market_params = market_params;
        if (!utility_kind.empty()) cfg.utility = utility_kind;
        for (auto* sub : {sub_solve, sub_dual, sub_sweep, sub_ui}) {
            if (sub->parsed() && sub->count("--gamma")) cfg.gamma = gamma;
        }
        for (auto* sub : {sub_solve, sub_sweep}) {
            if (sub->parsed() && sub->count("--x")) cfg.initial_wealth = x0;
        }
        if (sub_dual->parsed() && !y_grid.empty()) cfg.dual_y = y_grid;
        if (sub_ce->parsed() && !n_list.empty()) cfg.ce_n = n_list;
        for (auto* sub : {sub_sweep, sub_ui}) {
            if (!sub->parsed()) continue;
            if (sub->count("--sweep-kind")) cfg.sweep_kind = sweep_kind;
            if (sub->count("--base")) cfg.sweep_base = base;
            if (!n_list.empty()) cfg.sweep_n = n_list;
        }
        if (sub_ui->parsed()) {
            if (!k_grid.empty()) cfg.ui_k = k_grid;
            if (sub_ui->count("--threshold")) cfg.ui_threshold = threshold;
        }

        if (sub_simulate->parsed()) return run_simulate(cfg);
        if (sub_solve->parsed()) return run_solve(cfg);
        if (sub_dual->parsed()) return run_dual(cfg);
        if (sub_ce->parsed()) return run_counterexample(cfg);
        if (sub_sweep->parsed()) return run_sweep(cfg);
        if (sub_ui->parsed()) return run_ui_diag(cfg);
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace umlab
