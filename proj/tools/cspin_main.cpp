// Command-line front end: scenario sweeps, single-state solves, figure
// reproduction and ED cross-checks.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "cspin/cspin.hpp"

namespace {

int exit_code_for(int failed_rows) { return failed_rows > 0 ? 1 : 0; }

cspin::ScenarioConfig load_config(const std::string& path) {
    return cspin::parse_config(cspin::read_file(path));
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir, int threads,
              bool verbose) {
    cspin::ScenarioConfig cfg = load_config(config_path);
    cspin::RunResult rr = cspin::run_scenario(cfg, out_dir, threads, verbose);
    return exit_code_for(rr.failed_rows);
}

// Solve a single eigenstate at the top of the configured g~ grid and print a
// JSON record to stdout.
int cmd_solve(const std::string& config_path, bool verbose) {
    using namespace cspin;
    ScenarioConfig cfg = load_config(config_path);
    ModelParams base = build_model(cfg.distribution.make(cfg.n_spins), 1.0, cfg.field.vec());
    const double gt = cfg.g_grid.max;
    const double g = gt * base.field_norm() / with_g(base, 1.0).total_coupling();
    ParentState parent = ParentState::from_motif(cfg.parents.front(), base.n_spins);

    ChargeSolution sol = continue_in_g(base, parent, g, 16, cfg.newton_tol);
    ObservableRecord rec = compute_record(base, parent, g, true, 16, cfg.newton_tol, cfg.tol_gamma);

    nlohmann::json out;
    out["parent"] = parent.label();
    out["g"] = g;
    out["g_tilde"] = gt;
    out["residual_norm"] = sol.residual_norm;
    out["charge_eigenvalues"] = std::vector<double>(sol.r.data(), sol.r.data() + sol.r.size());
    nlohmann::json exp = nlohmann::json::array();
    for (int j = 0; j < base.n_spins; ++j)
        exp.push_back({{"sx", rec.expectations(j, 0)},
                       {"sy", rec.expectations(j, 1)},
                       {"sz", rec.expectations(j, 2)}});
    out["expectations"] = std::move(exp);
    out["gamma0"] = rec.gamma0;
    out["effective_field"] = {rec.effective_field[0], rec.effective_field[1], rec.effective_field[2]};
    out["classification"] = rec.dark ? "dark" : "bright";
    std::cout << out.dump(2) << "\n";
    if (verbose) std::fprintf(stderr, "[cspin] solved %s at g~=%g\n", parent.label().c_str(), gt);
    return 0;
}

int cmd_ed_check(const std::string& config_path, const std::string& out_dir, int threads,
                 bool verbose) {
    cspin::ScenarioConfig cfg = load_config(config_path);
    if (cfg.scenario != cspin::Scenario::ed_check)
        throw cspin::ConfigValueError("ed-check expects a config with scenario = ed_check");
    cspin::RunResult rr = cspin::run_scenario(cfg, out_dir, threads, verbose);
    std::cout << rr.manifest["ed_checks"].dump(2) << "\n";
    return exit_code_for(rr.failed_rows);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"XX central spin model: conserved-charge solver and sweep runner"};
    app.require_subcommand(1);
    app.fallthrough(); // let --verbose/--threads appear after the subcommand

    std::string config_path, out_dir = "out";
    int threads = 1;
    bool verbose = false;
    app.add_flag("--verbose", verbose, "progress output on stderr");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

    auto* sweep = app.add_subcommand("sweep", "run a scenario sweep from a config file");
    sweep->add_option("--config", config_path, "scenario config (JSON)")->required();
    sweep->add_option("--out", out_dir, "output directory");

    auto* solve = app.add_subcommand("solve", "solve one eigenstate and print it as JSON");
    solve->add_option("--config", config_path, "scenario config (JSON)")->required();

    auto* figures = app.add_subcommand("reproduce-figures", "run the bundled figure configs");
    figures->add_option("--out", out_dir, "output root directory");

    auto* edc = app.add_subcommand("ed-check", "cross-check the solver against dense ED");
    edc->add_option("--config", config_path, "scenario config (JSON)")->required();
    edc->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) return cmd_sweep(config_path, out_dir, threads, verbose);
        if (solve->parsed()) return cmd_solve(config_path, verbose);
        if (edc->parsed()) return cmd_ed_check(config_path, out_dir, threads, verbose);
        if (figures->parsed())
            return exit_code_for(cspin::reproduce_figures(out_dir, threads, verbose));
    } catch (const cspin::SchemaError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const cspin::ConfigValueError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const cspin::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
