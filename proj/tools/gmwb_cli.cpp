// Command-line front end: prices, fair fees, convergence tables, control maps,
// Monte Carlo cross-validation, and kernel diagnostics, all emitted as CSV.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <iostream>
#include <memory>

#include "gmwb/config.hpp"
#include "gmwb/csv.hpp"

namespace {

using namespace gmwb;

struct CliState {
    std::string config_path;
    int level = -1;  // override
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
};

RunConfig make_config(const CliState& st) {
    RunConfig cfg = st.config_path.empty() ? default_config() : load_config(st.config_path);
    if (st.level >= 0) cfg.grid.level = st.level;
    if (!st.out.empty()) cfg.out = st.out;
    if (st.seed_set) cfg.mc.seed = st.seed;
    if (st.threads > 0) cfg.run.threads = st.threads;
    cfg.finalize();
    return cfg;
}

std::string model_tag(const ModelParams& m) {
    const bool jd = m.lambda > 0.0 && !jump_is_none(m.jump);
    return jd ? "JD-V" : "GBM-V";
}

struct LevelRun {
    std::unique_ptr<Grid> grid;  // owns the lattice the Solution points into
    Solution sol;
};

LevelRun run_level(const RunConfig& cfg, int level, bool store_controls) {
    RunConfig c = cfg;
    c.grid.level = level;
    c.run.store_controls = store_controls;
    LevelRun lr;
    lr.grid = std::make_unique<Grid>(build_grid(c.grid, c.contract));
    if (!lr.grid->w_min_condition_ok)
        std::cerr << "note: w_min depth condition not met (" << lr.grid->w_min_condition_note
                  << "); proceeding\n";
    lr.sol = solve(*lr.grid, c.model, c.contract, c.run);
    return lr;
}

int cmd_price(const RunConfig& cfg, bool multi_level) {
    CsvTable t;
    t.comments.push_back("config: " + config_echo(cfg));
    t.header = {"level", "price", "ratio", "alpha_eps", "defect", "seconds"};
    const int top = cfg.grid.level;
    std::vector<double> prices;
    for (int level = multi_level ? 0 : top; level <= top; ++level) {
        const LevelRun lr = run_level(cfg, level, false);
        const double price =
            price_at(lr.sol, cfg.contract.premium, cfg.model.r0, cfg.contract.premium);
        prices.push_back(price);
        double ratio = std::nan("");
        const std::size_t n = prices.size();
        if (n >= 3) ratio = (prices[n - 3] - prices[n - 2]) / (prices[n - 2] - prices[n - 1]);
        t.add_row({std::to_string(level), csv_num(price), csv_num(ratio),
                   std::to_string(lr.sol.kernel.alpha_eps),
                   csv_num(lr.sol.kernel.monotonicity_defect), csv_num(lr.sol.wall_seconds)});
    }
    t.write(cfg.out);
    return 0;
}

int cmd_fee(const RunConfig& cfg) {
    if (!(cfg.fee_tol > 0.0)) throw config_error("fee: tol > 0 required");
    RunConfig c = cfg;
    Grid grid = build_grid(c.grid, c.contract);
    const FeeResult fr = fair_fee(grid, c.model, c.contract, c.fee_tol, c.run, c.fee_bracket_lo,
                                  c.fee_bracket_hi);
    CsvTable t;
    t.comments.push_back("config: " + config_echo(cfg));
    t.header = {"model", "T", "beta_f", "iterations"};
    t.add_row({model_tag(cfg.model), csv_num(cfg.contract.maturity), csv_num(fr.beta_f),
               std::to_string(fr.iterations)});
    t.write(cfg.out);
    return 0;
}

int cmd_controls(const RunConfig& cfg) {
    const LevelRun lr = run_level(cfg, cfg.grid.level, true);
    const double t_slice = cfg.control_time > 0.0 ? cfg.control_time : 0.5 * cfg.contract.maturity;
    const double r_slice = cfg.control_rate != 0.0 ? cfg.control_rate : cfg.model.r0;
    CsvTable t;
    t.comments.push_back("config: " + config_echo(cfg));
    t.comments.push_back("t = " + csv_num(t_slice) + ", r = " + csv_num(r_slice));
    t.header = {"z", "a", "gamma_star", "branch"};
    for (const ControlMapRow& row : control_map(lr.sol, t_slice, r_slice)) {
        const char* b = row.branch == WithdrawBranch::None ? "none"
                        : row.branch == WithdrawBranch::ContinuousRate ? "continuous" : "finite";
        t.add_row({csv_num(row.z), csv_num(row.a), csv_num(row.gamma), b});
    }
    t.write(cfg.out);
    return 0;
}

int cmd_mc_validate(const RunConfig& cfg) {
    const bool store = cfg.store_controls_set ? cfg.run.store_controls : true;
    const LevelRun lr = run_level(cfg, cfg.grid.level, store);
    const McResult res = replay(lr.sol, cfg.mc);
    const double fp = price_at(lr.sol, cfg.contract.premium, cfg.model.r0, cfg.contract.premium);
    std::cerr << "mc: mean = " << res.mean << ", se = " << res.std_error << ", ci = ["
              << res.ci_low << ", " << res.ci_high << "]\n";
    CsvTable t;
    t.comments.push_back("config: " + config_echo(cfg));
    t.header = {"level", "paths", "substeps", "seed", "mean", "std_error", "ci_low", "ci_high",
                "fourier_price"};
    t.add_row({std::to_string(cfg.grid.level), std::to_string(res.n_paths),
               std::to_string(cfg.mc.substeps), std::to_string(cfg.mc.seed), csv_num(res.mean),
               csv_num(res.std_error), csv_num(res.ci_low), csv_num(res.ci_high), csv_num(fp)});
    t.write(cfg.out);
    return 0;
}

int cmd_kernel_diag(const RunConfig& cfg) {
    CsvTable t;
    t.comments.push_back("config: " + config_echo(cfg));
    t.header = {"level", "alpha_eps", "defect", "residual", "weight_sum_error", "seconds"};
    for (int level = 0; level <= cfg.grid.level; ++level) {
        RunConfig c = cfg;
        c.grid.level = level;
        const Grid grid = build_grid(c.grid, c.contract);
        const auto t0 = std::chrono::steady_clock::now();
        const KernelWeights kw =
            select_weights(grid, c.model, grid.dtau, c.run.eps, c.run.eps1, c.run.alpha_cap);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        t.add_row({std::to_string(level), std::to_string(kw.alpha_eps),
                   csv_num(kw.monotonicity_defect), csv_num(kw.accuracy_residual),
                   csv_num(kw.weight_sum_error), csv_num(secs)});
    }
    t.write(cfg.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GMWB pricing engine: jump-diffusion with a Vasicek short rate"};
    app.require_subcommand(1);
    CliState st;
    app.add_option("--config", st.config_path, "JSON configuration file");
    app.add_option("--level", st.level, "grid refinement level override");
    app.add_option("--out", st.out, "output CSV path (default stdout)");
    auto* seed_opt = app.add_option("--seed", st.seed, "Monte Carlo seed override");
    app.add_option("--threads", st.threads, "worker threads for the slice loop");

    auto* price = app.add_subcommand("price", "price at the configured level");
    auto* converge = app.add_subcommand("converge", "price at levels 0..level with ratios");
    auto* fee = app.add_subcommand("fee", "fair insurance fee via bracketed secant");
    auto* controls = app.add_subcommand("controls", "optimal-withdrawal map CSV");
    auto* mcv = app.add_subcommand("mc-validate", "replay stored controls under Monte Carlo");
    auto* kdiag = app.add_subcommand("kernel-diag", "weight-selection diagnostics per level");

    CLI11_PARSE(app, argc, argv);
    st.seed_set = seed_opt->count() > 0;

    try {
        const gmwb::RunConfig cfg = make_config(st);
        if (price->parsed()) return cmd_price(cfg, false);
        if (converge->parsed()) return cmd_price(cfg, true);
        if (fee->parsed()) return cmd_fee(cfg);
        if (controls->parsed()) return cmd_controls(cfg);
        if (mcv->parsed()) return cmd_mc_validate(cfg);
        if (kdiag->parsed()) return cmd_kernel_diag(cfg);
    } catch (const gmwb::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const gmwb::grid_condition_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const gmwb::bracket_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const gmwb::controls_missing_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
