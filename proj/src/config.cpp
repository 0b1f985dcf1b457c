#include "gmwb/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace gmwb {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& block, const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw config_error("config: unknown key '" + it.key() + "' in block '" + block + "'");
}

template <typename T>
void get(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

JumpSpec parse_jump(const json& j) {
    check_keys(j, "model.jump", {"type", "nu", "varsigma", "p_up", "eta1", "eta2"});
    const std::string type = j.value("type", "merton");
    if (type == "none") return NoJump{};
    if (type == "merton") {
        MertonJump m{-0.9, 0.45};
        get(j, "nu", m.nu);
        get(j, "varsigma", m.varsigma);
        return m;
    }
    if (type == "kou") {
        KouJump k{0.3445, 3.0465, 3.0775};
        get(j, "p_up", k.p_up);
        get(j, "eta1", k.eta1);
        get(j, "eta2", k.eta2);
        return k;
    }
    throw config_error("config: jump type must be one of none|merton|kou");
}

}  // namespace

void RunConfig::finalize() {
    if (withdraw_rate_input == 0.0) withdraw_rate_input = 1.0 / contract.maturity;
    contract.withdraw_rate = withdraw_rate_absolute ? withdraw_rate_input
                                                    : withdraw_rate_input * contract.premium;
    model.validate();
    contract.validate();
    if (!(run.eps > 0.0) || !(run.eps1 > 0.0)) throw config_error("config: eps, eps1 > 0 required");
    if (run.alpha_cap < 2) throw config_error("config: alpha_cap >= 2 required");
    if (run.threads < 1) throw config_error("config: threads >= 1 required");
    if (mc.n_paths < 100) throw config_error("config: mc.paths >= 100 required");
    if (mc.substeps < 1) throw config_error("config: mc.substeps >= 1 required");
}

RunConfig default_config() {
    RunConfig cfg;
    cfg.finalize();
    return cfg;
}

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        throw config_error(std::string("config: JSON parse failure: ") + e.what());
    }
    check_keys(j, "<root>", {"schema_version", "model", "contract", "grid", "run", "mc"});
    const int version = j.value("schema_version", 1);
    if (version != 1) throw config_error("config: unsupported schema_version");

    RunConfig cfg;
    if (j.contains("model")) {
        const json& m = j["model"];
        check_keys(m, "model",
                   {"sigma_z", "lambda", "jump", "rho", "delta", "theta", "sigma_r", "beta", "r0"});
        get(m, "sigma_z", cfg.model.sigma_z);
        get(m, "lambda", cfg.model.lambda);
        get(m, "rho", cfg.model.rho);
        get(m, "delta", cfg.model.delta);
        get(m, "theta", cfg.model.theta);
        get(m, "sigma_r", cfg.model.sigma_r);
        get(m, "beta", cfg.model.beta);
        get(m, "r0", cfg.model.r0);
        if (m.contains("jump")) cfg.model.jump = parse_jump(m["jump"]);
    }
    if (j.contains("contract")) {
        const json& c = j["contract"];
        check_keys(c, "contract",
                   {"maturity", "withdraw_rate", "withdraw_rate_absolute", "penalty", "fixed_cost",
                    "premium"});
        get(c, "maturity", cfg.contract.maturity);
        get(c, "withdraw_rate", cfg.withdraw_rate_input);
        get(c, "withdraw_rate_absolute", cfg.withdraw_rate_absolute);
        get(c, "penalty", cfg.contract.penalty);
        get(c, "fixed_cost", cfg.contract.fixed_cost);
        get(c, "premium", cfg.contract.premium);
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        check_keys(g, "grid",
                   {"level", "n_w", "n_r", "n_a", "n_tau", "w_min", "w_max", "r_min", "r_max",
                    "padding_factor", "a_spacing", "a_geometric_ratio"});
        get(g, "level", cfg.grid.level);
        get(g, "n_w", cfg.grid.n_w);
        get(g, "n_r", cfg.grid.n_r);
        get(g, "n_a", cfg.grid.n_a);
        get(g, "n_tau", cfg.grid.n_tau);
        get(g, "w_min", cfg.grid.w_min);
        get(g, "w_max", cfg.grid.w_max);
        get(g, "r_min", cfg.grid.r_min);
        get(g, "r_max", cfg.grid.r_max);
        get(g, "padding_factor", cfg.grid.padding_factor);
        if (g.contains("a_spacing")) {
            const std::string s = g["a_spacing"].get<std::string>();
            if (s == "uniform")
                cfg.grid.a_spacing = ASpacing::Uniform;
            else if (s == "geometric")
                cfg.grid.a_spacing = ASpacing::Geometric;
            else
                throw config_error("config: a_spacing must be uniform|geometric");
        }
        get(g, "a_geometric_ratio", cfg.grid.a_geometric_ratio);
    }
    if (j.contains("run")) {
        const json& r = j["run"];
        check_keys(r, "run",
                   {"eps", "eps1", "alpha_cap", "store_controls", "n_loc", "n_ref", "threads",
                    "check_stability", "fee_tol", "fee_bracket_lo", "fee_bracket_hi",
                    "control_time", "control_rate", "out"});
        get(r, "eps", cfg.run.eps);
        get(r, "eps1", cfg.run.eps1);
        get(r, "alpha_cap", cfg.run.alpha_cap);
        get(r, "store_controls", cfg.run.store_controls);
        cfg.store_controls_set = r.contains("store_controls");
        get(r, "n_loc", cfg.run.policy.n_loc);
        get(r, "n_ref", cfg.run.policy.n_ref);
        get(r, "threads", cfg.run.threads);
        get(r, "check_stability", cfg.run.check_stability);
        get(r, "fee_tol", cfg.fee_tol);
        get(r, "fee_bracket_lo", cfg.fee_bracket_lo);
        get(r, "fee_bracket_hi", cfg.fee_bracket_hi);
        get(r, "control_time", cfg.control_time);
        get(r, "control_rate", cfg.control_rate);
        get(r, "out", cfg.out);
    }
    if (j.contains("mc")) {
        const json& m = j["mc"];
        check_keys(m, "mc", {"paths", "substeps", "seed", "antithetic"});
        get(m, "paths", cfg.mc.n_paths);
        get(m, "substeps", cfg.mc.substeps);
        get(m, "seed", cfg.mc.seed);
        get(m, "antithetic", cfg.mc.antithetic);
    }
    cfg.finalize();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_echo(const RunConfig& cfg) {
    json jump;
    if (const auto* m = std::get_if<MertonJump>(&cfg.model.jump))
        jump = {{"type", "merton"}, {"nu", m->nu}, {"varsigma", m->varsigma}};
    else if (const auto* k = std::get_if<KouJump>(&cfg.model.jump))
        jump = {{"type", "kou"}, {"p_up", k->p_up}, {"eta1", k->eta1}, {"eta2", k->eta2}};
    else
        jump = {{"type", "none"}};
    json j = {
        {"schema_version", 1},
        {"model",
         {{"sigma_z", cfg.model.sigma_z},
          {"lambda", cfg.model.lambda},
          {"jump", jump},
          {"rho", cfg.model.rho},
          {"delta", cfg.model.delta},
          {"theta", cfg.model.theta},
          {"sigma_r", cfg.model.sigma_r},
          {"beta", cfg.model.beta},
          {"r0", cfg.model.r0}}},
        {"contract",
         {{"maturity", cfg.contract.maturity},
          {"withdraw_rate", cfg.withdraw_rate_input},
          {"withdraw_rate_absolute", cfg.withdraw_rate_absolute},
          {"penalty", cfg.contract.penalty},
          {"fixed_cost", cfg.contract.fixed_cost},
          {"premium", cfg.contract.premium}}},
        {"grid",
         {{"level", cfg.grid.level},
          {"padding_factor", cfg.grid.padding_factor},
          {"r_min", cfg.grid.r_min},
          {"r_max", cfg.grid.r_max}}},
        {"run",
         {{"eps", cfg.run.eps},
          {"eps1", cfg.run.eps1},
          {"n_loc", cfg.run.policy.n_loc},
          {"n_ref", cfg.run.policy.n_ref},
          {"store_controls", cfg.run.store_controls}}},
        {"mc",
         {{"paths", cfg.mc.n_paths},
          {"substeps", cfg.mc.substeps},
          {"seed", cfg.mc.seed},
          {"antithetic", cfg.mc.antithetic}}},
    };
    return j.dump();
}

}  // namespace gmwb
