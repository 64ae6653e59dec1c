// Batch front-end for the riskdiv shared library: reads a flat JSON config,
// dispatches one solve per invocation, writes CSV artifacts and a run report.
//
// Subcommands: solve-finite, solve-infinite, policy-iter, barrier-curve,
// validate. Exit codes: 0 success, 2 config error, 3 solver failure,
// 4 validation failure.

#include <riskdiv.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitValidation = 4;

struct CliError {
    int exit_code;
    std::string message;
};

[[noreturn]] void fail(int code, const std::string& msg) { throw CliError{code, msg}; }

[[noreturn]] void fail_solver(const std::string& where, rd_status st) {
    fail(kExitSolver, where + ": " + rd_status_name(st) + " (" + rd_last_error() + ")");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// ---------------------------------------------------------------- config --

json load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) fail(kExitConfig, "cannot open config file: " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        fail(kExitConfig, std::string("config parse error: ") + e.what());
    }
    if (!cfg.is_object()) fail(kExitConfig, "config must be a JSON object");
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos) fail(kExitConfig, "override must be key=value: " + ov);
        const std::string key = ov.substr(0, eq);
        const std::string val = ov.substr(eq + 1);
        json parsed;
        try {
            parsed = json::parse(val);
        } catch (const json::exception&) {
            parsed = val;  // bare strings stay strings
        }
        cfg[key] = parsed;
    }
    return cfg;
}

double require_number(const json& cfg, const std::string& key) {
    if (!cfg.contains(key) || !cfg[key].is_number())
        fail(kExitConfig, "config needs numeric field '" + key + "'");
    return cfg[key].get<double>();
}

double number_or(const json& cfg, const std::string& key, double fallback) {
    if (!cfg.contains(key)) return fallback;
    if (!cfg[key].is_number()) fail(kExitConfig, "field '" + key + "' must be numeric");
    return cfg[key].get<double>();
}

std::string string_or(const json& cfg, const std::string& key, const std::string& fallback) {
    if (!cfg.contains(key)) return fallback;
    if (!cfg[key].is_string()) fail(kExitConfig, "field '" + key + "' must be a string");
    return cfg[key].get<std::string>();
}

// ----------------------------------------------------------------- model --

using ModelPtr = std::unique_ptr<rd_model, decltype(&rd_model_destroy)>;

std::vector<std::pair<double, double>> read_tabulated_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(kExitConfig, "cannot open tabulated density file: " + path);
    std::vector<std::pair<double, double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double z, g;
        if (ls >> z >> g) rows.emplace_back(z, g);
        // non-numeric lines (a header) are skipped
    }
    if (rows.size() < 2) fail(kExitConfig, "tabulated density needs at least two rows");
    return rows;
}

ModelPtr make_model(const json& cfg, std::string& descriptor) {
    const std::string kind = string_or(cfg, "model_kind", "");
    rd_model* raw = nullptr;
    rd_status st = RD_ERR_INVALID_ARGUMENT;
    if (kind == "left_exponential") {
        const double lambda = require_number(cfg, "lambda");
        const double d = require_number(cfg, "d");
        st = rd_model_create_left_exponential(lambda, d, &raw);
        descriptor = "left_exponential(lambda=" + fmt(lambda) + ", d=" + fmt(d) + ")";
    } else if (kind == "double_exponential") {
        const double mu = require_number(cfg, "mu");
        st = rd_model_create_double_exponential(mu, &raw);
        descriptor = "double_exponential(mu=" + fmt(mu) + ")";
    } else if (kind == "tabulated") {
        const std::string path = string_or(cfg, "tabulated_csv", "");
        if (path.empty()) fail(kExitConfig, "tabulated model needs 'tabulated_csv'");
        const auto rows = read_tabulated_csv(path);
        std::vector<double> z, g;
        for (const auto& [a, b] : rows) {
            z.push_back(a);
            g.push_back(b);
        }
        st = rd_model_create_tabulated(z.data(), g.data(), z.size(), &raw);
        descriptor = "tabulated(" + path + ")";
    } else {
        fail(kExitConfig, "model_kind must be left_exponential, double_exponential or tabulated");
    }
    if (st != RD_OK) fail(kExitConfig, std::string("model construction: ") + rd_last_error());
    ModelPtr model(raw, &rd_model_destroy);

    int codes[4];
    const int n = rd_model_validate(model.get(), codes, 4);
    if (n > 0) {
        std::string msg = "model violates assumptions:";
        for (int i = 0; i < std::min(n, 4); ++i)
            msg += std::string(" ") + rd_violation_describe(codes[i]);
        fail(kExitConfig, msg);
    }
    return model;
}

struct Grid {
    double step;
    size_t n_nodes;
};

Grid make_grid(const json& cfg, const rd_model* model, double beta) {
    const bool auto_step = !cfg.contains("grid_step") ||
                           (cfg["grid_step"].is_string() && cfg["grid_step"] == "auto");
    const bool auto_max = !cfg.contains("grid_x_max") ||
                          (cfg["grid_x_max"].is_string() && cfg["grid_x_max"] == "auto");
    Grid g{};
    if (auto_step && auto_max) {
        if (rd_auto_grid(model, beta, &g.step, &g.n_nodes) != RD_OK)
            fail(kExitConfig, std::string("auto grid: ") + rd_last_error());
        return g;
    }
    g.step = auto_step ? 0.0 : require_number(cfg, "grid_step");
    if (auto_step) {
        size_t unused;
        if (rd_auto_grid(model, beta, &g.step, &unused) != RD_OK)
            fail(kExitConfig, std::string("auto grid: ") + rd_last_error());
    }
    if (!(g.step > 0.0)) fail(kExitConfig, "grid_step must be positive");
    double x_max;
    if (auto_max) {
        double xs;
        if (rd_xi_star(model, beta, &xs) != RD_OK)
            fail(kExitConfig, std::string("xi_star: ") + rd_last_error());
        x_max = xs + 10.0 * g.step;
    } else {
        x_max = require_number(cfg, "grid_x_max");
    }
    g.n_nodes = static_cast<size_t>(std::ceil(x_max / g.step)) + 1;
    return g;
}

// ---------------------------------------------------------------- output --

struct OutputDir {
    fs::path dir;

    explicit OutputDir(const json& cfg) {
        const std::string d = string_or(cfg, "output_dir", "");
        if (d.empty()) fail(kExitConfig, "config needs 'output_dir'");
        dir = d;
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) fail(kExitConfig, "cannot create output_dir: " + dir.string());
    }

    // temp + rename keeps partially written files out of the output directory
    void write(const std::string& name, const std::string& content) const {
        const fs::path tmp = dir / (name + ".tmp");
        const fs::path dst = dir / name;
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) fail(kExitSolver, "cannot write " + tmp.string());
            out << content;
        }
        std::error_code ec;
        fs::rename(tmp, dst, ec);
        if (ec) fail(kExitSolver, "cannot move output into place: " + dst.string());
    }
};

std::string bands_csv(const double* actions, size_t n, double step, std::string* classification) {
    rd_bands* raw = nullptr;
    const rd_status bst = rd_bands_extract(actions, n, step, 0.0, &raw);
    if (bst != RD_OK) fail_solver("band extraction", bst);
    std::unique_ptr<rd_bands, decltype(&rd_bands_destroy)> bands(raw, &rd_bands_destroy);
    const size_t count = rd_bands_count(bands.get());
    std::vector<double> c(count), d(count > 1 ? count - 1 : 0);
    rd_bands_levels(bands.get(), c.data(), d.data());
    const int cls = rd_bands_classify(bands.get());
    const char* cls_name = cls == RD_POLICY_PAY_ALL    ? "PayAll"
                           : cls == RD_POLICY_BARRIER ? "Barrier"
                                                       : "FiniteBand";
    if (classification) *classification = cls_name;
    std::ostringstream os;
    os << "# classification=" << cls_name << " xi=" << fmt(rd_bands_xi(bands.get())) << "\n";
    os << "k,c_k,d_k1\n";
    for (size_t k = 0; k < count; ++k) {
        os << k << "," << fmt(c[k]) << ",";
        os << (k + 1 < count ? fmt(d[k]) : std::string("inf")) << "\n";
    }
    return os.str();
}

// ------------------------------------------------------------- commands --

int cmd_solve_finite(const json& cfg) {
    const double beta = require_number(cfg, "beta");
    const double gamma = number_or(cfg, "gamma", 0.0);
    const unsigned horizon = static_cast<unsigned>(number_or(cfg, "horizon", 1));
    if (horizon < 1) fail(kExitConfig, "horizon must be >= 1");
    std::string descriptor;
    auto model = make_model(cfg, descriptor);
    const Grid grid = make_grid(cfg, model.get(), beta);
    OutputDir out(cfg);

    rd_finite* raw = nullptr;
    const rd_status st = rd_solve_finite(model.get(), beta, gamma, grid.step, grid.n_nodes,
                                         horizon, &raw);
    if (st != RD_OK) fail_solver("solve-finite", st);
    std::unique_ptr<rd_finite, decltype(&rd_finite_destroy)> fin(raw, &rd_finite_destroy);

    const size_t n = rd_finite_size(fin.get());
    std::vector<std::vector<double>> values(horizon, std::vector<double>(n));
    std::vector<std::vector<double>> actions(horizon, std::vector<double>(n));
    for (unsigned k = 1; k <= horizon; ++k) {
        rd_finite_values(fin.get(), k, values[k - 1].data());
        rd_finite_actions(fin.get(), k, actions[k - 1].data());
    }

    std::ostringstream vs, as;
    vs << "x";
    as << "x";
    for (unsigned k = 1; k <= horizon; ++k) {
        vs << ",J_" << k;
        as << ",a_" << k;
    }
    vs << "\n";
    as << "\n";
    for (size_t i = 0; i < n; ++i) {
        const double x = grid.step * static_cast<double>(i);
        vs << fmt(x);
        as << fmt(x);
        for (unsigned k = 1; k <= horizon; ++k) {
            vs << "," << fmt(values[k - 1][i]);
            // actions come time-indexed; column a_t is the epoch-t rule
            as << "," << fmt(actions[k - 1][i]);
        }
        vs << "\n";
        as << "\n";
    }
    out.write("value.csv", vs.str());
    out.write("policy.csv", as.str());
    return 0;
}

std::string report_txt(const rd_solve_report& rep, const std::string& classification) {
    std::ostringstream os;
    os << "iterations=" << rep.iterations << "\n";
    os << "final_residual=" << fmt(rep.final_residual) << "\n";
    os << "certified_error=" << fmt(rep.certified_error) << "\n";
    os << "xi=" << fmt(rep.xi_estimate) << "\n";
    os << "tail_extension_error=" << fmt(rep.tail_extension_error) << "\n";
    if (!classification.empty()) os << "classification=" << classification << "\n";
    return os.str();
}

int solve_stationary(const json& cfg, bool policy_iter) {
    const double beta = require_number(cfg, "beta");
    const double gamma = number_or(cfg, "gamma", 0.0);
    const double tol = number_or(cfg, "tol", 1e-6);
    std::string descriptor;
    auto model = make_model(cfg, descriptor);
    const Grid grid = make_grid(cfg, model.get(), beta);
    OutputDir out(cfg);

    if (policy_iter && rd_model_has_boundary_density_jump(model.get()))
        std::cerr << "warning: tabulated density jumps at its support boundary; the policy "
                     "improvement uniqueness argument assumes an a.e. continuous density (A3')\n";

    rd_solution* raw = nullptr;
    const rd_status st =
        policy_iter
            ? rd_solve_policy_iteration(model.get(), beta, gamma, grid.step, grid.n_nodes, tol, &raw)
            : rd_solve_infinite(model.get(), beta, gamma, grid.step, grid.n_nodes, tol, &raw);
    if (st != RD_OK) fail_solver(policy_iter ? "policy-iter" : "solve-infinite", st);
    std::unique_ptr<rd_solution, decltype(&rd_solution_destroy)> sol(raw, &rd_solution_destroy);

    const size_t n = rd_solution_size(sol.get());
    std::vector<double> values(n), actions(n);
    rd_solution_values(sol.get(), values.data());
    rd_solution_actions(sol.get(), actions.data());
    rd_solve_report rep;
    rd_solution_report(sol.get(), &rep);

    std::ostringstream vs, as;
    vs << "x,J\n";
    as << "x,a\n";
    for (size_t i = 0; i < n; ++i) {
        const double x = grid.step * static_cast<double>(i);
        vs << fmt(x) << "," << fmt(values[i]) << "\n";
        as << fmt(x) << "," << fmt(actions[i]) << "\n";
    }
    std::string classification;
    const std::string bands = bands_csv(actions.data(), n, grid.step, &classification);

    out.write("value.csv", vs.str());
    out.write("policy.csv", as.str());
    out.write("bands.csv", bands);
    out.write("report.txt", report_txt(rep, classification));

    if (policy_iter) {
        const size_t gaps = rd_solution_gap_count(sol.get());
        std::vector<double> g(gaps);
        rd_solution_gaps(sol.get(), g.data());
        std::ostringstream gs;
        gs << "iter,gap\n";
        for (size_t k = 0; k < gaps; ++k) gs << k + 1 << "," << fmt(g[k]) << "\n";
        out.write("gaps.csv", gs.str());
    }
    return 0;
}

int cmd_barrier_curve(const json& cfg) {
    const double beta = require_number(cfg, "beta");
    const double tol = number_or(cfg, "tol", 1e-6);
    const std::string mode = string_or(cfg, "curve_mode", "three_stage");
    if (mode != "three_stage" && mode != "infinite_horizon")
        fail(kExitConfig, "curve_mode must be three_stage or infinite_horizon");
    std::string descriptor;
    auto model = make_model(cfg, descriptor);
    OutputDir out(cfg);

    std::vector<double> gammas;
    if (cfg.contains("gammas")) {
        if (!cfg["gammas"].is_array()) fail(kExitConfig, "'gammas' must be an array");
        for (const auto& g : cfg["gammas"]) {
            if (!g.is_number()) fail(kExitConfig, "'gammas' entries must be numeric");
            gammas.push_back(g.get<double>());
        }
    } else {
        const double gmax = number_or(cfg, "gamma_max", 10.0);
        const auto count = static_cast<size_t>(number_or(cfg, "gamma_count", 30));
        gammas.push_back(0.0);
        for (size_t i = 0; i < count; ++i) {
            const double t = count == 1 ? 1.0 : double(i) / double(count - 1);
            gammas.push_back(std::exp(std::log(1e-3) + t * (std::log(gmax) - std::log(1e-3))));
        }
    }
    if (gammas.empty()) fail(kExitConfig, "gamma list is empty");
    for (size_t i = 0; i + 1 < gammas.size(); ++i)
        if (!(gammas[i] < gammas[i + 1])) fail(kExitConfig, "gammas must be strictly increasing");

    std::ostringstream cs;
    cs << "# model=" << descriptor << " beta=" << fmt(beta) << " mode=" << mode << "\n";
    cs << "gamma,barrier,note\n";
    for (const double g : gammas) {
        double barrier = std::nan("");
        std::string note;
        rd_status st = RD_OK;
        if (mode == "three_stage") {
            st = rd_three_stage_barrier(model.get(), beta, g, &barrier);
        } else {
            const Grid grid = make_grid(cfg, model.get(), beta);
            rd_solution* raw = nullptr;
            st = rd_solve_infinite(model.get(), beta, g, grid.step, grid.n_nodes, tol, &raw);
            if (st == RD_OK) {
                rd_solve_report rep;
                rd_solution_report(raw, &rep);
                barrier = rep.xi_estimate;
                rd_solution_destroy(raw);
            }
        }
        if (st != RD_OK) {
            barrier = std::nan("");
            note = rd_last_error();
        }
        cs << fmt(g) << "," << (std::isnan(barrier) ? std::string("nan") : fmt(barrier)) << ","
           << note << "\n";
    }
    out.write("curve.csv", cs.str());
    return 0;
}

int cmd_validate(const json& cfg) {
    const double beta = require_number(cfg, "beta");
    const double gamma = number_or(cfg, "gamma", 0.0);
    const auto horizon = static_cast<unsigned>(number_or(cfg, "horizon", 2));
    if (horizon < 1 || horizon > 4) fail(kExitConfig, "validate horizon must be in [1, 4]");
    const auto outer = static_cast<uint64_t>(number_or(cfg, "mc_outer", 100000));
    const auto inner = static_cast<uint64_t>(number_or(cfg, "mc_inner", 1000));
    const auto seed = static_cast<uint64_t>(number_or(cfg, "mc_seed", 1));
    const double pass_sigma = number_or(cfg, "pass_sigma", 4.0);
    if (!(pass_sigma > 0.0)) fail(kExitConfig, "pass_sigma must be positive");
    std::string descriptor;
    auto model = make_model(cfg, descriptor);
    const Grid grid = make_grid(cfg, model.get(), beta);
    OutputDir out(cfg);

    rd_finite* raw = nullptr;
    rd_status st = rd_solve_finite(model.get(), beta, gamma, grid.step, grid.n_nodes, horizon, &raw);
    if (st != RD_OK) fail_solver("validate: finite solve", st);
    std::unique_ptr<rd_finite, decltype(&rd_finite_destroy)> fin(raw, &rd_finite_destroy);

    std::vector<double> xs;
    if (cfg.contains("mc_x")) {
        if (!cfg["mc_x"].is_array()) fail(kExitConfig, "'mc_x' must be an array");
        for (const auto& x : cfg["mc_x"]) {
            if (!x.is_number() || x.get<double>() < 0.0)
                fail(kExitConfig, "'mc_x' entries must be nonnegative numbers");
            xs.push_back(x.get<double>());
        }
    } else {
        double xi_s;
        rd_xi_star(model.get(), beta, &xi_s);
        xs = {0.0, xi_s / 2.0, xi_s};
    }

    bool all_pass = true;
    std::ostringstream os;
    os << "x,solver_value,mc_estimate,stderr_proxy,pass\n";
    for (const double x : xs) {
        double est = 0.0, se = 0.0;
        st = rd_nested_mc(fin.get(), model.get(), beta, gamma, x, outer, inner, seed, &est, &se);
        if (st != RD_OK) fail_solver("validate: nested mc", st);
        double truth = 0.0;
        rd_finite_value_at(fin.get(), horizon, x, &truth);
        const bool pass = std::abs(est - truth) <= pass_sigma * se;
        all_pass = all_pass && pass;
        os << fmt(x) << "," << fmt(truth) << "," << fmt(est) << "," << fmt(se) << ","
           << (pass ? "pass" : "fail") << "\n";
    }
    out.write("validate.csv", os.str());
    if (!all_pass) {
        std::cerr << "validate: a Monte-Carlo check failed at " << pass_sigma << " sigma\n";
        return kExitValidation;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"riskdiv — dividend payout solver under entropic preferences"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    for (const char* name : {"solve-finite", "solve-infinite", "policy-iter", "barrier-curve",
                             "validate"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("config", config_path, "path to a JSON config file")->required();
        sub->add_option("overrides", overrides, "key=value overrides applied onto the config");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const json cfg = load_config(config_path, overrides);
        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "solve-finite") return cmd_solve_finite(cfg);
        if (cmd == "solve-infinite") return solve_stationary(cfg, false);
        if (cmd == "policy-iter") return solve_stationary(cfg, true);
        if (cmd == "barrier-curve") return cmd_barrier_curve(cfg);
        if (cmd == "validate") return cmd_validate(cfg);
        std::cerr << "unknown subcommand\n";
        return kExitConfig;
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
}
