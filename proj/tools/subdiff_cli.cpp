// subdiff command line: price options under inverse-subordinator clocks,
// reproduce the experiment sweeps, and run the analytic relation checks.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "subdiff/experiment.hpp"
#include "subdiff/fractional_pde.hpp"
#include "subdiff/sub_pricing.hpp"
#include "subdiff/subordinator.hpp"

namespace {

using namespace subdiff;

struct CommonOpts {
    std::string family = "stable";
    double alpha = 0.7;
    double lambda = 0.0;
    MarketParams market{2.0, 2.0, 0.04, 1.0, 2.0, 2.0};
    std::int64_t samples = 3000;
    int steps = 100;
    std::uint64_t seed = 20240915;
    double delta = 0.0;
    double step_target = 0.0;  // 0: keep the preset / library default
    int path_grid = 1000;
    std::string out;
    std::string format = "json";
};

SubordinatorFamily parse_family(const std::string& name) {
    if (name == "stable" || name == "alpha-stable") return SubordinatorFamily::AlphaStable;
    if (name == "tempered" || name == "tempered-stable") {
        return SubordinatorFamily::TemperedStable;
    }
    if (name == "identity") return SubordinatorFamily::Identity;
    throw CLI::ValidationError("--family", "expected stable|tempered|identity");
}

void add_market_flags(CLI::App* cmd, MarketParams& mp) {
    cmd->add_option("--z0", mp.z0, "Spot price Z0");
    cmd->add_option("--strike", mp.strike, "Strike K");
    cmd->add_option("--rate", mp.rate, "Risk-free rate r");
    cmd->add_option("--sigma", mp.sigma, "Lognormal volatility");
    cmd->add_option("--sigma-ba", mp.sigma_ba, "Arithmetic (Bachelier) volatility");
    cmd->add_option("--horizon,-T", mp.horizon, "Expiry T");
}

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--family", o.family, "Clock family: stable|tempered|identity");
    cmd->add_option("--alpha", o.alpha, "Stability index in (0,1]");
    cmd->add_option("--lambda", o.lambda, "Tempering parameter (tempered family)");
    add_market_flags(cmd, o.market);
    cmd->add_option("--samples", o.samples, "Monte Carlo sample count M");
    cmd->add_option("--steps", o.steps, "Binomial tree steps n");
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--delta", o.delta, "Inverse-clock staircase step (0 = auto)");
    cmd->add_option("--step-target", o.step_target,
                    "Auto staircase step: target increments per draw");
    cmd->add_option("--path-grid", o.path_grid, "Time grid points for path simulation");
    cmd->add_option("--out", o.out, "Output file (or file stem)");
    cmd->add_option("--format", o.format, "Output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--config", "Flat key=value config file; flags override")
        ->expected(1);
}

// Replaces "--config FILE" by the file's key=value pairs as option tokens,
// inserted ahead of the explicit flags so those win. Keys already present
// on the command line are skipped.
std::vector<std::string> expand_config_tokens(std::vector<std::string> args) {
    std::string file;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            file = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            file = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (file.empty()) return args;

    std::set<std::string> explicit_flags;
    for (const auto& token : args) {
        if (token.rfind("--", 0) == 0) {
            explicit_flags.insert(token.substr(0, token.find('=')));
        }
    }

    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read config file " + file);
    std::vector<std::string> injected;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line without '=': " + line);
        }
        const std::string key = "--" + line.substr(0, eq);
        if (key == "--config" || explicit_flags.count(key) > 0) continue;
        injected.push_back(key);
        injected.push_back(line.substr(eq + 1));
    }

    // insert right after the subcommand name
    std::size_t at = 0;
    while (at < args.size() && args[at].rfind("-", 0) == 0) ++at;
    if (at < args.size()) ++at;
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), injected.begin(),
                injected.end());
    return args;
}

void add_pde_flags(CLI::App* cmd, PdeGrid& grid, std::string& coordinate) {
    cmd->add_option("--xmin", grid.x_min, "Lower grid bound");
    cmd->add_option("--xmax", grid.x_max, "Upper grid bound");
    cmd->add_option("--space-nodes", grid.space_nodes, "Space nodes m");
    cmd->add_option("--time-nodes", grid.time_nodes, "Time nodes N");
    cmd->add_option("--theta", grid.theta, "Scheme weight: 0 implicit, 1 explicit");
    cmd->add_option("--coordinate", coordinate, "Grid coordinate: log|price")
        ->check(CLI::IsMember({"log", "price"}));
}

void emit_record(const ResultRecord& record, const std::string& format,
                 const std::string& out) {
    std::string text;
    if (format == "csv") {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%.17g,%s,%.17g,%.17g,%.17g", record.alpha,
                      record.method.c_str(), record.estimate.value,
                      record.estimate.std_error, record.estimate.elapsed_ms);
        text = std::string("alpha,method,value,std_error,elapsed_ms\n") + buf + "\n";
    } else {
        text = to_json(record) + "\n";
    }
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream file(out);
        if (!file) throw std::runtime_error("cannot open " + out + " for writing");
        file << text;
    }
}

int run_price(const CommonOpts& o, const std::string& option, const std::string& method) {
    const auto spec = LaplaceExponentSpec::make(parse_family(o.family), o.alpha, o.lambda);
    MCConfig mc{o.samples, o.seed, o.delta, false};
    if (mc.delta == 0.0 && o.step_target > 0.0 &&
        spec.family() != SubordinatorFamily::Identity) {
        mc.delta = default_inverse_step(spec, o.market.horizon, o.step_target);
    }
    const TreeConfig tree{o.steps};
    const MarketParams& mp = o.market;

    ResultRecord record;
    record.alpha = spec.family() == SubordinatorFamily::Identity ? 1.0 : spec.alpha();
    record.lambda = spec.lambda();
    record.params = mp;

    if (method == "mc" || method == "mc-closed-form" || method == "MC-closed-form") {
        record.method = "MC-closed-form";
        if (option == "euro-call") {
            const auto hs = draw_horizons(spec, mp.horizon, mc);
            record.estimate =
                price_subordinated(hs, [&](double t) { return bs_call(mp, t); });
        } else if (option == "euro-put") {
            const auto hs = draw_horizons(spec, mp.horizon, mc);
            record.estimate =
                price_subordinated(hs, [&](double t) { return bs_put(mp, t); });
        } else if (option == "lookback") {
            record.estimate = price_lookback_subordinated_closed(spec, mp, mc);
        } else {
            throw std::invalid_argument("method mc does not price option '" + option + "'");
        }
    } else if (method == "crr" || method == "mc-crr" || method == "MC-CRR") {
        record.method = "MC-CRR";
        record.extras.push_back({"tree_steps", static_cast<double>(tree.steps)});
        OptionSpec opt = OptionSpec::euro_call();
        if (option == "euro-put") opt = OptionSpec::euro_put();
        else if (option == "american-put") opt = OptionSpec::american_put();
        else if (option == "lookback") opt = OptionSpec::lookback_float_call();
        else if (option != "euro-call") {
            throw std::invalid_argument("unknown option '" + option + "'");
        }
        record.estimate = price_subordinated_crr(spec, mp, opt, tree, mc);
    } else if (method == "pde" || method == "fd-pde" || method == "FD-PDE") {
        record.method = "FD-PDE";
        if (option != "euro-call") {
            throw std::invalid_argument("method pde prices the European call only");
        }
        const PdeGrid grid;  // published defaults
        const auto sol = solve_frac_bs_call(mp, FractionalOrder{record.alpha}, grid);
        record.estimate.value = sol.value_at_expiry(mp.z0);
        record.estimate.samples = 0;
    } else if (method == "path-mc" || method == "pathmc" || method == "PathMC") {
        record.method = "PathMC";
        if (option != "lookback") {
            throw std::invalid_argument("method path-mc prices the lookback call only");
        }
        record.extras.push_back({"path_grid_size", static_cast<double>(o.path_grid)});
        record.estimate = price_lookback_path_mc(spec, mp, o.path_grid, mc);
    } else {
        throw std::invalid_argument("unknown method '" + method + "'");
    }

    emit_record(record, o.format, o.out);
    return 0;
}

ExperimentConfig build_sweep_config(const CommonOpts& o, const std::string& preset_name,
                                    const std::string& kind,
                                    const std::vector<double>& alphas,
                                    const std::vector<std::string>& methods,
                                    bool samples_set, bool market_set) {
    ExperimentConfig cfg;
    if (!preset_name.empty()) {
        cfg = preset(preset_name);
        if (samples_set) cfg.mc.samples = o.samples;
        if (market_set) cfg.market = o.market;
    } else {
        cfg.kind = parse_experiment_kind(kind);
        cfg.market = o.market;
        cfg.mc.samples = o.samples;
        cfg.tree.steps = o.steps;
        cfg.output_path = "sweep";
    }
    cfg.family = parse_family(o.family);
    cfg.lambda = o.lambda;
    cfg.mc.seed = o.seed;
    cfg.mc.delta = o.delta;
    if (o.step_target > 0.0) cfg.step_target = o.step_target;
    cfg.path_grid_size = o.path_grid;
    if (!alphas.empty()) cfg.alpha_grid = alphas;
    if (!methods.empty()) {
        cfg.methods.clear();
        for (const auto& name : methods) cfg.methods.push_back(parse_method(name));
    }
    if (!o.out.empty()) cfg.output_path = o.out;
    return cfg;
}

int run_sweep(const ExperimentConfig& cfg, const std::string& format) {
    const auto result = run_experiment(cfg);
    if (format == "csv") {
        std::cout << "alpha,method,value,std_error,elapsed_ms\n";
        for (const auto& row : result.rows) {
            std::printf("%.17g,%s,%.17g,%.17g,%.17g\n", row.alpha, row.method.c_str(),
                        row.value, row.std_error, row.elapsed_ms);
        }
    } else {
        std::cout << "[\n";
        for (std::size_t i = 0; i < result.records.size(); ++i) {
            std::cout << "  " << to_json(result.records[i])
                      << (i + 1 < result.records.size() ? "," : "") << "\n";
        }
        std::cout << "]\n";
    }
    std::cerr << "wrote " << cfg.output_path << ".csv and " << cfg.output_path
              << ".json\n";
    for (const auto& err : result.errors) std::cerr << "cell error: " << err << "\n";
    return result.ok() ? 0 : 1;
}

int run_check(const ExperimentConfig& cfg, const std::string& checks) {
    bool parity = false;
    bool gap_bound = false;
    if (checks == "auto") {
        parity = true;
        const auto& mp = cfg.market;
        gap_bound = mp.rate == 0.0 && mp.z0 == mp.strike &&
                   std::abs(mp.sigma_ba - mp.sigma * mp.z0) <= 1e-12 * mp.z0;
    } else {
        parity = checks.find("parity") != std::string::npos;
        gap_bound = checks.find("gap-bound") != std::string::npos;
        if (!parity && !gap_bound) {
            throw std::invalid_argument("--checks expects parity,gap-bound or auto");
        }
    }

    const auto report = check_relations(cfg, parity, gap_bound);
    std::printf("%-10s %-8s %-24s %-24s %-12s %s\n", "check", "alpha", "value", "bound",
                "std_error", "status");
    for (const auto& row : report.rows) {
        std::printf("%-10s %-8.4g %-24.12g %-24.12g %-12.4g %s%s%s\n", row.check.c_str(),
                    row.alpha, row.value, row.bound, row.std_error,
                    row.pass ? "PASS" : "FAIL", row.note.empty() ? "" : "  ",
                    row.note.c_str());
    }
    return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"subordinated option pricing toolkit", "subdiff"};
    app.require_subcommand(1);
    // a config value followed by the same explicit flag keeps the flag
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    // price
    CommonOpts price_opts;
    std::string price_option = "euro-call";
    std::string price_method = "mc";
    auto* price_cmd = app.add_subcommand("price", "Price a single option");
    add_common_flags(price_cmd, price_opts);
    price_cmd->add_option("--option", price_option,
                          "euro-call|euro-put|american-put|lookback");
    price_cmd->add_option("--method", price_method, "mc|crr|pde|path-mc");

    // simulate
    CommonOpts sim_opts;
    sim_opts.family = "tempered";
    sim_opts.lambda = 1.0;
    sim_opts.market = MarketParams{1.0, 1.0, 0.0, 1.0, 1.0, 1.0};
    double sim_mu = 1.0;
    int sim_grid = 1000;
    int sim_count = 1;
    auto* sim_cmd = app.add_subcommand(
        "simulate", "Emit inverse-clock and subordinated price trajectories");
    add_common_flags(sim_cmd, sim_opts);
    sim_cmd->add_option("--mu", sim_mu, "Drift of the parent price process");
    sim_cmd->add_option("--grid", sim_grid, "Grid points on [0, T]");
    sim_cmd->add_option("--count", sim_count, "Number of trajectories");

    // sweep
    CommonOpts sweep_opts;
    std::string sweep_preset;
    std::string sweep_kind = "euro-call-sweep";
    std::vector<double> sweep_alphas;
    std::vector<std::string> sweep_methods;
    auto* sweep_cmd =
        app.add_subcommand("sweep", "Run an (alpha x method) experiment grid");
    add_common_flags(sweep_cmd, sweep_opts);
    auto* sweep_samples_opt = sweep_cmd->get_option("--samples");
    auto* sweep_z0_opt = sweep_cmd->get_option("--z0");
    sweep_cmd->add_option("--preset", sweep_preset, "fig2|fig3|fig4");
    sweep_cmd->add_option("--kind", sweep_kind,
                          "euro-call-sweep|american-put-sweep|lookback-sweep|custom");
    sweep_cmd->add_option("--alphas", sweep_alphas, "Alpha grid entries")
        ->delimiter(',');
    sweep_cmd->add_option("--methods", sweep_methods, "Methods to run")->delimiter(',');

    // check
    CommonOpts check_opts;
    std::string check_preset;
    std::vector<double> check_alphas;
    std::string checks = "auto";
    auto* check_cmd =
        app.add_subcommand("check", "Verify parity and the price-gap bound");
    add_common_flags(check_cmd, check_opts);
    check_cmd->add_option("--preset", check_preset, "fig2|fig3|fig4");
    check_cmd->add_option("--alphas", check_alphas, "Alpha grid entries")->delimiter(',');
    check_cmd->add_option("--checks", checks, "parity,gap-bound or auto");

    // pde
    CommonOpts pde_opts;
    std::string pde_equation = "bs";
    std::string pde_coordinate = "log";
    PdeGrid pde_grid;
    auto* pde_cmd =
        app.add_subcommand("pde", "Solve a fractional pricing equation, export t,z,value");
    add_common_flags(pde_cmd, pde_opts);
    pde_cmd->add_option("--equation", pde_equation, "bs|bachelier")
        ->check(CLI::IsMember({"bs", "bachelier"}));
    add_pde_flags(pde_cmd, pde_grid, pde_coordinate);

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config_tokens(args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (price_cmd->parsed()) {
            return run_price(price_opts, price_option, price_method);
        }
        if (sim_cmd->parsed()) {
            const auto spec = LaplaceExponentSpec::make(parse_family(sim_opts.family),
                                                        sim_opts.alpha, sim_opts.lambda);
            const std::string stem = sim_opts.out.empty() ? "paths" : sim_opts.out;
            const auto files = simulate_paths(
                spec, sim_opts.market.horizon, sim_grid, sim_count, sim_opts.seed,
                sim_opts.market.z0, sim_mu, sim_opts.market.sigma, stem);
            for (const auto& f : files.subordinator_files) std::cout << f << "\n";
            for (const auto& f : files.trajectory_files) std::cout << f << "\n";
            return 0;
        }
        if (sweep_cmd->parsed()) {
            const auto cfg = build_sweep_config(
                sweep_opts, sweep_preset, sweep_kind, sweep_alphas, sweep_methods,
                sweep_samples_opt->count() > 0, sweep_z0_opt->count() > 0);
            return run_sweep(cfg, sweep_opts.format);
        }
        if (check_cmd->parsed()) {
            ExperimentConfig cfg;
            if (!check_preset.empty()) {
                cfg = preset(check_preset);
            } else {
                cfg = preset("fig2");
                cfg.market = check_opts.market;
            }
            cfg.family = parse_family(check_opts.family);
            cfg.lambda = check_opts.lambda;
            cfg.mc.samples = check_opts.samples;
            cfg.mc.seed = check_opts.seed;
            cfg.mc.delta = check_opts.delta;
            if (!check_alphas.empty()) cfg.alpha_grid = check_alphas;
            return run_check(cfg, checks);
        }
        if (pde_cmd->parsed()) {
            pde_grid.coordinate = pde_coordinate == "price" ? PdeCoordinate::Price
                                                            : PdeCoordinate::LogPrice;
            FractionalOrder order{pde_opts.alpha};
            const auto sol =
                pde_equation == "bachelier"
                    ? solve_frac_bachelier_call(pde_opts.market, order, pde_grid)
                    : solve_frac_bs_call(pde_opts.market, order, pde_grid);
            const std::string out = pde_opts.out.empty() ? "pde.csv" : pde_opts.out;
            write_pde_csv(sol, out);
            std::printf("value at (z0=%.17g, T=%.17g): %.17g\n", pde_opts.market.z0,
                        pde_opts.market.horizon, sol.value_at_expiry(pde_opts.market.z0));
            std::cerr << "wrote " << out << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
