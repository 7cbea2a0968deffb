#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "ccpxva/netgen.hpp"
#include "ccpxva/network.hpp"
#include "ccpxva/porting.hpp"
#include "ccpxva/reports.hpp"
#include "ccpxva/stress.hpp"
#include "ccpxva/xva.hpp"

namespace {

struct RunOptions {
    std::string network_file;
    std::string mode = "xva";
    std::int64_t n_paths = 1'000'000;
    int n_batches = 50;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    double quantile = 0.999;
    double rst_multiplier = 1.5;
    std::vector<int> defaulted;
    std::string sweep;  // param=lo:hi:step
    int threads = 0;
    int top_k = 20;
};

struct SweepGrid {
    std::string param;
    std::vector<double> values;
};

SweepGrid parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--sweep", "expected param=lo:hi:step");
    SweepGrid g;
    g.param = text.substr(0, eq);
    if (g.param != "rho_cr" && g.param != "rho_mkt" && g.param != "rho_wwr")
        throw CLI::ValidationError("--sweep", "param must be rho_cr, rho_mkt or rho_wwr");
    double lo = 0, hi = 0, step = 0;
    if (std::sscanf(text.c_str() + eq + 1, "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
        throw CLI::ValidationError("--sweep", "expected param=lo:hi:step with step > 0");
    for (double v = lo; v <= hi + 1e-12; v += step) g.values.push_back(v);
    return g;
}

ccpxva::SimConfig sim_config(const RunOptions& opt) {
    ccpxva::SimConfig cfg;
    cfg.n_paths = opt.n_paths;
    cfg.n_batches = opt.n_batches;
    cfg.seed = opt.seed;
    cfg.threads = opt.threads;
    return cfg;
}

std::string join_path(const std::string& dir, const char* name) {
    return (std::filesystem::path(dir) / name).string();
}

int run_xva(const ccpxva::ClearingNetwork& net, const RunOptions& opt) {
    auto cfg = sim_config(opt);
    cfg.keep_losses = false;
    const auto result = ccpxva::run_engine(net, cfg);
    ccpxva::write_xva_csv(join_path(opt.out_dir, "xva.csv"), result.breakdowns);
    return 0;
}

int run_stress(const ccpxva::ClearingNetwork& net, const RunOptions& opt) {
    auto cfg = sim_config(opt);
    cfg.keep_losses = true;
    const auto result = ccpxva::run_engine(net, cfg);
    std::vector<ccpxva::StressRow> rows;
    for (std::size_t o = 0; o < net.members.size(); ++o) {
        const auto& sample = result.losses[o];
        std::vector<double> losses(sample.losses.begin(), sample.losses.end());
        ccpxva::StressRow row;
        row.quantile = ccpxva::extreme_quantile(std::move(losses), opt.quantile);
        row.quantile.member_id = net.members[o].id;
        row.rst_threshold = opt.rst_multiplier * row.quantile.q;
        row.rst = ccpxva::rst_probability(sample, row.rst_threshold);
        rows.push_back(row);
    }
    ccpxva::write_stress_csv(join_path(opt.out_dir, "stress.csv"), rows);
    return 0;
}

int run_rst(const ccpxva::ClearingNetwork& net, const RunOptions& opt) {
    if (opt.defaulted.size() != 1) {
        std::cerr << "mode rst needs exactly one reference member via --default\n";
        return 2;
    }
    const int member_id = opt.defaulted[0];
    auto cfg = sim_config(opt);
    cfg.keep_losses = true;
    cfg.scenario_member_id = member_id;
    cfg.scenario_top_k = opt.top_k;
    const auto result = ccpxva::run_engine(net, cfg);
    const int o = net.member_index(member_id);
    const auto scenarios = ccpxva::ec_scenario_contributions(
        result.losses[o], result.worst, net.config.ec_quantile, opt.top_k);
    ccpxva::write_scenarios_json(join_path(opt.out_dir, "scenarios.json"), member_id,
                                 scenarios);
    return 0;
}

int run_porting(const ccpxva::ClearingNetwork& net, const RunOptions& opt) {
    if (opt.defaulted.empty()) {
        std::cerr << "mode porting needs --default <id>...\n";
        return 2;
    }
    auto cfg = sim_config(opt);
    cfg.keep_losses = false;
    const std::set<int> defaulted(opt.defaulted.begin(), opt.defaulted.end());
    const auto quotes = ccpxva::optimize_porting(net, defaulted, cfg);
    ccpxva::write_porting_csv(join_path(opt.out_dir, "porting.csv"), quotes);
    return 0;
}

int run_sensitivity(const ccpxva::ClearingNetwork& net, const RunOptions& opt) {
    if (opt.sweep.empty()) {
        std::cerr << "mode sensitivity needs --sweep param=lo:hi:step\n";
        return 2;
    }
    const SweepGrid grid = parse_sweep(opt.sweep);
    std::vector<ccpxva::SensitivityRow> rows;
    for (double v : grid.values) {
        auto cfg = sim_config(opt);
        cfg.keep_losses = false;
        if (grid.param == "rho_cr") cfg.copula.rho_cr = v;
        if (grid.param == "rho_mkt") cfg.copula.rho_mkt = v;
        if (grid.param == "rho_wwr") cfg.copula.rho_wwr = {v};
        if (ccpxva::check_admissibility(cfg.copula, net.members.size())) continue;
        const auto result = ccpxva::run_engine(net, cfg);
        ccpxva::SensitivityRow row;
        row.param = grid.param;
        row.value = v;
        for (const auto& bd : result.breakdowns) {
            row.total_ccva += bd.ccva;
            row.total_ec += bd.ec;
            row.total_kva += bd.kva;
        }
        rows.push_back(row);
    }
    ccpxva::write_sensitivity_csv(join_path(opt.out_dir, "sensitivity.csv"), rows);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte-Carlo XVA engine for multi-CCP clearing networks"};
    app.require_subcommand(0, 1);

    RunOptions opt;
    app.add_option("--network", opt.network_file, "network JSON file");
    app.add_option("--mode", opt.mode, "xva | stress | rst | porting | sensitivity")
        ->check(CLI::IsMember({"xva", "stress", "rst", "porting", "sensitivity"}));
    app.add_option("--paths", opt.n_paths, "Monte-Carlo paths");
    app.add_option("--batches", opt.n_batches, "number of batches");
    app.add_option("--seed", opt.seed, "RNG seed");
    app.add_option("--out", opt.out_dir, "output directory");
    app.add_option("--quantile", opt.quantile, "stress quantile level");
    app.add_option("--rst-multiplier", opt.rst_multiplier, "reverse-stress threshold multiplier");
    app.add_option("--default", opt.defaulted, "defaulted / reference member ids");
    app.add_option("--sweep", opt.sweep, "sensitivity grid, param=lo:hi:step");
    app.add_option("--threads", opt.threads, "worker threads (0 = auto)");
    app.add_option("--top-k", opt.top_k, "worst scenarios to report in rst mode");

    auto* gen = app.add_subcommand("gen2ccp", "generate a two-CCP network from disclosures");
    ccpxva::TwoCcpSpec spec;
    std::string gen_out = "two_ccp.json";
    gen->add_option("--members1", spec.n_members_ccp1, "members on CCP 1");
    gen->add_option("--members2", spec.n_members_ccp2, "members on CCP 2");
    gen->add_option("--common", spec.n_common, "common members");
    gen->add_option("--df1", spec.total_df_ccp1, "CCP 1 total default fund");
    gen->add_option("--df2", spec.total_df_ccp2, "CCP 2 total default fund");
    gen->add_option("--share1", spec.top5_share_ccp1, "CCP 1 top-5 DF share");
    gen->add_option("--share2", spec.top5_share_ccp2, "CCP 2 top-5 DF share");
    gen->add_option("--out-file", gen_out, "output JSON path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const auto net = ccpxva::build_two_ccp_network(spec);
            const auto violations = ccpxva::validate_network(net);
            if (!violations.empty()) {
                for (const auto& v : violations) std::cerr << v.what << '\n';
                return 1;
            }
            ccpxva::save_network(net, gen_out);
            std::cout << "wrote " << gen_out << '\n';
            return 0;
        }

        if (opt.network_file.empty()) {
            std::cerr << "--network is required\n";
            return 2;
        }
        if (opt.n_paths <= 0 || opt.n_batches <= 0 || opt.n_paths % opt.n_batches != 0) {
            std::cerr << "n_paths must be positive and divisible by n_batches\n";
            return 2;
        }

        const auto net = ccpxva::load_network(opt.network_file);
        const auto violations = ccpxva::validate_network(net);
        if (!violations.empty()) {
            for (const auto& v : violations) std::cerr << v.what << '\n';
            return 1;
        }
        std::filesystem::create_directories(opt.out_dir);

        if (opt.mode == "xva") return run_xva(net, opt);
        if (opt.mode == "stress") return run_stress(net, opt);
        if (opt.mode == "rst") return run_rst(net, opt);
        if (opt.mode == "porting") return run_porting(net, opt);
        if (opt.mode == "sensitivity") return run_sensitivity(net, opt);
        std::cerr << "unknown mode " << opt.mode << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
