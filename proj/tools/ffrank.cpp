// Command line front end: analytic predictions (phi, rho, rate, curve),
// instance sampling and measurement (sample, rank, core), the reference
// verification battery, and config-driven experiments.
//
// Exit codes: 0 pass, 2 tolerance/assertion failure, 3 config error,
// 4 sampling budget exhausted.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ffrank/analytic.hpp"
#include "ffrank/coreops.hpp"
#include "ffrank/harness.hpp"
#include "ffrank/linalg.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitTolerance = 2;
constexpr int kExitConfig = 3;
constexpr int kExitBudget = 4;

ffrank::EnsembleSpec ensemble_from(const std::string& spec, std::size_t n = 0) {
    ffrank::EnsembleSpec ens = ffrank::parse_ensemble(spec);
    if (n != 0) ens.n = n;
    return ens;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rank, rate and 2-core predictions for sparse random matrices over GF(q)"};
    app.require_subcommand(1);

    std::string ens_spec, out_path, dump_path, instance_path, config_path;
    double alpha = 0.0;
    std::size_t n = 0, points = 1001;
    std::uint64_t seed = 0;
    bool analytic_only = false;

    auto* cmd_phi = app.add_subcommand("phi", "evaluate the rank functional at alpha");
    cmd_phi->add_option("--ens", ens_spec, "ensemble spec, e.g. q=2;d=point:3;k=point:3")
        ->required();
    cmd_phi->add_option("--alpha", alpha, "evaluation point in [0,1]")->required();

    auto* cmd_rho = app.add_subcommand("rho", "largest stationary point of the rank functional");
    cmd_rho->add_option("--ens", ens_spec)->required();

    auto* cmd_rate = app.add_subcommand("rate", "asymptotic rate (max of the rank functional)");
    cmd_rate->add_option("--ens", ens_spec)->required();

    auto* cmd_core = app.add_subcommand("core", "sample one instance, peel and bound");
    cmd_core->add_option("--ens", ens_spec)->required();
    cmd_core->add_option("--n", n, "number of variables")->required();
    cmd_core->add_option("--seed", seed, "instance seed");

    auto* cmd_sample = app.add_subcommand("sample", "sample one instance and dump it as JSON");
    cmd_sample->add_option("--ens", ens_spec)->required();
    cmd_sample->add_option("--n", n)->required();
    cmd_sample->add_option("--seed", seed);
    cmd_sample->add_option("--dump", dump_path, "output path")->required();

    auto* cmd_rank = app.add_subcommand("rank", "rank of a dumped instance");
    cmd_rank->add_option("--instance", instance_path, "instance JSON path")->required();

    auto* cmd_curve = app.add_subcommand("curve", "emit alpha,phi,phi_small CSV");
    cmd_curve->add_option("--ens", ens_spec)->required();
    cmd_curve->add_option("--points", points, "grid points (default 1001)");
    cmd_curve->add_option("--out", out_path, "output CSV path")->required();

    auto* cmd_verify = app.add_subcommand("verify", "run the reference assertion battery");
    cmd_verify->add_flag("--analytic-only", analytic_only, "skip sampled checks");

    auto* cmd_exp = app.add_subcommand("experiment", "run a config-driven experiment");
    cmd_exp->add_option("--config", config_path, "JSON config path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_phi->parsed()) {
            std::printf("%.12g\n", ffrank::phi(ensemble_from(ens_spec), alpha));
        } else if (cmd_rho->parsed()) {
            std::printf("%.12g\n", ffrank::rho(ensemble_from(ens_spec)));
        } else if (cmd_rate->parsed()) {
            std::printf("%.12g\n", ffrank::ldpc_rate(ensemble_from(ens_spec)));
        } else if (cmd_core->parsed()) {
            const auto ens = ensemble_from(ens_spec, n);
            const auto inst = ffrank::sample_instance(ens, {seed});
            const auto core = ffrank::peel(inst.graph);
            const auto bound = ffrank::core_rank_bound(inst.graph, inst.matrix);
            nlohmann::json j;
            j["n"] = inst.graph.n_vars;
            j["m"] = inst.matrix.rows();
            j["n_star"] = core.n_star;
            j["m_star"] = core.m_star;
            j["bound"] = bound.bound;
            j["nullity"] = bound.nullity;
            j["tight"] = bound.tight;
            std::cout << j.dump() << '\n';
        } else if (cmd_sample->parsed()) {
            const auto ens = ensemble_from(ens_spec, n);
            const auto inst = ffrank::sample_instance(ens, {seed});
            std::ofstream out(dump_path);
            if (!out) throw ffrank::ConfigError("cannot write '" + dump_path + "'");
            ffrank::dump_instance(inst, out);
            out << '\n';
        } else if (cmd_rank->parsed()) {
            const auto inst = ffrank::load_instance_file(instance_path);
            std::printf("%zu\n", ffrank::rank(inst.matrix));
        } else if (cmd_curve->parsed()) {
            ffrank::emit_curve_file(ensemble_from(ens_spec), points, out_path);
        } else if (cmd_verify->parsed()) {
            const auto checks = ffrank::verify_reference_cases(!analytic_only);
            bool all = true;
            for (const auto& c : checks) {
                std::printf("[%s] %s%s%s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                            c.detail.empty() ? "" : ": ", c.detail.c_str());
                all = all && c.pass;
            }
            return all ? kExitPass : kExitTolerance;
        } else if (cmd_exp->parsed()) {
            const auto cfg = ffrank::ExperimentConfig::from_json_file(config_path);
            const auto summary = ffrank::run_experiment(cfg);
            std::cout << ffrank::summary_to_json(cfg, summary) << '\n';
            if (summary.budget_exhausted) return kExitBudget;
            if (!summary.pass) return kExitTolerance;
        }
    } catch (const ffrank::RejectionBudgetExhausted& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBudget;
    } catch (const ffrank::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ffrank::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitPass;
}
