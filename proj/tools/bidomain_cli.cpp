// Command-line driver: scenario simulation, Monte Carlo ensembles, and the
// estimate-verification suites. Every artifact carries a provenance sidecar
// (or embeds the config for JSON reports); exit status is 0 only when all
// gates of the requested suite pass.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bidomain/config.hpp"
#include "bidomain/io.hpp"
#include "bidomain/verify.hpp"

using namespace bidomain;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int paths = 0;
    bool quiet = false;
};

ScenarioConfig load(const CommonOpts& o) {
    ScenarioConfig cfg = o.config_path.empty() ? default_config() : load_config_file(o.config_path);
    if (o.seed_set) cfg.ensemble.master_seed = o.seed;
    if (o.paths > 0) cfg.ensemble.paths = o.paths;
    if (!o.out_dir.empty()) cfg.output.dir = o.out_dir;
    std::filesystem::create_directories(cfg.output.dir);
    return cfg;
}

void say(const CommonOpts& o, const std::string& line) {
    if (!o.quiet) std::cout << line << "\n";
}

json gates_json(const std::vector<GateResult>& gates) {
    json out = json::array();
    for (const auto& g : gates)
        out.push_back({{"name", g.name}, {"value", g.value}, {"threshold", g.threshold},
                       {"pass", g.pass}});
    return out;
}

void write_report(const ScenarioConfig& cfg, const std::string& path, json body) {
    body["master_seed"] = cfg.ensemble.master_seed;
    body["config"] = json::parse(serialize_config(cfg));
    std::ofstream out(path);
    out << body.dump(2) << "\n";
}

// labelled rows, numeric payloads; first column may be text
void write_table(const ScenarioConfig& cfg, const std::string& path,
                 const std::vector<std::string>& header,
                 const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
    std::ofstream out(path);
    for (size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "");
    out << "\r\n";
    char buf[64];
    for (const auto& [label, vals] : rows) {
        out << label;
        for (double v : vals) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out << buf;
        }
        out << "\r\n";
    }
    write_meta_sidecar(path, serialize_config(cfg), cfg.ensemble.master_seed);
}

int finish(const CommonOpts& o, const ScenarioConfig& cfg, const std::string& name,
           const std::vector<GateResult>& gates, json body) {
    body["gates"] = gates_json(gates);
    const std::string path = cfg.output.dir + "/" + name + ".json";
    write_report(cfg, path, body);
    const bool ok = all_pass(gates);
    say(o, name + (ok ? ": all gates passed" : ": GATE FAILURE") + " -> " + path);
    return ok ? 0 : 1;
}

std::vector<std::pair<std::string, std::vector<double>>> ladder_rows(
    const UniformityReport& rep) {
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    for (const auto& row : rep.rows)
        for (const auto& [key, mean] : row.mean)
            rows.push_back({key, {static_cast<double>(row.n), row.epsilon, mean,
                                  row.std_error.at(key)}});
    return rows;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral stochastic bidomain simulator and verification harness"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOpts opts;
    app.add_option("--config", opts.config_path, "JSON scenario config (defaults when omitted)");
    app.add_option("--out", opts.out_dir, "output directory override");
    auto* seed_opt = app.add_option("--seed", opts.seed, "master seed override");
    app.add_option("--paths", opts.paths, "ensemble path count override");
    app.add_flag("--quiet", opts.quiet, "suppress progress lines");

    bool dump_incr = false, dump_coeffs = false, dump_matrices = false;
    std::string replay_path;
    auto* sim = app.add_subcommand("simulate", "run one path, write the trajectory CSV");
    sim->add_flag("--dump-increments", dump_incr, "also write the Wiener increments (binary)");
    sim->add_flag("--dump-coefficients", dump_coeffs, "also write the full coefficient series");
    sim->add_flag("--dump-matrices", dump_matrices, "also write K_i, K_e and the mass matrix");
    sim->add_option("--increments", replay_path, "replay a dumped increment file");
    auto* ens = app.add_subcommand("ensemble", "run a Monte Carlo ensemble, write stats + manifest");
    auto* v_energy = app.add_subcommand("verify-energy", "n-uniform energy estimates + linear oracle");
    auto* v_moments = app.add_subcommand("verify-moments", "n-uniform high-order moment estimates");
    auto* v_transl = app.add_subcommand("verify-translation", "temporal translation slopes");
    auto* v_stab = app.add_subcommand("verify-stability", "pathwise stability under common noise");
    auto* v_mono = app.add_subcommand("verify-monodomain", "eps -> 0 monodomain reduction");
    auto* chk = app.add_subcommand("check-structure", "membrane structural certificates");

    CLI11_PARSE(app, argc, argv);
    opts.seed_set = seed_opt->count() > 0;

    try {
        ScenarioConfig cfg = load(opts);
        const std::string dir = cfg.output.dir;

        if (sim->parsed()) {
            Scenario sc = build_scenario(cfg);
            const std::uint64_t seed = derive_seed(cfg.ensemble.master_seed, 0);
            WienerIncrements inc =
                replay_path.empty()
                    ? sample_increments(sc.basis->n, sc.run.steps(), sc.run.dt, seed)
                    : load_increments(replay_path);
            PathSolver solver(sc.op, sc.run);
            TrajectoryRecord rec = solver.solve(sc.initial_state(seed), inc);
            const std::string csv = dir + "/trajectory.csv";
            write_trajectory_csv(csv, rec);
            write_meta_sidecar(csv, serialize_config(cfg), cfg.ensemble.master_seed);
            if (dump_incr) dump_increments(dir + "/increments.bin", inc);
            if (dump_coeffs) {
                write_coefficients_csv(dir + "/coefficients.csv", rec);
                write_meta_sidecar(dir + "/coefficients.csv", serialize_config(cfg),
                                   cfg.ensemble.master_seed);
            }
            if (dump_matrices) {
                write_matrix_csv(dir + "/stiffness_intra.csv", sc.op->K_i());
                write_matrix_csv(dir + "/stiffness_extra.csv", sc.op->K_e());
                write_matrix_csv(dir + "/mass.csv", sc.basis->mass_matrix());
            }
            say(opts, "trajectory -> " + csv);
            return 0;
        }

        if (ens->parsed()) {
            Scenario sc = build_scenario(cfg);
            auto solver = std::make_shared<PathSolver>(sc.op, sc.run);
            EnsembleSpec spec;
            spec.paths = cfg.ensemble.paths;
            spec.master_seed = cfg.ensemble.master_seed;
            spec.exec = cfg.ensemble.exec == "serial" ? ExecMode::Serial : ExecMode::OpenMP;
            spec.threads = cfg.ensemble.threads;
            EnsembleStats stats = run_ensemble(spec, [&sc, solver](int, std::uint64_t seed) {
                TrajectoryRecord rec = solver->solve(sc.initial_state(seed), seed);
                const int last = rec.snapshots() - 1;
                return PathResult{{"sup_v_sq", rec.sup_v_sq},
                                  {"sup_w_sq", rec.sup_w_sq},
                                  {"sup_ui_eps", rec.sup_ui_eps},
                                  {"sup_ue_eps", rec.sup_ue_eps},
                                  {"grad_i_int", rec.cum_grad_i(last)},
                                  {"grad_e_int", rec.cum_grad_e(last)},
                                  {"l4_int", rec.cum_l4(last)}};
            });

            json manifest;
            manifest["paths"] = json::array();
            for (int i = 0; i < stats.paths; ++i)
                manifest["paths"].push_back({{"index", i}, {"seed", stats.seeds[i]},
                                             {"outcome", "ok"}});
            json fx;
            for (const auto& [key, m] : stats.functionals) {
                fx[key] = {{"mean", m.mean}, {"variance", m.variance},
                           {"std_error", m.std_error}, {"min", m.min}, {"max", m.max}};
            }
            manifest["functionals"] = fx;
            write_report(cfg, dir + "/ensemble_manifest.json", manifest);

            std::vector<std::vector<double>> table;
            std::vector<std::string> keys;
            for (const auto& [key, m] : stats.functionals) {
                keys.push_back(key);
                table.push_back({m.mean, m.variance, m.std_error, m.min, m.max});
            }
            std::string csv = dir + "/ensemble_stats.csv";
            {
                std::ofstream out(csv);
                out << "functional,mean,variance,std_error,min,max\r\n";
                char buf[64];
                for (size_t i = 0; i < keys.size(); ++i) {
                    out << keys[i];
                    for (double v : table[i]) {
                        std::snprintf(buf, sizeof buf, ",%.17g", v);
                        out << buf;
                    }
                    out << "\r\n";
                }
            }
            write_meta_sidecar(csv, serialize_config(cfg), cfg.ensemble.master_seed);
            say(opts, "ensemble -> " + dir + "/ensemble_manifest.json");
            return 0;
        }

        if (v_energy->parsed()) {
            UniformityReport rep = energy_suite(cfg, {8, 16, 32},
                                                opts.paths > 0 ? opts.paths : 64, 1.25);
            LinearOracleReport lin = linear_scenario_check(256, cfg.ensemble.master_seed);
            json body;
            body["suite"] = "energy";
            body["growth_limit"] = rep.growth_limit;
            body["rows"] = json::array();
            for (const auto& row : rep.rows)
                body["rows"].push_back({{"n", row.n}, {"epsilon", row.epsilon},
                                        {"paths", row.paths}, {"mean", row.mean},
                                        {"std_error", row.std_error}});
            body["linear_oracle"] = {{"measured", lin.measured}, {"oracle", lin.oracle},
                                     {"std_error", lin.std_error}, {"z", lin.z_score}};
            std::vector<GateResult> gates = rep.gates;
            gates.insert(gates.end(), lin.gates.begin(), lin.gates.end());
            write_table(cfg, dir + "/verify_energy.csv",
                        {"functional", "n", "epsilon", "mean", "std_error"}, ladder_rows(rep));
            return finish(opts, cfg, "verify_energy", gates, body);
        }

        if (v_moments->parsed()) {
            UniformityReport rep = moment_suite(cfg, 5.0, {8, 16, 32},
                                                opts.paths > 0 ? opts.paths : 64, 1.35);
            json body;
            body["suite"] = rep.id;
            body["rows"] = json::array();
            for (const auto& row : rep.rows)
                body["rows"].push_back({{"n", row.n}, {"epsilon", row.epsilon},
                                        {"paths", row.paths}, {"mean", row.mean},
                                        {"std_error", row.std_error}});
            write_table(cfg, dir + "/verify_moments.csv",
                        {"functional", "n", "epsilon", "mean", "std_error"}, ladder_rows(rep));
            return finish(opts, cfg, "verify_moments", rep.gates, body);
        }

        if (v_transl->parsed()) {
            TranslationReport rep =
                translation_suite(cfg, {2, 4, 8, 16}, opts.paths > 0 ? opts.paths : 64);
            json body;
            body["suite"] = "translation";
            body["delta_steps"] = rep.delta_steps;
            body["mean_v"] = rep.mean_v;
            body["mean_w"] = rep.mean_w;
            body["slope_v"] = rep.slope_v;
            body["slope_w"] = rep.slope_w;
            body["ci_halfwidth_v"] = rep.halfwidth_v;
            body["ci_halfwidth_w"] = rep.halfwidth_w;
            std::vector<std::pair<std::string, std::vector<double>>> rows;
            for (size_t i = 0; i < rep.delta_steps.size(); ++i)
                rows.push_back({std::to_string(rep.delta_steps[i]),
                                {rep.delta_steps[i] * rep.dt, rep.mean_v[i], rep.se_v[i],
                                 rep.mean_w[i], rep.se_w[i]}});
            write_table(cfg, dir + "/verify_translation.csv",
                        {"delta_steps", "delta", "mean_v", "se_v", "mean_w", "se_w"}, rows);
            return finish(opts, cfg, "verify_translation", rep.gates, body);
        }

        if (v_stab->parsed()) {
            StabilityReport rep =
                stability_suite(cfg, {1e-2, 1e-3, 1e-4}, opts.paths > 0 ? opts.paths : 32);
            json body;
            body["suite"] = "stability";
            body["scales"] = rep.scales;
            body["c_hat"] = rep.c_hat;
            body["zero_scale_exact"] = rep.zero_scale_exact;
            body["zero_scale_difference"] = rep.zero_scale_difference;
            std::vector<std::pair<std::string, std::vector<double>>> rows;
            rows.push_back({"0", {rep.zero_scale_difference}});
            for (size_t i = 0; i < rep.scales.size(); ++i) {
                char lab[32];
                std::snprintf(lab, sizeof lab, "%g", rep.scales[i]);
                rows.push_back({lab, {rep.c_hat[i]}});
            }
            write_table(cfg, dir + "/verify_stability.csv", {"scale", "c_hat"}, rows);
            return finish(opts, cfg, "verify_stability", rep.gates, body);
        }

        if (v_mono->parsed()) {
            MonodomainReport rep = monodomain_compare(cfg, {1e-1, 1e-2, 1e-3},
                                                      cfg.ensemble.master_seed);
            json body;
            body["suite"] = "monodomain";
            body["lambda"] = rep.lambda;
            body["epsilons"] = rep.epsilons;
            body["distances"] = rep.distances;
            std::vector<std::pair<std::string, std::vector<double>>> rows;
            for (size_t i = 0; i < rep.epsilons.size(); ++i) {
                char lab[32];
                std::snprintf(lab, sizeof lab, "%g", rep.epsilons[i]);
                rows.push_back({lab, {rep.distances[i]}});
            }
            write_table(cfg, dir + "/verify_monodomain.csv", {"epsilon", "v_distance"}, rows);
            return finish(opts, cfg, "verify_monodomain", rep.gates, body);
        }

        if (chk->parsed()) {
            MembraneModel m = MembraneModel::fitzhugh_nagumo(cfg.membrane.a, cfg.membrane.eps,
                                                             cfg.membrane.kappa,
                                                             cfg.membrane.gamma);
            StructuralReport rep = check_structural_bounds(m, -10.0, 10.0, 10001);
            json body;
            body["suite"] = "check-structure";
            body["constants"] = {{"c_I1", m.sc.c_I1},   {"c_I_under", m.sc.c_I_under},
                                 {"c_I2", m.sc.c_I2},   {"c_I3", m.sc.c_I3},
                                 {"c_I4", m.sc.c_I4},   {"c_H1", m.sc.c_H1},
                                 {"c_H2", m.sc.c_H2},   {"C1", m.sc.C1},
                                 {"C2", m.sc.C2},       {"C3", m.sc.C3},
                                 {"pair_K", m.sc.pair_K}, {"cert_range", m.sc.cert_range}};
            std::vector<GateResult> gates;
            for (const auto& b : rep.bounds)
                gates.push_back({b.name + " margin >= 0", b.margin, 0.0, b.margin >= 0.0});
            double worst = 1e300;
            for (int i = 0; i < 100; ++i)
                for (int j = 0; j < 100; ++j)
                    worst = std::min(worst, m.dissipation_bound(-10.0 + 20.0 * i / 99.0,
                                                                -10.0 + 20.0 * j / 99.0));
            gates.push_back({"dissipation residual >= 0", worst, 0.0, worst >= 0.0});
            return finish(opts, cfg, "check_structure", gates, body);
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
