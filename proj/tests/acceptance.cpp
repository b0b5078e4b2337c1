// Acceptance suite: runs every gate on the stock scenario at its stated
// tolerance and prints one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "bidomain/config.hpp"
#include "bidomain/verify.hpp"
#include "helpers.hpp"

using namespace bidomain;

namespace {

int failures = 0;

void report(int id, const std::string& label, bool pass, double seconds, double limit,
            const std::string& detail) {
    std::printf("[%s] criterion %2d: %-34s (%6.2fs / limit %4.0fs)  %s\n",
                pass ? "PASS" : "FAIL", id, label.c_str(), seconds, limit, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

template <typename Fn>
void criterion(int id, const std::string& label, double time_limit, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        detail = fn(pass);
    } catch (const std::exception& e) {
        pass = false;
        detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > time_limit) {
        pass = false;
        detail += " [over time limit]";
    }
    report(id, label, pass, secs, time_limit, detail);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

}  // namespace

int main() {
    const ScenarioConfig stock = default_config();

    criterion(1, "exact v-consistency", 10.0, [&](bool& pass) {
        ScenarioConfig cfg = stock;
        cfg.time.T = 10.0;  // 1e4 steps at dt = 1e-3
        Scenario sc = build_scenario(cfg);
        PathSolver solver(sc.op, sc.run);
        TrajectoryRecord rec = solver.solve(sc.initial_state(derive_seed(cfg.ensemble.master_seed, 0)),
                                            derive_seed(cfg.ensemble.master_seed, 0));
        double worst = 0.0;
        for (int m = 0; m < rec.snapshots(); ++m)
            worst = std::max(worst, rec.state_at(m).consistency_gap(sc.epsilon));
        pass = worst <= 1e-10;
        return fmt("max gap %.3e (tol 1e-10)", worst);
    });

    criterion(2, "drift dissipativity", 5.0, [&](bool& pass) {
        Scenario sc = build_scenario(stock);
        double worst = -1e300;
        bool ok = true;
        for (int trial = 0; trial < 1000; ++trial) {
            GalerkinState s1 = testutil::random_state_in_ball(16, sc.epsilon, 2 * trial, 10.0);
            GalerkinState s2 = testutil::random_state_in_ball(16, sc.epsilon, 2 * trial + 1, 10.0);
            MonotonicityReport rep = check_monotonicity(*sc.op, s1, s2);
            ok = ok && rep.I_FM <= 0.0;
            worst = std::max(worst, rep.I_FM);
        }
        pass = ok;
        return fmt("max I_F^M over 1000 pairs: %.3e (must be <= 0)", worst);
    });

    criterion(3, "structural certificates", 5.0, [&](bool& pass) {
        MembraneModel m = MembraneModel::fitzhugh_nagumo(
            stock.membrane.a, stock.membrane.eps, stock.membrane.kappa, stock.membrane.gamma);
        StructuralReport rep = check_structural_bounds(m, -10.0, 10.0, 10000);
        double worst = 0.0;
        for (const auto& b : rep.bounds) worst = std::min(worst, b.margin);
        bool ok = rep.all_ok();
        for (int i = 0; i < 100; ++i)
            for (int j = 0; j < 100; ++j) {
                const double v = -10.0 + 20.0 * i / 99.0;
                const double w = -10.0 + 20.0 * j / 99.0;
                const double r = m.dissipation_bound(v, w);
                worst = std::min(worst, r);
                ok = ok && r >= 0.0;
            }
        pass = ok;
        return fmt("worst margin %.3e over 1e4-point grids", worst);
    });

    criterion(4, "monotonicity / coercivity", 10.0, [&](bool& pass) {
        Scenario sc = build_scenario(stock);
        double worst_mono = 1e300, worst_coer = 1e300;
        bool ok = true;
        for (int trial = 0; trial < 1000; ++trial) {
            GalerkinState s1 = testutil::random_state_in_ball(16, sc.epsilon, 9000 + 2 * trial, 10.0);
            GalerkinState s2 = testutil::random_state_in_ball(16, sc.epsilon, 9001 + 2 * trial, 10.0);
            MonotonicityReport mr = check_monotonicity(*sc.op, s1, s2);
            CoercivityReport cr = check_coercivity(*sc.op, s1);
            worst_mono = std::min(worst_mono, mr.margin);
            worst_coer = std::min(worst_coer, cr.margin);
            ok = ok && mr.margin >= 0.0 && cr.margin >= 0.0;
        }
        pass = ok;
        return fmt("worst margins: monotonicity %.3e, coercivity %.3e", worst_mono, worst_coer);
    });

    criterion(5, "linear-scenario oracle", 30.0, [&](bool& pass) {
        LinearOracleReport rep = linear_scenario_check(256, stock.ensemble.master_seed, 1.0, 1e-3);
        pass = rep.pass();
        return fmt("measured %.5e vs oracle %.5e (z = %.2f)", rep.measured, rep.oracle,
                   rep.z_score);
    });

    criterion(6, "n-uniform energy and moments", 300.0, [&](bool& pass) {
        UniformityReport e = energy_suite(stock, {8, 16, 32}, 64, 1.25);
        UniformityReport m = moment_suite(stock, 5.0, {8, 16, 32}, 64, 1.35);
        double worst = 0.0;
        for (const auto& g : e.gates) worst = std::max(worst, g.value / 1.25);
        for (const auto& g : m.gates) worst = std::max(worst, g.value / 1.35);
        pass = e.pass() && m.pass();
        return fmt("worst growth ratio %.3f of its limit", worst);
    });

    criterion(7, "temporal translation estimates", 300.0, [&](bool& pass) {
        TranslationReport rep = translation_suite(stock, {2, 4, 8, 16}, 64);
        pass = rep.pass();
        return fmt("slopes v %.3f (>= 0.25-CI), w %.3f (>= 0.5-CI)", rep.slope_v, rep.slope_w);
    });

    criterion(8, "pathwise stability / uniqueness", 180.0, [&](bool& pass) {
        StabilityReport rep = stability_suite(stock, {1e-2, 1e-3, 1e-4}, 32);
        pass = rep.pass();
        return fmt("s=0 exact-zero %.0f; C_hat spread %.3f (<= 2)",
                   rep.zero_scale_exact ? 1.0 : 0.0, rep.ratio_max_min);
    });

    criterion(9, "monodomain reduction", 120.0, [&](bool& pass) {
        ScenarioConfig cfg = stock;
        cfg.conductivity.sigma_l_i = 2.0;
        cfg.conductivity.sigma_t_i = 2.0;
        cfg.conductivity.sigma_l_e = 1.0;
        cfg.conductivity.sigma_t_e = 1.0;  // M_i = 2 M_e
        cfg.epsilon.policy = "fixed";
        cfg.epsilon.value = 1e-1;
        MonodomainReport rep = monodomain_compare(cfg, {1e-1, 1e-2, 1e-3},
                                                  cfg.ensemble.master_seed);
        pass = rep.pass();
        return fmt("distances %.3e > %.3e > %.3e", rep.distances[0], rep.distances[1],
                   rep.distances[2]);
    });

    criterion(10, "weak-form residual Richardson", 60.0, [&](bool& pass) {
        RichardsonReport rep = weak_residual_richardson(stock);
        pass = rep.pass();
        return fmt("residuals %.3e -> %.3e, ratio %.3f", rep.residual_coarse,
                   rep.residual_fine, rep.ratio);
    });

    std::printf("%d/10 criteria passed\n", 10 - failures);
    return failures;
}
