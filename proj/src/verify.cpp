#include "bidomain/verify.hpp"

#include <chrono>
#include <cmath>
#include <random>

namespace bidomain {

namespace {

constexpr double kPi = 3.14159265358979323846;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

EnsembleSpec ensemble_spec(const ScenarioConfig& cfg, int paths) {
    EnsembleSpec spec;
    spec.paths = paths;
    spec.master_seed = cfg.ensemble.master_seed;
    spec.exec = cfg.ensemble.exec == "serial" ? ExecMode::Serial : ExecMode::OpenMP;
    spec.threads = cfg.ensemble.threads;
    return spec;
}

PathResult energy_functionals(const TrajectoryRecord& rec) {
    const int last = rec.snapshots() - 1;
    return {{"sup_v_sq", rec.sup_v_sq},
            {"sup_w_sq", rec.sup_w_sq},
            {"sup_ui_eps", rec.sup_ui_eps},
            {"sup_ue_eps", rec.sup_ue_eps},
            {"grad_i_int", rec.cum_grad_i(last)},
            {"grad_e_int", rec.cum_grad_e(last)},
            {"l4_int", rec.cum_l4(last)}};
}

UniformityReport ladder_suite(const std::string& id, const ScenarioConfig& cfg,
                              const std::vector<int>& ladder, int paths, double growth_limit,
                              int min_paths, double q0) {
    Timer timer;
    if (paths < min_paths)
        throw std::invalid_argument(id + ": ensemble of " + std::to_string(paths) +
                                    " paths is below the configured minimum of " +
                                    std::to_string(min_paths));
    if (ladder.size() < 2) throw std::invalid_argument(id + ": ladder needs >= 2 levels");

    UniformityReport rep;
    rep.id = id;
    rep.master_seed = cfg.ensemble.master_seed;
    rep.paths = paths;
    rep.growth_limit = growth_limit;

    for (int n : ladder) {
        Scenario sc = build_scenario(cfg, n);
        auto solver = std::make_shared<PathSolver>(sc.op, sc.run);
        auto fn = [&sc, solver, q0](int, std::uint64_t seed) {
            TrajectoryRecord rec = solver->solve(sc.initial_state(seed), seed);
            PathResult res = energy_functionals(rec);
            if (q0 > 0.0) {
                PathResult mom;
                const double p = q0 / 2.0;
                mom["sup_v_q"] = std::pow(res["sup_v_sq"], p);
                mom["sup_w_q"] = std::pow(res["sup_w_sq"], p);
                mom["grad_i_q"] = std::pow(res["grad_i_int"], p);
                mom["grad_e_q"] = std::pow(res["grad_e_int"], p);
                mom["l4_q"] = std::pow(res["l4_int"], p);
                return mom;
            }
            return res;
        };
        EnsembleStats stats = run_ensemble(ensemble_spec(cfg, paths), fn);
        LadderRow row;
        row.n = n;
        row.epsilon = sc.epsilon;
        row.paths = paths;
        for (const auto& [key, m] : stats.functionals) {
            row.mean[key] = m.mean;
            row.std_error[key] = m.std_error;
        }
        rep.rows.push_back(std::move(row));
    }

    for (size_t k = 0; k + 1 < rep.rows.size(); ++k) {
        for (const auto& [key, m0] : rep.rows[k].mean) {
            const double m1 = rep.rows[k + 1].mean.at(key);
            const double ratio = m0 != 0.0 ? m1 / m0 : (m1 == 0.0 ? 1.0 : INFINITY);
            GateResult g;
            g.name = key + " n" + std::to_string(rep.rows[k].n) + "->n" +
                     std::to_string(rep.rows[k + 1].n);
            g.value = ratio;
            g.threshold = growth_limit;
            g.pass = ratio <= growth_limit;
            rep.gates.push_back(g);
        }
    }
    rep.runtime_seconds = timer.seconds();
    return rep;
}

}  // namespace

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

UniformityReport energy_suite(const ScenarioConfig& cfg, std::vector<int> ladder, int paths,
                              double growth_limit, int min_paths) {
    return ladder_suite("energy", cfg, ladder, paths, growth_limit, min_paths, 0.0);
}

UniformityReport moment_suite(const ScenarioConfig& cfg, double q0, std::vector<int> ladder,
                              int paths, double growth_limit, int min_paths) {
    if (q0 < 2.0) throw std::invalid_argument("moment_suite: q0 must be >= 2");
    return ladder_suite("moments-q" + std::to_string(q0), cfg, ladder, paths, growth_limit,
                        min_paths, q0);
}

LinearOracleReport linear_scenario_check(int paths, std::uint64_t master_seed, double T,
                                         double dt) {
    Timer timer;
    ScenarioConfig cfg = default_config();
    cfg.basis.n = 1;
    cfg.membrane.enabled = false;
    cfg.conductivity.sigma_l_i = 1.0;
    cfg.conductivity.sigma_t_i = 1.0;
    cfg.conductivity.sigma_l_e = 1.0;
    cfg.conductivity.sigma_t_e = 1.0;
    cfg.noise_v = {"additive", 0.5, 1.0, 0.0};
    cfg.noise_w = {"additive", 0.0, 1.0, 0.0};
    cfg.initial.v_profile = "rest";
    cfg.initial.w_profile = "rest";
    cfg.time.dt = dt;
    cfg.time.T = T;
    cfg.time.stepper = "euler-maruyama";
    cfg.ensemble.master_seed = master_seed;

    Scenario sc = build_scenario(cfg);
    auto solver = std::make_shared<PathSolver>(sc.op, sc.run);
    auto fn = [&sc, solver](int, std::uint64_t seed) -> PathResult {
        TrajectoryRecord rec = solver->solve(sc.initial_state(seed), seed);
        const double cT = rec.c(0, rec.snapshots() - 1);
        return {{"v_final_sq", cT * cT}};
    };
    EnsembleStats stats = run_ensemble(ensemble_spec(cfg, paths), fn);

    // exact second-moment recursion of the discrete scalar SDE
    // c_{m+1} = (1 - dt k/(2+eps)) c_m + (2/(2+eps)) gamma_1 p_1 dW_m
    const double lambda1 = (kPi / 2.0) * (kPi / 2.0);
    const double eps = sc.epsilon;
    const double alpha = 1.0 - dt * lambda1 / (2.0 + eps);
    const double p1 = 2.0 * std::sqrt(2.0) / kPi;  // int of the first mode on [0,1]
    const double gcoef = (2.0 / (2.0 + eps)) * cfg.noise_v.strength * p1;
    double Em = 0.0;
    const int steps = static_cast<int>(std::llround(T / dt));
    for (int m = 0; m < steps; ++m) Em = alpha * alpha * Em + gcoef * gcoef * dt;

    LinearOracleReport rep;
    rep.paths = paths;
    rep.master_seed = master_seed;
    rep.measured = stats.at("v_final_sq").mean;
    rep.std_error = stats.at("v_final_sq").std_error;
    rep.oracle = Em;
    rep.z_score = rep.std_error > 0.0 ? (rep.measured - rep.oracle) / rep.std_error : 0.0;
    GateResult g;
    g.name = "|measured - oracle| <= 3 SE";
    g.value = std::fabs(rep.z_score);
    g.threshold = 3.0;
    g.pass = std::fabs(rep.measured - rep.oracle) <= 3.0 * rep.std_error;
    rep.gates.push_back(g);
    rep.runtime_seconds = timer.seconds();
    return rep;
}

double translation_statistic(const MatrixXd& series, double dt, int delta_steps) {
    const int S = static_cast<int>(series.cols());
    double sup = 0.0;
    for (int tau = 1; tau <= delta_steps; ++tau) {
        if (tau >= S) break;
        double acc = 0.0;
        for (int m = 0; m + tau < S; ++m) acc += (series.col(m + tau) - series.col(m)).squaredNorm();
        sup = std::max(sup, acc * dt);
    }
    return sup;
}

TranslationReport translation_suite(const ScenarioConfig& cfg, std::vector<int> delta_steps,
                                    int paths, int min_paths, int bootstrap_resamples) {
    Timer timer;
    if (static_cast<int>(delta_steps.size()) < 3)
        throw std::invalid_argument("translation_suite: need at least 3 deltas for a slope");
    if (paths < min_paths)
        throw std::invalid_argument("translation_suite: undersized ensemble");
    if (cfg.time.snapshot_stride != 1)
        throw std::invalid_argument("translation_suite: snapshot_stride must be 1");
    for (int d : delta_steps)
        if (d < 1 || d * cfg.time.dt > cfg.time.T / 4.0 + 1e-12)
            throw std::invalid_argument("translation_suite: deltas must satisfy dt <= delta <= T/4");

    Scenario sc = build_scenario(cfg);
    auto solver = std::make_shared<PathSolver>(sc.op, sc.run);
    const double dt = cfg.time.dt;
    auto fn = [&sc, solver, &delta_steps, dt](int, std::uint64_t seed) {
        TrajectoryRecord rec = solver->solve(sc.initial_state(seed), seed);
        PathResult res;
        for (int d : delta_steps) {
            res["S_v_" + std::to_string(d)] = translation_statistic(rec.c, dt, d);
            res["S_w_" + std::to_string(d)] = translation_statistic(rec.a, dt, d);
        }
        return res;
    };
    std::vector<PathResult> per_path;
    EnsembleStats stats = run_ensemble(ensemble_spec(cfg, paths), fn, &per_path);

    TranslationReport rep;
    rep.master_seed = cfg.ensemble.master_seed;
    rep.paths = paths;
    rep.dt = dt;
    rep.delta_steps = delta_steps;

    std::vector<double> logd;
    for (int d : delta_steps) {
        logd.push_back(std::log(d * dt));
        rep.mean_v.push_back(stats.at("S_v_" + std::to_string(d)).mean);
        rep.se_v.push_back(stats.at("S_v_" + std::to_string(d)).std_error);
        rep.mean_w.push_back(stats.at("S_w_" + std::to_string(d)).mean);
        rep.se_w.push_back(stats.at("S_w_" + std::to_string(d)).std_error);
    }
    auto log_all = [](const std::vector<double>& v) {
        std::vector<double> out;
        for (double x : v) out.push_back(std::log(x));
        return out;
    };
    rep.slope_v = ols_slope(logd, log_all(rep.mean_v));
    rep.slope_w = ols_slope(logd, log_all(rep.mean_w));

    // bootstrap over paths, deterministic resampling stream
    std::mt19937_64 rng(derive_stream(cfg.ensemble.master_seed, 7001));
    std::vector<double> slopes_v, slopes_w;
    for (int b = 0; b < bootstrap_resamples; ++b) {
        std::vector<double> mv(delta_steps.size(), 0.0), mw(delta_steps.size(), 0.0);
        for (int i = 0; i < paths; ++i) {
            const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(paths));
            for (size_t k = 0; k < delta_steps.size(); ++k) {
                mv[k] += per_path[j].at("S_v_" + std::to_string(delta_steps[k]));
                mw[k] += per_path[j].at("S_w_" + std::to_string(delta_steps[k]));
            }
        }
        for (auto& x : mv) x = std::log(x / paths);
        for (auto& x : mw) x = std::log(x / paths);
        slopes_v.push_back(ols_slope(logd, mv));
        slopes_w.push_back(ols_slope(logd, mw));
    }
    auto halfwidth = [](const std::vector<double>& s) {
        double m = 0;
        for (double x : s) m += x;
        m /= s.size();
        double var = 0;
        for (double x : s) var += (x - m) * (x - m);
        var /= (s.size() - 1);
        return 1.96 * std::sqrt(var);
    };
    rep.halfwidth_v = halfwidth(slopes_v);
    rep.halfwidth_w = halfwidth(slopes_w);

    rep.gates.push_back({"v slope >= 0.25 - CI", rep.slope_v, 0.25 - rep.halfwidth_v,
                         rep.slope_v >= 0.25 - rep.halfwidth_v});
    rep.gates.push_back({"w slope >= 0.5 - CI", rep.slope_w, 0.5 - rep.halfwidth_w,
                         rep.slope_w >= 0.5 - rep.halfwidth_w});
    rep.runtime_seconds = timer.seconds();
    return rep;
}

namespace {

struct PairDiff {
    double sup_dv_sq = 0.0;
    double sup_dw_sq = 0.0;
    double int_dui_sq = 0.0;
    double int_due_sq = 0.0;
    double max_abs = 0.0;  // over all recorded blocks, for the s = 0 gate
};

PairDiff pair_difference(const TrajectoryRecord& A, const TrajectoryRecord& B, double eps,
                         double dt) {
    PairDiff d;
    const int S = A.snapshots();
    for (int m = 0; m < S; ++m) {
        const double dv = (A.c.col(m) - B.c.col(m)).squaredNorm();
        const double dw = (A.a.col(m) - B.a.col(m)).squaredNorm();
        d.sup_dv_sq = std::max(d.sup_dv_sq, dv);
        d.sup_dw_sq = std::max(d.sup_dw_sq, dw);
        if (m + 1 < S) {  // left-point time integral
            d.int_dui_sq += dt * (A.ci_s.col(m) - B.ci_s.col(m)).squaredNorm() / eps;
            d.int_due_sq += dt * (A.ce_s.col(m) - B.ce_s.col(m)).squaredNorm() / eps;
        }
        double mm = (A.c.col(m) - B.c.col(m)).cwiseAbs().maxCoeff();
        mm = std::max(mm, (A.ci_s.col(m) - B.ci_s.col(m)).cwiseAbs().maxCoeff());
        mm = std::max(mm, (A.ce_s.col(m) - B.ce_s.col(m)).cwiseAbs().maxCoeff());
        mm = std::max(mm, (A.a.col(m) - B.a.col(m)).cwiseAbs().maxCoeff());
        d.max_abs = std::max(d.max_abs, mm);
    }
    return d;
}

}  // namespace

StabilityReport stability_suite(const ScenarioConfig& cfg, std::vector<double> scales,
                                int pairs) {
    Timer timer;
    if (pairs < 2) throw std::invalid_argument("stability_suite: need at least 2 pairs");
    for (double s : scales)
        if (!(s > 0.0))
            throw std::invalid_argument("stability_suite: scales must be positive (s = 0 is "
                                        "checked separately)");

    Scenario sc = build_scenario(cfg);
    const int n = sc.basis->n;
    const double eps = sc.epsilon;
    const double se = std::sqrt(eps);
    auto solver = std::make_shared<PathSolver>(sc.op, sc.run);

    // fixed unit perturbation direction, weight 1/(l+1), applied to v and w
    VectorXd g(n);
    for (int l = 0; l < n; ++l) g(l) = 1.0 / (l + 1);
    g.normalize();

    auto perturbed = [&](const GalerkinState& base, double s) {
        GalerkinState p = base;
        p.ci_s = base.ci_s + se * s * g;
        p.c = (p.ci_s - p.ce_s) / se;
        p.a = base.a + s * g;
        return p;
    };

    StabilityReport rep;
    rep.master_seed = cfg.ensemble.master_seed;
    rep.pairs = pairs;
    rep.scales = scales;

    EnsembleSpec pspec;
    pspec.paths = pairs;
    pspec.master_seed = cfg.ensemble.master_seed;
    pspec.pairing = Pairing::CommonIncrements;
    auto pair_seeds = pair_paths(pspec);

    // s = 0: identical data and increments must reproduce bit-identically
    {
        const auto seed = pair_seeds[0].first;
        WienerIncrements inc = sample_increments(n, sc.run.steps(), sc.run.dt, seed);
        GalerkinState base = sc.initial_state(seed);
        TrajectoryRecord A = solver->solve(base, inc);
        TrajectoryRecord B = solver->solve(perturbed(base, 0.0), inc);
        rep.zero_scale_difference = pair_difference(A, B, eps, sc.run.dt).max_abs;
        rep.zero_scale_exact = rep.zero_scale_difference == 0.0;
    }

    const double den_unit = 2.0;  // |g|^2 contributions from v and w
    EnsembleSpec fan = ensemble_spec(cfg, pairs);
    for (double s : scales) {
        auto fn = [&, s](int k, std::uint64_t) -> PathResult {
            const auto seed = pair_seeds[k].first;
            WienerIncrements inc = sample_increments(n, sc.run.steps(), sc.run.dt, seed);
            GalerkinState base = sc.initial_state(seed);
            TrajectoryRecord A = solver->solve(base, inc);
            TrajectoryRecord B = solver->solve(perturbed(base, s), inc);
            PairDiff d = pair_difference(A, B, eps, sc.run.dt);
            return {{"measured", d.sup_dv_sq + d.sup_dw_sq + d.int_dui_sq + d.int_due_sq}};
        };
        EnsembleStats stats = run_ensemble(fan, fn);
        rep.c_hat.push_back(stats.at("measured").mean / (s * s * den_unit));
    }

    double cmin = rep.c_hat[0], cmax = rep.c_hat[0];
    for (double c : rep.c_hat) {
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
    }
    rep.ratio_max_min = cmax / cmin;
    rep.gates.push_back({"s=0 difference bit-exact zero", rep.zero_scale_exact ? 0.0 : 1.0,
                         0.0, rep.zero_scale_exact});
    rep.gates.push_back(
        {"C_hat stable within factor 2", rep.ratio_max_min, 2.0, rep.ratio_max_min <= 2.0});
    rep.runtime_seconds = timer.seconds();
    return rep;
}

MonodomainReport monodomain_compare(const ScenarioConfig& cfg, std::vector<double> epsilons,
                                    std::uint64_t seed) {
    Timer timer;
    if (epsilons.size() < 2)
        throw std::invalid_argument("monodomain_compare: need at least 2 epsilons");
    for (size_t i = 0; i + 1 < epsilons.size(); ++i)
        if (!(epsilons[i] > epsilons[i + 1]))
            throw std::invalid_argument("monodomain_compare: epsilons must decrease strictly");

    ConductivityField cond = make_conductivity(cfg.conductivity);
    double lambda = 0.0;
    if (!cond.proportional(lambda))
        throw std::invalid_argument(
            "monodomain_compare: conductivities are not proportional (M_i != lambda M_e); "
            "the monodomain reduction does not apply");

    MonodomainReport rep;
    rep.seed = seed;
    rep.lambda = lambda;
    rep.epsilons = epsilons;

    Scenario base = build_scenario(cfg, 0, epsilons.front());
    const int n = base.basis->n;
    WienerIncrements inc = sample_increments(n, base.run.steps(), base.run.dt, seed);

    // reduced conductivity: harmonic mean; K_M = lambda/(1+lambda) K_e
    MatrixXd K_e = assemble_stiffness(*base.basis, cond, Tissue::Extra);
    MonodomainOperator mono(base.basis, (lambda / (1.0 + lambda)) * K_e,
                            base.op->membrane(), base.op->noise_v(), base.op->noise_w());
    GalerkinState init = base.initial_state(seed);
    TrajectoryRecord mrec = mono.solve(base.run, init.c, init.a, inc);

    for (double eps : epsilons) {
        Scenario sc = build_scenario(cfg, 0, eps);
        PathSolver solver(sc.op, sc.run);
        TrajectoryRecord brec = solver.solve(sc.initial_state(seed), inc);
        double acc = 0.0;
        for (int m = 1; m < brec.snapshots(); ++m)
            acc += sc.run.dt * (brec.c.col(m) - mrec.c.col(m)).squaredNorm();
        rep.distances.push_back(std::sqrt(acc));
    }

    bool dec = true;
    for (size_t i = 0; i + 1 < rep.distances.size(); ++i)
        dec = dec && rep.distances[i] > rep.distances[i + 1];
    rep.gates.push_back({"||v_bi - v_mono|| strictly decreasing as eps drops",
                         dec ? 0.0 : 1.0, 0.0, dec});
    rep.runtime_seconds = timer.seconds();
    return rep;
}

ResidualSeries weak_residual(const GalerkinOperator& op, const TrajectoryRecord& rec, int ell) {
    const int n = op.n();
    if (ell < 0 || ell >= n)
        throw std::invalid_argument("weak_residual: test index out of range");
    if (!rec.has_noise_record)
        throw std::invalid_argument("weak_residual: trajectory lacks the increment record");
    if (rec.stride != 1)
        throw std::invalid_argument("weak_residual: needs snapshot_stride 1");

    const BasisSet& b = op.basis();
    const double eps = op.epsilon();
    const double se = std::sqrt(eps);
    const double dt = rec.dt;
    const int S = rec.snapshots();

    // f_i = (K_i c_i)_ell + <I, e_ell>,  f_e = -(K_e c_e)_ell + <I, e_ell>
    VectorXd f_i(S), f_e(S);
    for (int m = 0; m < S; ++m) {
        const VectorXd c_i = rec.ci_s.col(m) / se;
        const VectorXd c_e = rec.ce_s.col(m) / se;
        const VectorXd vq = b.evaluate_at_quad(rec.c.col(m));
        const VectorXd wq = b.evaluate_at_quad(rec.a.col(m));
        double Iproj = 0.0;
        for (int q = 0; q < b.quad.size(); ++q)
            Iproj += b.quad.weights(q) * op.membrane().ion_current(vq(q), wq(q)) * b.values(ell, q);
        f_i(m) = op.K_i().row(ell).dot(c_i) + Iproj;
        f_e(m) = -op.K_e().row(ell).dot(c_e) + Iproj;
    }

    ResidualSeries out;
    out.times = rec.times;
    out.res_i.resize(S);
    out.res_e.resize(S);
    double trap_i = 0.0, trap_e = 0.0, noise_sum = 0.0;
    out.res_i(0) = 0.0;
    out.res_e(0) = 0.0;
    for (int m = 1; m < S; ++m) {
        trap_i += 0.5 * dt * (f_i(m - 1) + f_i(m));
        trap_e += 0.5 * dt * (f_e(m - 1) + f_e(m));
        noise_sum += rec.noise_v_proj(ell, m - 1);
        const double lhs_i = (rec.c(ell, m) + se * rec.ci_s(ell, m)) -
                             (rec.c(ell, 0) + se * rec.ci_s(ell, 0));
        const double lhs_e = (rec.c(ell, m) - se * rec.ce_s(ell, m)) -
                             (rec.c(ell, 0) - se * rec.ce_s(ell, 0));
        out.res_i(m) = lhs_i + trap_i - noise_sum;
        out.res_e(m) = lhs_e + trap_e - noise_sum;
        out.sup_abs = std::max({out.sup_abs, std::fabs(out.res_i(m)), std::fabs(out.res_e(m))});
    }
    return out;
}

RichardsonReport weak_residual_richardson(const ScenarioConfig& cfg, double lo, double hi) {
    Timer timer;
    ScenarioConfig det = cfg;
    det.noise_v.strength = 0.0;
    det.noise_w.strength = 0.0;
    det.initial.perturbation_std = 0.0;
    det.time.snapshot_stride = 1;

    auto residual_norm = [](const ScenarioConfig& c) {
        Scenario sc = build_scenario(c);
        RunConfig run = sc.run;
        run.record_noise = true;
        PathSolver solver(sc.op, run);
        TrajectoryRecord rec = solver.solve(sc.initial_state(1), 1);
        double sup = 0.0;
        for (int l = 0; l < sc.basis->n; ++l)
            sup = std::max(sup, weak_residual(*sc.op, rec, l).sup_abs);
        return sup;
    };

    RichardsonReport rep;
    rep.residual_coarse = residual_norm(det);
    ScenarioConfig fine = det;
    fine.time.dt = det.time.dt / 2.0;
    rep.residual_fine = residual_norm(fine);
    rep.ratio = rep.residual_fine / rep.residual_coarse;
    rep.gates.push_back({"Richardson ratio in [0.4, 0.6]", rep.ratio, hi,
                         rep.ratio >= lo && rep.ratio <= hi});
    rep.runtime_seconds = timer.seconds();
    return rep;
}

VectorXd discrete_energy_residual(const TrajectoryRecord& rec) {
    const int S = rec.snapshots();
    VectorXd out(S);
    auto energy = [&](int m) {
        return 0.5 * (rec.c.col(m).squaredNorm() + rec.ci_s.col(m).squaredNorm() +
                      rec.ce_s.col(m).squaredNorm() + rec.a.col(m).squaredNorm());
    };
    const double E0 = energy(0);
    for (int m = 0; m < S; ++m)
        out(m) = energy(m) + rec.cum_dissipation(m) - rec.cum_membrane_source(m) - E0;
    return out;
}

}  // namespace bidomain
