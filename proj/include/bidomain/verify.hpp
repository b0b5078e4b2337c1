#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bidomain/config.hpp"
#include "bidomain/ensemble.hpp"
#include "bidomain/galerkin.hpp"

namespace bidomain {

struct GateResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

inline bool all_pass(const std::vector<GateResult>& gates) {
    for (const auto& g : gates)
        if (!g.pass) return false;
    return true;
}

struct LadderRow {
    int n = 0;
    double epsilon = 0.0;
    int paths = 0;
    std::map<std::string, double> mean;
    std::map<std::string, double> std_error;
};

/// n-uniformity of Monte Carlo estimates across a basis-size ladder: no
/// estimate may grow by more than growth_limit per doubling.
struct UniformityReport {
    std::string id;
    std::uint64_t master_seed = 0;
    int paths = 0;
    double growth_limit = 0.0;
    std::vector<LadderRow> rows;
    std::vector<GateResult> gates;
    double runtime_seconds = 0.0;
    bool pass() const { return all_pass(gates); }
};

UniformityReport energy_suite(const ScenarioConfig& cfg, std::vector<int> ladder = {8, 16, 32},
                              int paths = 64, double growth_limit = 1.25, int min_paths = 8);

UniformityReport moment_suite(const ScenarioConfig& cfg, double q0 = 5.0,
                              std::vector<int> ladder = {8, 16, 32}, int paths = 64,
                              double growth_limit = 1.35, int min_paths = 8);

/// Single-mode additive-noise scenario against the closed-form second moment
/// of the discrete scalar SDE (exact recursion, analytic mode integral).
struct LinearOracleReport {
    int paths = 0;
    std::uint64_t master_seed = 0;
    double measured = 0.0;
    double std_error = 0.0;
    double oracle = 0.0;
    double z_score = 0.0;
    std::vector<GateResult> gates;
    double runtime_seconds = 0.0;
    bool pass() const { return all_pass(gates); }
};

LinearOracleReport linear_scenario_check(int paths = 256,
                                         std::uint64_t master_seed = 20260808,
                                         double T = 1.0, double dt = 1e-3);

/// sup_{tau <= delta} int_0^{T-tau} ||u(t+tau) - u(t)||^2 dt for one series
/// of coefficient snapshots (stride 1); delta given in steps.
double translation_statistic(const MatrixXd& series, double dt, int delta_steps);

struct TranslationReport {
    std::uint64_t master_seed = 0;
    int paths = 0;
    double dt = 0.0;
    std::vector<int> delta_steps;
    std::vector<double> mean_v, se_v, mean_w, se_w;
    double slope_v = 0.0, halfwidth_v = 0.0;
    double slope_w = 0.0, halfwidth_w = 0.0;
    std::vector<GateResult> gates;
    double runtime_seconds = 0.0;
    bool pass() const { return all_pass(gates); }
};

TranslationReport translation_suite(const ScenarioConfig& cfg,
                                    std::vector<int> delta_steps = {2, 4, 8, 16},
                                    int paths = 64, int min_paths = 8,
                                    int bootstrap_resamples = 200);

struct StabilityReport {
    std::uint64_t master_seed = 0;
    int pairs = 0;
    bool zero_scale_exact = false;     // s = 0 difference is bit-exact zero
    double zero_scale_difference = 0;  // measured max |difference| at s = 0
    std::vector<double> scales;
    std::vector<double> c_hat;       // empirical stability constant per scale
    double ratio_max_min = 0.0;
    std::vector<GateResult> gates;
    double runtime_seconds = 0.0;
    bool pass() const { return all_pass(gates); }
};

StabilityReport stability_suite(const ScenarioConfig& cfg,
                                std::vector<double> scales = {1e-2, 1e-3, 1e-4},
                                int pairs = 32);

struct MonodomainReport {
    std::uint64_t seed = 0;
    double lambda = 0.0;
    std::vector<double> epsilons;
    std::vector<double> distances;  // ||v_bi - v_mono||_{L2(Omega_T)}
    std::vector<GateResult> gates;
    double runtime_seconds = 0.0;
    bool pass() const { return all_pass(gates); }
};

MonodomainReport monodomain_compare(const ScenarioConfig& cfg,
                                    std::vector<double> epsilons = {1e-1, 1e-2, 1e-3},
                                    std::uint64_t seed = 20260808);

/// Residuals of the two regularized weak identities with phi = e_ell along a
/// recorded trajectory (ds-integrals by trapezoid, noise from the record).
struct ResidualSeries {
    VectorXd times;
    VectorXd res_i, res_e;
    double sup_abs = 0.0;
};

ResidualSeries weak_residual(const GalerkinOperator& op, const TrajectoryRecord& rec, int ell);

struct RichardsonReport {
    double residual_coarse = 0.0;
    double residual_fine = 0.0;
    double ratio = 0.0;
    std::vector<GateResult> gates;
    double runtime_seconds = 0.0;
    bool pass() const { return all_pass(gates); }
};

/// Runs the noise-free scenario at dt and dt/2 and forms the residual ratio.
RichardsonReport weak_residual_richardson(const ScenarioConfig& cfg, double lo = 0.4,
                                          double hi = 0.6);

/// Discrete energy-balance defect per snapshot of a zero-noise trajectory:
/// E(t)/2 + int dissipation - int (wH - vI) - E(0)/2; O(dt) per unit time.
VectorXd discrete_energy_residual(const TrajectoryRecord& rec);

/// Ordinary least squares slope of y against x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bidomain
