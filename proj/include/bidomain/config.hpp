#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bidomain/galerkin.hpp"

namespace bidomain {

struct DomainConfig {
    int dim = 1;
    std::vector<double> lengths{1.0};
    std::vector<std::string> dirichlet_faces{"x-"};
    std::vector<std::string> neumann_faces;  // optional; must be the complement
    bool neumann_given = false;
};

struct BasisConfig {
    int n = 16;
    int quad_points = 0;  // 0 = default rule
};

struct EpsilonConfig {
    std::string policy = "tied";  // "tied" (1/n) or "fixed"
    double value = 0.0;
};

struct MembraneConfig {
    bool enabled = true;
    double a = 0.1;
    double eps = 0.01;
    double kappa = 1.0;
    double gamma = 0.5;
};

struct ConductivityConfig {
    std::string kind = "constant";
    double sigma_l_i = 1.0, sigma_t_i = 1.0;
    double sigma_l_e = 1.5, sigma_t_e = 1.5;
    double fiber_angle_deg = 0.0;
    double fiber_twist_deg = 0.0;
};

struct NoiseChannelConfig {
    std::string kind = "additive";  // "additive" | "multiplicative-affine"
    double strength = 0.0;          // s0
    double b0 = 1.0;
    double b1 = 0.0;
};

// channel defaults for the stock scenario: mixed current noise on v,
// additive subunit noise on w
inline NoiseChannelConfig default_noise_v() { return {"multiplicative-affine", 0.15, 1.0, 0.25}; }
inline NoiseChannelConfig default_noise_w() { return {"additive", 0.1, 1.0, 0.0}; }

struct InitialConfig {
    std::string v_profile = "gaussian-bump";  // "rest" | "gaussian-bump"
    double amplitude = 1.25;
    std::vector<double> center{0.5};
    double width = 0.12;
    std::string w_profile = "gaussian-bump";
    double w_amplitude = 0.25;
    std::string split = "ui";  // "ui" | "symmetric"
    double perturbation_std = 0.0;
};

struct TimeConfig {
    double dt = 1e-3;
    double T = 1.0;
    std::string stepper = "semi-implicit";  // | "euler-maruyama"
    int snapshot_stride = 1;
    double blowup_threshold = 1e6;
};

struct EnsembleConfig {
    int paths = 64;
    std::uint64_t master_seed = 20260808;
    std::string pairing = "independent";  // | "common-increments"
    std::string exec = "openmp";          // | "serial"
    int threads = 0;
};

struct OutputConfig {
    std::string dir = "out";
};

struct ScenarioConfig {
    int version = 1;
    DomainConfig domain;
    BasisConfig basis;
    EpsilonConfig epsilon;
    MembraneConfig membrane;
    ConductivityConfig conductivity;
    NoiseChannelConfig noise_v = default_noise_v();
    NoiseChannelConfig noise_w = default_noise_w();
    InitialConfig initial;
    TimeConfig time;
    EnsembleConfig ensemble;
    OutputConfig output;
};

/// All schema/invariant violations found in one pass, each prefixed with a
/// JSON pointer to the offending key.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    std::vector<std::string> violations;
};

ScenarioConfig default_config();
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config_file(const std::string& path);
std::string serialize_config(const ScenarioConfig& cfg);  // canonical, all keys

/// Fully assembled immutable scenario: basis, operators, initial data.
struct Scenario {
    ScenarioConfig cfg;
    std::shared_ptr<const BasisSet> basis;
    ConductivityField cond;
    double epsilon = 0.0;
    std::shared_ptr<const GalerkinOperator> op;
    RunConfig run;
    VectorXd ci0, ce0, a0;  // deterministic part of the initial split

    /// Initial state with the per-path perturbation law applied (stream 2 of
    /// the path seed); exact c = (ci_s - ce_s)/sqrt(eps) by construction.
    GalerkinState initial_state(std::uint64_t path_seed) const;
};

Scenario build_scenario(const ScenarioConfig& cfg, int n_override = 0,
                        double eps_override = 0.0);

Domain make_domain(const DomainConfig& dc);
ConductivityField make_conductivity(const ConductivityConfig& cc);
Stepper parse_stepper(const std::string& s);

}  // namespace bidomain
