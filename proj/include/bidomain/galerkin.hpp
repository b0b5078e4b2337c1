#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>

#include <Eigen/Dense>

#include "bidomain/geometry.hpp"
#include "bidomain/membrane.hpp"
#include "bidomain/noise.hpp"

namespace bidomain {

/// Scaled coefficient state C = (c, sqrt(eps) c_i, sqrt(eps) c_e, a).
/// The unscaled intra/extra coefficients blow up as eps -> 0; the scaled
/// blocks keep the drift and diffusion uniformly assembled.
struct GalerkinState {
    VectorXd c;     // transmembrane coefficients
    VectorXd ci_s;  // sqrt(eps) * intracellular coefficients
    VectorXd ce_s;  // sqrt(eps) * extracellular coefficients
    VectorXd a;     // gating coefficients
    double t = 0.0;

    int n() const { return static_cast<int>(c.size()); }
    static GalerkinState zero(int n);
    VectorXd flat() const;
    static GalerkinState from_flat(const VectorXd& x, double t = 0.0);

    double norm_sq() const {
        return c.squaredNorm() + ci_s.squaredNorm() + ce_s.squaredNorm() + a.squaredNorm();
    }
    /// max_l |c_l - (ci_s_l - ce_s_l)/sqrt(eps)|
    double consistency_gap(double epsilon) const;
};

struct DriftBlocks {
    VectorXd F_ie, F_i, F_e, F_H;
    VectorXd A_i, A_e;  // raw per-equation assemblies, kept for diagnostics
    VectorXd flat() const;
};

/// Rank-one diffusion: the (l,k) entry of each v-channel block is a scaled
/// multiple of p_v[l] * gamma_v[k], and of p_w[l] * gamma_w[k] for the gating
/// block. Blocks scale as (2G, sqrt(eps) G, -sqrt(eps) G, zeta) with
/// G = profile outer gamma / (2 + eps).
struct DiffusionBlocks {
    VectorXd p_v, gamma_v;
    VectorXd p_w, gamma_w;
    double epsilon = 0.0;

    double frobenius_sq() const;
    /// Multiplies the four blocks against one step of increments.
    void apply(const VectorXd& dWv, const VectorXd& dWw, VectorXd& out_c,
               VectorXd& out_ci, VectorXd& out_ce, VectorXd& out_a) const;
};

enum class Stepper { EulerMaruyama, SemiImplicit };

struct RunConfig {
    double dt = 1e-3;
    double T = 1.0;
    Stepper stepper = Stepper::SemiImplicit;
    int snapshot_stride = 1;
    double blowup_threshold = 1e6;
    bool record_noise = false;  // keep per-step projected noise for residuals

    int steps() const;
    void validate() const;
};

struct TrajectoryRecord {
    double dt = 0.0;
    int steps = 0;
    int stride = 1;
    std::uint64_t seed = 0;

    VectorXd times;                 // snapshot times, t=0 included
    MatrixXd c, ci_s, ce_s, a;      // n x snapshots
    VectorXd cum_dissipation;       // int_0^t sum_j u_j^T K_j u_j ds (left point)
    VectorXd cum_grad_i, cum_grad_e;// int_0^t int |grad u_j|^2
    VectorXd cum_l4;                // int_0^t int v^4
    VectorXd cum_membrane_source;   // int_0^t int (w H - v I)

    // per-step projected noise (Gamma dW and zeta dW), recorded on request
    MatrixXd noise_v_proj, noise_w_proj;  // n x steps
    bool has_noise_record = false;

    // running suprema over every integration step
    double sup_v_sq = 0.0, sup_w_sq = 0.0, sup_ui_eps = 0.0, sup_ue_eps = 0.0;

    int snapshots() const { return static_cast<int>(times.size()); }
    GalerkinState state_at(int snap) const;
};

class PathBlowup : public std::runtime_error {
public:
    PathBlowup(int step, double t, double energy);
    int step;
    double t;
    double energy;
};

/// Assembled finite-dimensional system for one (basis, conductivity, membrane,
/// noise, eps) tuple. Immutable after construction; shared across paths.
class GalerkinOperator {
public:
    GalerkinOperator(std::shared_ptr<const BasisSet> basis, MatrixXd K_i, MatrixXd K_e,
                     MembraneModel membrane, NoiseModel noise_v, NoiseModel noise_w,
                     double epsilon);

    const BasisSet& basis() const { return *basis_; }
    std::shared_ptr<const BasisSet> basis_ptr() const { return basis_; }
    const MatrixXd& K_i() const { return K_i_; }
    const MatrixXd& K_e() const { return K_e_; }
    const MembraneModel& membrane() const { return membrane_; }
    const NoiseModel& noise_v() const { return noise_v_; }
    const NoiseModel& noise_w() const { return noise_w_; }
    double epsilon() const { return eps_; }
    int n() const { return basis_->n; }

    DriftBlocks drift(const GalerkinState& s) const;
    DiffusionBlocks diffusion(const GalerkinState& s) const;

    /// Noise profiles <b0 + b1 v, e_l>; additive channels come from the cache.
    VectorXd profile_v(const VectorXd& v_at_quad) const;
    VectorXd profile_w(const VectorXd& v_at_quad) const;

    /// Stiffness-only part of the drift as a 4n x 4n matrix L with
    /// F_linear = -L x; the implicit stepper factorizes I + dt L.
    MatrixXd stiffness_operator() const;

    /// Certified constants for the two solvability conditions.
    double monotonicity_constant() const;  // K_r
    double coercivity_constant() const;    // K

private:
    std::shared_ptr<const BasisSet> basis_;
    MatrixXd K_i_, K_e_;
    MembraneModel membrane_;
    NoiseModel noise_v_, noise_w_;
    double eps_;
    VectorXd additive_profile_v_, additive_profile_w_;  // cached when state-free
};

/// One explicit Euler-Maruyama update C + F dt + G dW.
GalerkinState em_step(const GalerkinState& s, const DriftBlocks& F,
                      const DiffusionBlocks& G, const VectorXd& dWv,
                      const VectorXd& dWw, double dt);

/// Per-run stepping context; owns the implicit factorization when needed.
class PathSolver {
public:
    PathSolver(std::shared_ptr<const GalerkinOperator> op, RunConfig run);

    TrajectoryRecord solve(const GalerkinState& initial, const WienerIncrements& inc) const;
    TrajectoryRecord solve(const GalerkinState& initial, std::uint64_t seed) const;

    const RunConfig& run() const { return run_; }

private:
    std::shared_ptr<const GalerkinOperator> op_;
    RunConfig run_;
    Eigen::PartialPivLU<MatrixXd> lu_;  // I + dt L, semi-implicit only
};

struct MonotonicityReport {
    double I_FM = 0.0;        // diffusion pairing, must be <= 0
    double I_FIH = 0.0;       // membrane pairing
    double lhs = 0.0;         // 2 dF . dC + |dG|^2
    double diff_lip_sq = 0.0; // |dG|^2 / |dC|^2
    double K_r = 0.0;
    double margin = 0.0;      // K_r |dC|^2 - lhs
};

struct CoercivityReport {
    double lhs = 0.0;  // 2 F(C) . C + |G(C)|^2
    double K = 0.0;
    double margin = 0.0;  // K (1 + |C|^2) - lhs
};

MonotonicityReport check_monotonicity(const GalerkinOperator& op, const GalerkinState& C1,
                                      const GalerkinState& C2);
CoercivityReport check_coercivity(const GalerkinOperator& op, const GalerkinState& C);

/// Reduced system dv = [-K_M c - <I>] dt + Gamma dW, dw as in the full model;
/// used as the eps -> 0 reference when M_i is proportional to M_e.
class MonodomainOperator {
public:
    MonodomainOperator(std::shared_ptr<const BasisSet> basis, MatrixXd K_M,
                       MembraneModel membrane, NoiseModel noise_v, NoiseModel noise_w);

    TrajectoryRecord solve(const RunConfig& run, const VectorXd& c0, const VectorXd& a0,
                           const WienerIncrements& inc) const;

    const MatrixXd& K_M() const { return K_M_; }

private:
    std::shared_ptr<const BasisSet> basis_;
    MatrixXd K_M_;
    MembraneModel membrane_;
    NoiseModel noise_v_, noise_w_;
};

}  // namespace bidomain
