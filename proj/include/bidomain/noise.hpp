#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "bidomain/geometry.hpp"

namespace bidomain {

// ---------------------------------------------------------------------------
// Seeding scheme (stable contract, documented for replay):
//   mix(x)            = splitmix64 finalizer
//   derive_seed(s, i) = mix(s + GOLDEN * (i + 1))       (per-path / per-pair)
//   derive_stream(s, t) = mix(s ^ (STREAM_SALT * (t+1)))  (substreams)
// Streams: 0 = W^v, 1 = W^w, 2 = initial-data perturbation. Mode k of a
// channel then draws from derive_stream(channel_stream, k), so the level-n
// truncation of the noise is a prefix of every higher level.
// Normals come from mt19937_64 + Box-Muller on 53-bit uniforms in (0,1]:
//   u = ((rng() >> 11) + 1) * 2^-53,   z0 = sqrt(-2 ln u1) cos(2 pi u2),
//   z1 = sqrt(-2 ln u1) sin(2 pi u2).
// ---------------------------------------------------------------------------

std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream);

constexpr std::uint64_t kStreamV = 0;
constexpr std::uint64_t kStreamW = 1;
constexpr std::uint64_t kStreamInit = 2;

/// Deterministic standard-normal source (pairwise Box-Muller).
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}
    double next();

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Square-summable amplitude family beta_k(v) = gamma_k (b0 + b1 v) with
/// gamma_k = s0 / k; covers additive (b1 = 0), conductance-type multiplicative
/// (b0 = 0) and mixed noise. The growth/Lipschitz constant
/// C_beta = 2 (b0^2 + b1^2) s0^2 pi^2/6 is stored for the full series.
class NoiseModel {
public:
    enum class Kind { Additive, MultiplicativeAffine };

    Kind kind = Kind::Additive;
    double s0 = 0.0;
    double b0 = 1.0;
    double b1 = 0.0;
    int truncation = 0;

    static NoiseModel additive(double s0, int truncation, double b0 = 1.0);
    static NoiseModel multiplicative(double s0, int truncation, double b1 = 1.0);
    static NoiseModel mixed(double s0, int truncation, double b0, double b1);
    static NoiseModel off(int truncation) { return additive(0.0, truncation); }

    bool is_zero() const { return s0 == 0.0 || (b0 == 0.0 && b1 == 0.0); }
    bool state_dependent() const { return b1 != 0.0 && s0 != 0.0; }

    double gamma(int k) const { return s0 / static_cast<double>(k + 1); }  // k 0-based
    VectorXd gamma_vector() const;
    double gamma_sq_truncated() const;
    double gamma_sq_full() const;  // s0^2 pi^2 / 6
    double growth_constant() const;  // C_beta

    double beta(int k, double v) const { return gamma(k) * (b0 + b1 * v); }

    /// Coefficients p_l = <b0 + b1 v, e_l> from tabulated v samples at the
    /// quadrature nodes; the diffusion entries are beta_{k,l} = gamma_k p_l.
    VectorXd profile(const BasisSet& basis, const VectorXd& v_at_quad) const;
    VectorXd profile_from_coeffs(const BasisSet& basis, const VectorXd& v_coeffs) const;

    /// sum_{k <= truncation} ||beta_k(v(.))||_{L2}^2 by quadrature.
    double hs_norm_sq(const BasisSet& basis, const VectorXd& v_coeffs) const;
    double hs_norm_sq_truncated_to(const BasisSet& basis, const VectorXd& v_coeffs,
                                   int trunc) const;
};

/// Pre-sampled N(0, dt) increments for both channels, n modes x steps.
struct WienerIncrements {
    double dt = 0.0;
    std::uint64_t seed = 0;
    MatrixXd dW_v;  // n x steps
    MatrixXd dW_w;  // n x steps

    int modes() const { return static_cast<int>(dW_v.rows()); }
    int steps() const { return static_cast<int>(dW_v.cols()); }
};

WienerIncrements sample_increments(int n, int steps, double dt, std::uint64_t seed);

/// Weighted-sequence norm (sum a_k^2 b_k^2)^(1/2); diagnostic for the
/// convergence of truncated cylindrical sums in the auxiliary space.
double u0_norm(const VectorXd& coeffs, const VectorXd& weights);
double u0_norm_default(const VectorXd& coeffs);  // b_k = 1/k

}  // namespace bidomain
