#include "bidomain/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace bidomain {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ull;
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master + kGolden * (index + 1));
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed ^ (kStreamSalt * (stream + 1)));
}

double NormalSampler::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    const double u2 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
}

NoiseModel NoiseModel::additive(double s0, int truncation, double b0) {
    NoiseModel m;
    m.kind = Kind::Additive;
    m.s0 = s0;
    m.b0 = b0;
    m.b1 = 0.0;
    m.truncation = truncation;
    return m;
}

NoiseModel NoiseModel::multiplicative(double s0, int truncation, double b1) {
    NoiseModel m;
    m.kind = Kind::MultiplicativeAffine;
    m.s0 = s0;
    m.b0 = 0.0;
    m.b1 = b1;
    m.truncation = truncation;
    return m;
}

NoiseModel NoiseModel::mixed(double s0, int truncation, double b0, double b1) {
    NoiseModel m;
    m.kind = Kind::MultiplicativeAffine;
    m.s0 = s0;
    m.b0 = b0;
    m.b1 = b1;
    m.truncation = truncation;
    return m;
}

VectorXd NoiseModel::gamma_vector() const {
    VectorXd g(truncation);
    for (int k = 0; k < truncation; ++k) g(k) = gamma(k);
    return g;
}

double NoiseModel::gamma_sq_truncated() const {
    double s = 0.0;
    for (int k = 0; k < truncation; ++k) s += gamma(k) * gamma(k);
    return s;
}

double NoiseModel::gamma_sq_full() const { return s0 * s0 * kPi * kPi / 6.0; }

double NoiseModel::growth_constant() const {
    return 2.0 * (b0 * b0 + b1 * b1) * gamma_sq_full();
}

VectorXd NoiseModel::profile(const BasisSet& basis, const VectorXd& v_at_quad) const {
    if (v_at_quad.size() != basis.quad.size())
        throw std::invalid_argument("noise: quadrature sample size mismatch");
    VectorXd shape = (b0 * VectorXd::Ones(v_at_quad.size()) + b1 * v_at_quad);
    return basis.values * basis.quad.weights.cwiseProduct(shape);
}

VectorXd NoiseModel::profile_from_coeffs(const BasisSet& basis,
                                         const VectorXd& v_coeffs) const {
    return profile(basis, basis.evaluate_at_quad(v_coeffs));
}

double NoiseModel::hs_norm_sq_truncated_to(const BasisSet& basis,
                                           const VectorXd& v_coeffs, int trunc) const {
    VectorXd vq = basis.evaluate_at_quad(v_coeffs);
    double shape_sq = 0.0;
    for (int q = 0; q < basis.quad.size(); ++q) {
        const double s = b0 + b1 * vq(q);
        shape_sq += basis.quad.weights(q) * s * s;
    }
    double gsum = 0.0;
    for (int k = 0; k < trunc; ++k) gsum += gamma(k) * gamma(k);
    return gsum * shape_sq;
}

double NoiseModel::hs_norm_sq(const BasisSet& basis, const VectorXd& v_coeffs) const {
    return hs_norm_sq_truncated_to(basis, v_coeffs, truncation);
}

WienerIncrements sample_increments(int n, int steps, double dt, std::uint64_t seed) {
    if (n < 1 || steps < 1) throw std::invalid_argument("sample_increments: n, steps >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("sample_increments: dt > 0");
    WienerIncrements inc;
    inc.dt = dt;
    inc.seed = seed;
    inc.dW_v.resize(n, steps);
    inc.dW_w.resize(n, steps);
    const double sd = std::sqrt(dt);
    // one substream per (channel, mode): the level-n truncation is a prefix
    // of the same fixed mode sequence, so basis ladders share their W_k
    const std::uint64_t sv = derive_stream(seed, kStreamV);
    const std::uint64_t sw = derive_stream(seed, kStreamW);
    for (int k = 0; k < n; ++k) {
        NormalSampler zv(derive_stream(sv, k));
        NormalSampler zw(derive_stream(sw, k));
        for (int s = 0; s < steps; ++s) {
            inc.dW_v(k, s) = sd * zv.next();
            inc.dW_w(k, s) = sd * zw.next();
        }
    }
    return inc;
}

double u0_norm(const VectorXd& coeffs, const VectorXd& weights) {
    if (coeffs.size() > weights.size())
        throw std::invalid_argument("u0_norm: weight sequence too short");
    double s = 0.0;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
        if (weights(k) == 0.0) throw std::invalid_argument("u0_norm: weights must be nonzero");
        s += coeffs(k) * coeffs(k) * weights(k) * weights(k);
    }
    return std::sqrt(s);
}

double u0_norm_default(const VectorXd& coeffs) {
    VectorXd w(coeffs.size());
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) w(k) = 1.0 / static_cast<double>(k + 1);
    return u0_norm(coeffs, w);
}

}  // namespace bidomain
