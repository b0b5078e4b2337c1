#include <doctest.h>

#include <cmath>
#include <set>

#include "bidomain/noise.hpp"
#include "helpers.hpp"

using namespace bidomain;

TEST_CASE("increment sampling is reproducible and stream-separated") {
    WienerIncrements a = sample_increments(4, 100, 1e-3, 42);
    WienerIncrements b = sample_increments(4, 100, 1e-3, 42);
    CHECK(a.dW_v == b.dW_v);
    CHECK(a.dW_w == b.dW_w);
    CHECK(a.dW_v != a.dW_w);

    WienerIncrements c = sample_increments(4, 100, 1e-3, 43);
    CHECK(a.dW_v != c.dW_v);
}

TEST_CASE("a truncation level is a prefix of the next one") {
    WienerIncrements small = sample_increments(4, 50, 1e-3, 7);
    WienerIncrements big = sample_increments(16, 50, 1e-3, 7);
    CHECK(big.dW_v.topRows(4) == small.dW_v);
    CHECK(big.dW_w.topRows(4) == small.dW_w);
}

TEST_CASE("increment marginals: mean, variance, and cross-channel independence") {
    const int n = 100, steps = 1000;  // 1e5 draws per channel
    const double dt = 1e-3;
    WienerIncrements inc = sample_increments(n, steps, dt, 7);
    const double N = static_cast<double>(n) * steps;

    const double mean_v = inc.dW_v.mean();
    CHECK(std::fabs(mean_v) <= 4.0 * std::sqrt(dt / N));

    const double var_v = inc.dW_v.cwiseAbs2().mean();
    CHECK(std::fabs(var_v - dt) <= 5.0 * dt * std::sqrt(2.0 / N));

    // correlation between matched entries of the two channels
    double corr = (inc.dW_v.cwiseProduct(inc.dW_w)).mean() / dt;
    CHECK(std::fabs(corr) <= 4.0 / std::sqrt(N));

    // disjoint-step independence within one channel (lag-1 autocorrelation)
    double lag = 0.0;
    for (int s = 0; s + 1 < steps; ++s) lag += inc.dW_v.col(s).dot(inc.dW_v.col(s + 1));
    lag /= (N - n) * dt;
    CHECK(std::fabs(lag) <= 4.0 / std::sqrt(N - n));
}

TEST_CASE("Hilbert-Schmidt norm: closed forms and homogeneity") {
    BasisSet basis = build_basis(testutil::interval_dn(2.0), 6);  // |Omega| = 2

    SUBCASE("multiplicative noise vanishes at v = 0") {
        NoiseModel nm = NoiseModel::multiplicative(0.7, 6);
        CHECK(nm.hs_norm_sq(basis, VectorXd::Zero(6)) == 0.0);
    }
    SUBCASE("additive noise matches |Omega| s0^2 sum 1/k^2") {
        NoiseModel nm = NoiseModel::additive(0.5, 6);
        double partial = 0.0;
        for (int k = 1; k <= 6; ++k) partial += 1.0 / (static_cast<double>(k) * k);
        const double expect = 2.0 * 0.25 * partial;
        CHECK(nm.hs_norm_sq(basis, VectorXd::Zero(6)) ==
              doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("doubling v quadruples the pure-multiplicative norm") {
        NoiseModel nm = NoiseModel::multiplicative(0.7, 6);
        VectorXd v = VectorXd::LinSpaced(6, -1.0, 1.0);
        const double one = nm.hs_norm_sq(basis, v);
        const double two = nm.hs_norm_sq(basis, 2.0 * v);
        CHECK(two == doctest::Approx(4.0 * one).epsilon(1e-13));
    }
    SUBCASE("truncation monotonicity") {
        NoiseModel nm = NoiseModel::mixed(0.4, 6, 1.0, 0.5);
        VectorXd v = VectorXd::LinSpaced(6, -0.5, 1.5);
        double prev = 0.0;
        for (int tr = 1; tr <= 6; ++tr) {
            const double cur = nm.hs_norm_sq_truncated_to(basis, v, tr);
            CHECK(cur >= prev);
            prev = cur;
        }
    }
}

TEST_CASE("growth and Lipschitz certificates hold for the affine family") {
    NoiseModel nm = NoiseModel::mixed(0.8, 16, 0.7, 1.3);
    const double C = nm.growth_constant();
    std::mt19937_64 rng(5);
    auto unif = [&rng](double r) { return 2.0 * r * ((rng() >> 11) * 0x1.0p-53) - r; };
    for (int i = 0; i < 10000; ++i) {
        const double v = unif(50.0);
        double sum = 0.0;
        for (int k = 0; k < nm.truncation; ++k) sum += nm.beta(k, v) * nm.beta(k, v);
        CHECK(sum <= C * (1.0 + v * v));

        const double v2 = unif(50.0);
        double lip = 0.0;
        for (int k = 0; k < nm.truncation; ++k) {
            const double d = nm.beta(k, v) - nm.beta(k, v2);
            lip += d * d;
        }
        CHECK(lip <= C * (v - v2) * (v - v2) * (1.0 + 1e-12));
    }
}

TEST_CASE("auxiliary-space norm") {
    SUBCASE("zero sequence") {
        CHECK(u0_norm_default(VectorXd::Zero(5)) == 0.0);
    }
    SUBCASE("three unit coefficients with b_k = 1/k give 7/6") {
        VectorXd a = VectorXd::Ones(3);
        CHECK(u0_norm_default(a) == doctest::Approx(7.0 / 6.0).epsilon(1e-14));
    }
    SUBCASE("homogeneity") {
        VectorXd a = VectorXd::LinSpaced(8, 0.1, 2.0);
        CHECK(u0_norm_default(2.0 * a) == doctest::Approx(2.0 * u0_norm_default(a)));
    }
    SUBCASE("zero weights rejected") {
        VectorXd a = VectorXd::Ones(2), b = VectorXd::Zero(2);
        CHECK_THROWS_AS(u0_norm(a, b), std::invalid_argument);
    }
    SUBCASE("truncated cylindrical sums stay bounded in the auxiliary norm") {
        // ||W^n(t)||_{U0}^2 has expectation t sum_{k<=n} 1/k^2 <= t pi^2/6
        const double dt = 0.01;
        const int steps = 100, n = 64;
        WienerIncrements inc = sample_increments(n, steps, dt, 11);
        VectorXd W = VectorXd::Zero(n);
        double max_u0 = 0.0;
        for (int s = 0; s < steps; ++s) {
            W += inc.dW_v.col(s);
            max_u0 = std::max(max_u0, u0_norm_default(W));
        }
        CHECK(max_u0 < 10.0 * std::sqrt(1.0 * 1.6449));  // generous tail bound
    }
}

TEST_CASE("seed derivation is injective over small index ranges") {
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 4096; ++i) CHECK(seen.insert(derive_seed(99, i)).second);
    CHECK(derive_stream(123, 0) != derive_stream(123, 1));
}
