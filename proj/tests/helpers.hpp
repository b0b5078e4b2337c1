#pragma once

#include <cmath>
#include <random>

#include "bidomain/config.hpp"
#include "bidomain/galerkin.hpp"
#include "bidomain/geometry.hpp"

namespace testutil {

constexpr double kPi = 3.14159265358979323846;

inline bidomain::Domain interval_dn(double L = 1.0) {
    bidomain::Domain d;
    d.dim = 1;
    d.lengths = {L, 1.0};
    d.bc[0] = {bidomain::Bc::Dirichlet, bidomain::Bc::Neumann};
    return d;
}

inline bidomain::Domain rectangle_mixed(double Lx = 1.0, double Ly = 1.0) {
    bidomain::Domain d;
    d.dim = 2;
    d.lengths = {Lx, Ly};
    d.bc[0] = {bidomain::Bc::Dirichlet, bidomain::Bc::Neumann};
    d.bc[1] = {bidomain::Bc::Neumann, bidomain::Bc::Neumann};
    return d;
}

inline bidomain::ConductivityField unit_conductivity() {
    bidomain::ConductivityField f;
    f.sigma_l_i = f.sigma_t_i = f.sigma_l_e = f.sigma_t_e = 1.0;
    return f;
}

// consistent random state (c matches the scaled blocks exactly)
inline bidomain::GalerkinState random_state(int n, double epsilon, std::uint64_t seed,
                                            double radius = 1.0) {
    std::mt19937_64 rng(seed);
    auto unif = [&rng] { return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0; };
    bidomain::GalerkinState s = bidomain::GalerkinState::zero(n);
    for (int l = 0; l < n; ++l) {
        s.ci_s(l) = radius * unif();
        s.ce_s(l) = radius * unif();
        s.a(l) = radius * unif();
    }
    const double se = std::sqrt(epsilon);
    s.c = (s.ci_s - s.ce_s) / se;
    return s;
}

// same but rescaled so the flat vector lies inside a ball
inline bidomain::GalerkinState random_state_in_ball(int n, double epsilon, std::uint64_t seed,
                                                    double ball_radius) {
    bidomain::GalerkinState s = random_state(n, epsilon, seed, 1.0);
    std::mt19937_64 rng(seed ^ 0x5bd1e995u);
    const double target = ball_radius * ((rng() >> 11) * 0x1.0p-53);
    const double norm = std::sqrt(s.flat().squaredNorm());
    const double f = norm > 0 ? target / norm : 0.0;
    s.ci_s *= f;
    s.ce_s *= f;
    s.a *= f;
    s.c = (s.ci_s - s.ce_s) / std::sqrt(epsilon);
    return s;
}

}  // namespace testutil
