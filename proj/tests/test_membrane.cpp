#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "bidomain/membrane.hpp"

using namespace bidomain;

TEST_CASE("ion current vanishes at the cubic roots and matches direct evaluation") {
    MembraneModel m = MembraneModel::fitzhugh_nagumo(0.1);
    CHECK(m.ion_current(0.0, 0.0) == 0.0);
    CHECK(std::fabs(m.ion_current(1.0, 0.0)) < 1e-15);
    CHECK(std::fabs(m.ion_current(0.1, 0.0)) < 1e-15);
    // I1(0.5) = 0.125 - 1.1*0.25 + 0.05 = -0.1
    CHECK(m.ion_current(0.5, 0.2) == doctest::Approx(0.1).epsilon(1e-13));
}

TEST_CASE("cubic sign pattern certifies the root set {0, a, 1}") {
    MembraneModel m = MembraneModel::fitzhugh_nagumo(0.1);
    // I1 = v (v - a)(v - 1): positive on (0,a) and (1,inf), negative elsewhere
    CHECK(m.cubic(0.05) > 0.0);
    CHECK(m.cubic(0.5) < 0.0);
    CHECK(m.cubic(2.0) > 0.0);
    CHECK(m.cubic(-0.5) < 0.0);
    for (double v = -3.0; v <= 3.0; v += 0.01) {
        const double factored = v * (v - 0.1) * (v - 1.0);
        CHECK(m.cubic(v) == doctest::Approx(factored).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("gating right-hand side") {
    MembraneModel m = MembraneModel::fitzhugh_nagumo(0.1, 0.01, 1.0, 0.5);
    CHECK(m.gating_rhs(0.0, 0.0) == 0.0);
    CHECK(m.gating_rhs(1.0, 0.4) == doctest::Approx(0.008).epsilon(1e-14));
    std::mt19937_64 rng(3);
    for (int i = 0; i < 30; ++i) {
        const double v = 10.0 * ((rng() >> 11) * 0x1.0p-53) - 5.0;
        const double w = 10.0 * ((rng() >> 11) * 0x1.0p-53) - 5.0;
        CHECK(m.gating_rhs(2.0 * v, 2.0 * w) ==
              doctest::Approx(2.0 * m.gating_rhs(v, w)).epsilon(1e-13));
    }
}

TEST_CASE("structural bounds hold with certified constants on a dense grid") {
    MembraneModel m = MembraneModel::fitzhugh_nagumo();
    StructuralReport rep = check_structural_bounds(m, -10.0, 10.0, 10001);
    for (const auto& bound : rep.bounds) {
        INFO(bound.name, " worst margin ", bound.margin, " at v=", bound.at_v);
        CHECK(bound.margin >= 0.0);
    }
    CHECK(rep.all_ok());
}

TEST_CASE("needlessly strong quartic constant is flagged") {
    MembraneModel m = MembraneModel::fitzhugh_nagumo();
    m.sc.c_I_under = 2.0;  // v^4 < 2 v^4 at large |v|
    StructuralReport rep = check_structural_bounds(m, -10.0, 10.0, 2001);
    bool coercivity_violated = false;
    for (const auto& bound : rep.bounds)
        if (bound.name == "cubic_coercivity" && bound.margin < 0.0) coercivity_violated = true;
    CHECK(coercivity_violated);
    CHECK_FALSE(rep.all_ok());
}

TEST_CASE("degenerate range {0} leaves all margins nonnegative") {
    MembraneModel m = MembraneModel::fitzhugh_nagumo();
    StructuralReport rep = check_structural_bounds(m, 0.0, 0.0, 2);
    CHECK(rep.all_ok());
}

TEST_CASE("dissipation bound is nonnegative over the certified box") {
    MembraneModel m = MembraneModel::fitzhugh_nagumo();
    CHECK(m.dissipation_bound(0.0, 0.0) == doctest::Approx(m.sc.C3));
    CHECK(m.sc.C3 >= 0.0);
    CHECK(m.sc.C1 > 0.0);

    SUBCASE("dense (v,w) grid in [-5,5]^2") {
        for (int i = 0; i <= 100; ++i)
            for (int j = 0; j <= 100; ++j) {
                const double v = -5.0 + 0.1 * i;
                const double w = -5.0 + 0.1 * j;
                CHECK(m.dissipation_bound(v, w) >= 0.0);
            }
    }
    SUBCASE("w = 0 section") {
        for (int i = 0; i <= 2000; ++i) {
            const double v = -10.0 + 0.01 * i;
            CHECK(m.dissipation_bound(v, 0.0) >= 0.0);
        }
    }
}

TEST_CASE("one-sided pairing gap is nonnegative on random pairs") {
    MembraneModel m = MembraneModel::fitzhugh_nagumo();
    std::mt19937_64 rng(17);
    auto unif = [&rng](double r) { return 2.0 * r * ((rng() >> 11) * 0x1.0p-53) - r; };
    for (int i = 0; i < 10000; ++i) {
        const double gap = m.pairing_gap(unif(5.0), unif(5.0), unif(5.0), unif(5.0));
        CHECK(gap >= 0.0);
    }
}

TEST_CASE("parameter validation and disabled model") {
    CHECK_THROWS_AS(MembraneModel::fitzhugh_nagumo(0.0), std::invalid_argument);
    CHECK_THROWS_AS(MembraneModel::fitzhugh_nagumo(1.5), std::invalid_argument);
    CHECK_THROWS_AS(MembraneModel::fitzhugh_nagumo(0.1, 0.0), std::invalid_argument);

    MembraneModel off = MembraneModel::disabled_model();
    CHECK(off.ion_current(2.0, 3.0) == 0.0);
    CHECK(off.gating_rhs(2.0, 3.0) == 0.0);
    CHECK_THROWS_AS(off.dissipation_bound(1.0, 1.0), std::logic_error);
    CHECK_THROWS_AS(check_structural_bounds(off, -1.0, 1.0, 10), std::logic_error);
}

TEST_CASE("certified constants beat an independent coarse-grid derivation") {
    // the test's own brute-force pass over a coarser grid must never demand
    // larger constants than the ones the model certified
    MembraneModel m = MembraneModel::fitzhugh_nagumo();
    double own_cI1 = 0.0, own_cI2 = 0.0, own_C2 = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        const double v = -10.0 + 0.005 * i;
        const double i1 = v * (v - m.a) * (v - 1.0);
        own_cI1 = std::max(own_cI1, std::fabs(i1) / (1.0 + std::fabs(v * v * v)));
        if (v != 0.0) own_cI2 = std::max(own_cI2, (0.5 * v * v * v * v - i1 * v) / (v * v));
    }
    for (int i = 0; i <= 400; ++i)
        for (int j = 0; j <= 400; ++j) {
            const double v = -10.0 + 0.05 * i;
            const double w = -10.0 + 0.05 * j;
            if (v == 0.0 && w == 0.0) continue;
            const double lhs = w * m.gating_rhs(v, w) - v * m.ion_current(v, w);
            own_C2 = std::max(own_C2, (lhs + 0.5 * v * v * v * v) / (v * v + w * w));
        }
    CHECK(m.sc.c_I1 >= own_cI1);
    CHECK(m.sc.c_I2 >= own_cI2);
    CHECK(m.sc.C2 >= own_C2);
}
