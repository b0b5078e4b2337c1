#include <doctest.h>

#include <cmath>
#include <random>

#include "bidomain/geometry.hpp"
#include "helpers.hpp"

using namespace bidomain;
using testutil::kPi;

TEST_CASE("1D Dirichlet-Neumann eigenpairs match the closed form") {
    BasisSet b = build_basis(testutil::interval_dn(), 2);

    // sqrt(2) sin((p - 1/2) pi x), lambda = ((p - 1/2) pi)^2
    CHECK(b.eigenvalues(0) == doctest::Approx(kPi * kPi / 4.0).epsilon(1e-14));
    CHECK(b.eigenvalues(1) == doctest::Approx(9.0 * kPi * kPi / 4.0).epsilon(1e-14));
    CHECK(b.eigenvalues(0) == doctest::Approx(2.4674011002723395).epsilon(1e-12));
    CHECK(b.eigenvalues(1) == doctest::Approx(22.206609902451056).epsilon(1e-12));

    for (double x : {0.1, 0.37, 0.99}) {
        CHECK(b.mode_value(0, &x) ==
              doctest::Approx(std::sqrt(2.0) * std::sin(kPi * x / 2.0)).epsilon(1e-13));
    }

    // gradient Gram is diag(lambda) to quadrature tolerance
    const int Q = b.quad.size();
    double g12 = 0.0, g11 = 0.0;
    for (int q = 0; q < Q; ++q) {
        g12 += b.quad.weights(q) * b.gradients[0](0, q) * b.gradients[0](1, q);
        g11 += b.quad.weights(q) * b.gradients[0](0, q) * b.gradients[0](0, q);
    }
    CHECK(std::fabs(g12) < 1e-10);
    CHECK(g11 == doctest::Approx(b.eigenvalues(0)).epsilon(1e-12));
}

TEST_CASE("mass matrix is the identity to 1e-10") {
    SUBCASE("1D n=16") {
        BasisSet b = build_basis(testutil::interval_dn(), 16);
        MatrixXd M = b.mass_matrix();
        CHECK((M - MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("2D n=12 mixed faces") {
        BasisSet b = build_basis(testutil::rectangle_mixed(1.0, 1.4), 12);
        MatrixXd M = b.mass_matrix();
        CHECK((M - MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("build_basis rejects bad input") {
    CHECK_THROWS_AS(build_basis(testutil::interval_dn(), 0), std::invalid_argument);
    Domain all_neumann;
    all_neumann.dim = 1;
    all_neumann.bc[0] = {Bc::Neumann, Bc::Neumann};
    CHECK_THROWS_AS(build_basis(all_neumann, 4), std::invalid_argument);
    Domain bad_len = testutil::interval_dn();
    bad_len.lengths[0] = 0.0;
    CHECK_THROWS_AS(build_basis(bad_len, 4), std::invalid_argument);
}

TEST_CASE("2D modes are ordered by eigenvalue with lexicographic ties") {
    Domain d;
    d.dim = 2;
    d.lengths = {1.0, 1.0};
    d.bc[0] = {Bc::Dirichlet, Bc::Neumann};
    d.bc[1] = {Bc::Dirichlet, Bc::Neumann};  // symmetric axes force ties
    BasisSet b = build_basis(d, 8);
    for (int l = 0; l + 1 < b.n; ++l) {
        CHECK(b.eigenvalues(l) <= b.eigenvalues(l + 1) + 1e-12);
        if (b.eigenvalues(l) == b.eigenvalues(l + 1))
            CHECK(b.modes[l] < b.modes[l + 1]);
    }
}

TEST_CASE("basis vanishes on the Dirichlet part of the boundary") {
    BasisSet b = build_basis(testutil::rectangle_mixed(), 6);
    VectorXd coeffs = VectorXd::Ones(6);
    MatrixXd pts(3, 2);
    pts << 0.0, 0.3, 0.0, 0.7, 0.0, 1.0;  // x = 0 is the Dirichlet face
    VectorXd vals = b.evaluate(coeffs, pts);
    CHECK(vals.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("stiffness with unit conductivity reproduces diag(lambda)") {
    BasisSet b = build_basis(testutil::interval_dn(), 8);
    MatrixXd K = assemble_stiffness(b, testutil::unit_conductivity(), Tissue::Intra);
    MatrixXd D = b.eigenvalues.asDiagonal();
    CHECK((K - D).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("stiffness is exactly symmetric and bilinear in the conductivity") {
    BasisSet b = build_basis(testutil::rectangle_mixed(), 10);
    ConductivityField f;
    f.kind = ConductivityField::Kind::Axisymmetric;
    f.sigma_l_i = 2.0;
    f.sigma_t_i = 0.5;
    f.sigma_l_e = 1.0;
    f.sigma_t_e = 0.25;
    f.fiber_angle = 0.4;
    f.fiber_twist = 0.8;
    MatrixXd K = assemble_stiffness(b, f, Tissue::Intra);
    CHECK((K - K.transpose()).cwiseAbs().maxCoeff() == 0.0);

    ConductivityField f2 = f;
    f2.sigma_l_i *= 2.0;
    f2.sigma_t_i *= 2.0;
    MatrixXd K2 = assemble_stiffness(b, f2, Tissue::Intra);
    CHECK((K2 - 2.0 * K).cwiseAbs().maxCoeff() < 1e-13 * K.cwiseAbs().maxCoeff());
}

TEST_CASE("2D diagonal anisotropy has a closed-form stiffness") {
    // constant axis-aligned conductivity: K = diag(sl * mu_x + st * mu_y)
    const double Lx = 1.0, Ly = 1.4;
    BasisSet b = build_basis(testutil::rectangle_mixed(Lx, Ly), 12);
    ConductivityField f = testutil::unit_conductivity();
    f.sigma_l_i = 2.0;
    f.sigma_t_i = 0.5;
    MatrixXd K = assemble_stiffness(b, f, Tissue::Intra);
    for (int l = 0; l < b.n; ++l) {
        const int p = b.modes[l][0] + 1;  // Dirichlet-Neumann axis, 1-based
        const int q = b.modes[l][1];      // Neumann-Neumann axis, 0-based
        const double mux = std::pow((p - 0.5) * kPi / Lx, 2);
        const double muy = std::pow(q * kPi / Ly, 2);
        CHECK(K(l, l) == doctest::Approx(2.0 * mux + 0.5 * muy).epsilon(1e-9));
        for (int m = 0; m < b.n; ++m)
            if (m != l) CHECK(std::fabs(K(l, m)) < 1e-9);
    }
}

TEST_CASE("stiffness sandwich m lambda <= K <= M lambda on random directions") {
    BasisSet b = build_basis(testutil::rectangle_mixed(), 12);
    ConductivityField f;
    f.kind = ConductivityField::Kind::Axisymmetric;
    f.sigma_l_i = 3.0;
    f.sigma_t_i = 0.5;
    f.sigma_l_e = 2.0;
    f.sigma_t_e = 1.0;
    f.fiber_angle = 0.3;
    const double m = f.ellipticity_lower();
    const double M = f.ellipticity_upper();
    CHECK(m == 0.5);
    CHECK(M == 3.0);

    for (Tissue which : {Tissue::Intra, Tissue::Extra}) {
        MatrixXd K = assemble_stiffness(b, f, which);
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 50; ++trial) {
            VectorXd xi(12);
            for (int i = 0; i < 12; ++i) xi(i) = 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
            const double quad = xi.dot(K * xi);
            const double lam = b.eigenvalues.dot(xi.cwiseAbs2());
            CHECK(quad >= m * lam * (1.0 - 1e-9));
            CHECK(quad <= M * lam * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("projection recovers coefficients of basis combinations") {
    BasisSet b = build_basis(testutil::interval_dn(), 5);

    SUBCASE("f = e_2 gives the unit vector in slot 2") {
        VectorXd p = b.project([](const double* x) {
            return std::sqrt(2.0) * std::sin(1.5 * kPi * x[0]);
        });
        for (int l = 0; l < 5; ++l)
            CHECK(p(l) == doctest::Approx(l == 1 ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
    }
    SUBCASE("f = 0 gives the zero vector") {
        VectorXd p = b.project([](const double*) { return 0.0; });
        CHECK(p.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("f = 3 e_1 - 5 e_3 gives (3,0,-5,0,0)") {
        VectorXd p = b.project([](const double* x) {
            return 3.0 * std::sqrt(2.0) * std::sin(0.5 * kPi * x[0]) -
                   5.0 * std::sqrt(2.0) * std::sin(2.5 * kPi * x[0]);
        });
        VectorXd expect(5);
        expect << 3.0, 0.0, -5.0, 0.0, 0.0;
        CHECK((p - expect).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("projection is idempotent through evaluate") {
        VectorXd coeffs(5);
        coeffs << 0.3, -1.2, 0.05, 2.0, -0.7;
        VectorXd again = b.project([&](const double* x) {
            double s = 0.0;
            for (int l = 0; l < 5; ++l) s += coeffs(l) * b.mode_value(l, x);
            return s;
        });
        CHECK((again - coeffs).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("evaluate matches closed forms and validates lengths") {
    BasisSet b = build_basis(testutil::interval_dn(), 3);
    VectorXd coeffs = VectorXd::Zero(3);
    coeffs(0) = 1.0;
    MatrixXd pts(2, 1);
    pts << 0.25, 0.8;
    VectorXd vals = b.evaluate(coeffs, pts);
    CHECK(vals(0) == doctest::Approx(std::sqrt(2.0) * std::sin(kPi * 0.25 / 2.0)));
    CHECK(vals(1) == doctest::Approx(std::sqrt(2.0) * std::sin(kPi * 0.8 / 2.0)));

    CHECK(b.evaluate(VectorXd::Zero(3), pts).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(b.evaluate(VectorXd::Zero(4), pts), std::invalid_argument);
}

TEST_CASE("Gram identity (Parseval at truncation level)") {
    BasisSet b = build_basis(testutil::rectangle_mixed(1.3, 0.9), 10);
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        VectorXd u(10);
        for (int i = 0; i < 10; ++i) u(i) = 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
        VectorXd uq = b.evaluate_at_quad(u);
        const double integral = b.quad.weights.dot(uq.cwiseAbs2());
        CHECK(integral == doctest::Approx(u.squaredNorm()).epsilon(1e-8));
    }
}

TEST_CASE("Poincare inequality is exact in the eigenbasis") {
    BasisSet b = build_basis(testutil::interval_dn(), 12);
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 20; ++trial) {
        VectorXd u(12);
        for (int i = 0; i < 12; ++i) u(i) = 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
        const double h1 = b.eigenvalues.dot(u.cwiseAbs2());
        CHECK(u.squaredNorm() <= h1 / b.eigenvalues(0) + 1e-12);
    }
}

TEST_CASE("all four axis boundary families are orthonormal with correct traces") {
    struct Case {
        Bc low, high;
        bool zero_low, zero_high;
    };
    const Case cases[] = {{Bc::Dirichlet, Bc::Dirichlet, true, true},
                          {Bc::Dirichlet, Bc::Neumann, true, false},
                          {Bc::Neumann, Bc::Dirichlet, false, true},
                          {Bc::Neumann, Bc::Neumann, false, false}};
    for (const auto& cs : cases) {
        Domain d;
        d.dim = 2;
        d.lengths = {1.3, 1.0};
        d.bc[0] = {cs.low, cs.high};
        d.bc[1] = {Bc::Dirichlet, Bc::Neumann};  // keeps the Dirichlet part nonempty
        BasisSet b = build_basis(d, 10);
        CHECK((b.mass_matrix() - MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-10);
        for (int l = 0; l < b.n; ++l) {
            double lo[2] = {0.0, 0.4}, hi[2] = {1.3, 0.4};
            if (cs.zero_low) CHECK(std::fabs(b.mode_value(l, lo)) < 1e-12);
            if (cs.zero_high) CHECK(std::fabs(b.mode_value(l, hi)) < 1e-12);
        }
        // eigenvalues are nonnegative and sorted
        CHECK(b.eigenvalues(0) >= 0.0);
        for (int l = 0; l + 1 < b.n; ++l) CHECK(b.eigenvalues(l) <= b.eigenvalues(l + 1));
    }
}

TEST_CASE("pure-Neumann axis keeps its constant mode") {
    Domain d;
    d.dim = 2;
    d.lengths = {1.0, 2.0};
    d.bc[0] = {Bc::Dirichlet, Bc::Neumann};
    d.bc[1] = {Bc::Neumann, Bc::Neumann};
    BasisSet b = build_basis(d, 4);
    // lowest mode is constant along y: value independent of y
    double p1[2] = {0.3, 0.2}, p2[2] = {0.3, 1.7};
    CHECK(b.mode_value(0, p1) == doctest::Approx(b.mode_value(0, p2)).epsilon(1e-13));
}

TEST_CASE("1D conductivity reduces to the longitudinal coefficient") {
    Domain d = testutil::interval_dn();
    ConductivityField f;
    f.kind = ConductivityField::Kind::Axisymmetric;
    f.sigma_l_i = 2.5;
    f.sigma_t_i = 0.4;  // ignored in 1D
    double x[1] = {0.3};
    CHECK(f.tensor(Tissue::Intra, d, x)(0, 0) == 2.5);
}

TEST_CASE("axisymmetric fiber field is unit length everywhere") {
    ConductivityField f;
    f.kind = ConductivityField::Kind::Axisymmetric;
    f.fiber_angle = 0.7;
    f.fiber_twist = 2.0;
    Domain d = testutil::rectangle_mixed();
    for (double x = 0.0; x <= 1.0; x += 0.1) {
        double p[2] = {x, 0.5};
        CHECK(f.fiber(d, p).norm() == doctest::Approx(1.0).epsilon(1e-14));
        Eigen::Matrix2d M = f.tensor(Tissue::Extra, d, p);
        CHECK((M - M.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}
