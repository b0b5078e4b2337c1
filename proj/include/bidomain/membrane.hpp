#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bidomain {

/// Constants certifying the cubic/gating structure on a symmetric range
/// |v| <= cert_range, produced by dense-grid maximization at construction.
struct StructuralConstants {
    double c_I1 = 0.0;      // |I1(v)| <= c_I1 (1 + |v|^3)
    double c_I_under = 0.5; // I1(v) v >= c_I_under v^4 - c_I2 v^2
    double c_I2 = 0.0;
    double c_I3 = 1.0;      // I2(v) = c_I3 + c_I4 v
    double c_I4 = 0.0;
    double c_H1 = 0.0;      // H(v,w) = h(v) + c_H1 w
    double c_H2 = 0.0;      // |h(v)|^2 <= c_H2 (1 + v^2)
    double C1 = 0.0;        // w H - v I <= -C1 v^4 + C2 (v^2 + w^2) + C3
    double C2 = 0.0;
    double C3 = 0.0;
    double pair_K = 0.0;    // one-sided pairing constant, see pairing_gap()
    double cert_range = 0.0;
};

/// FitzHugh-Nagumo membrane: I(v,w) = v^3 - (1+a) v^2 + a v + w,
/// H(v,w) = eps (kappa v - gamma w). A disabled model short-circuits both
/// to zero for linear test scenarios and carries no certificates.
class MembraneModel {
public:
    bool enabled = true;
    double a = 0.1;
    double eps = 0.01;
    double kappa = 1.0;
    double gamma = 0.5;
    StructuralConstants sc;

    static MembraneModel fitzhugh_nagumo(double a = 0.1, double eps = 0.01,
                                         double kappa = 1.0, double gamma = 0.5,
                                         double cert_range = 10.0);
    static MembraneModel disabled_model();

    double cubic(double v) const {  // I1
        if (!enabled) return 0.0;
        return v * (a + v * (-(1.0 + a) + v));
    }
    double ion_current(double v, double w) const {
        if (!enabled) return 0.0;
        return cubic(v) + w;
    }
    double gating_rhs(double v, double w) const {
        if (!enabled) return 0.0;
        return eps * (kappa * v - gamma * w);
    }

    /// [-C1 v^4 + C2 (v^2+w^2) + C3] - [w H(v,w) - v I(v,w)]; nonnegative on
    /// the certified box.
    double dissipation_bound(double v, double w) const;

    /// pair_K (dv^2 + dw^2) - [(H(v1,w1)-H(v2,w2)) dw - (I(v1,w1)-I(v2,w2)) dv]
    double pairing_gap(double v1, double w1, double v2, double w2) const;

    /// Re-derives the constants by grid search (used at construction).
    void certify(double range, int samples);
};

struct BoundMargin {
    std::string name;
    double margin = 0.0;   // min over the grid, signed
    double at_v = 0.0;     // argmin
    bool ok() const { return margin >= 0.0; }
};

struct StructuralReport {
    std::vector<BoundMargin> bounds;
    bool all_ok() const {
        for (const auto& b : bounds)
            if (!b.ok()) return false;
        return true;
    }
};

/// Evaluates the three (generalized) cubic/gating inequalities with the
/// model's stored constants on a uniform grid over [v_min, v_max].
StructuralReport check_structural_bounds(const MembraneModel& model, double v_min,
                                         double v_max, int samples);

}  // namespace bidomain
