#include "bidomain/membrane.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bidomain {

namespace {
// relative headroom on grid-derived suprema
constexpr double kSlack = 1e-9;

double padded(double sup) { return sup * (1.0 + kSlack) + 1e-12; }
}  // namespace

MembraneModel MembraneModel::fitzhugh_nagumo(double a, double eps, double kappa,
                                             double gamma, double cert_range) {
    if (!(a > 0.0 && a < 1.0))
        throw std::invalid_argument("membrane: excitation threshold a must lie in (0,1)");
    if (!(eps > 0.0) || !(kappa >= 0.0) || !(gamma >= 0.0))
        throw std::invalid_argument("membrane: eps must be positive, kappa and gamma nonnegative");
    MembraneModel m;
    m.enabled = true;
    m.a = a;
    m.eps = eps;
    m.kappa = kappa;
    m.gamma = gamma;
    m.certify(cert_range, 20001);
    return m;
}

MembraneModel MembraneModel::disabled_model() {
    MembraneModel m;
    m.enabled = false;
    m.sc = StructuralConstants{};
    m.sc.c_I_under = 0.0;
    m.sc.c_I3 = 0.0;
    return m;
}

void MembraneModel::certify(double range, int samples) {
    if (!enabled)
        throw std::logic_error("membrane: cannot certify a disabled model");
    if (samples < 2) throw std::invalid_argument("membrane: samples must be >= 2");

    sc = StructuralConstants{};
    sc.cert_range = range;
    sc.c_I3 = 1.0;
    sc.c_I4 = 0.0;
    sc.c_H1 = -eps * gamma;
    sc.c_I_under = 0.5;

    const double h = 2.0 * range / (samples - 1);
    double sup_cI1 = 0.0, sup_cI2 = 0.0, sup_cH2 = 0.0, sup_negI1p = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double v = -range + i * h;
        const double i1 = cubic(v);
        sup_cI1 = std::max(sup_cI1, std::fabs(i1) / (1.0 + std::fabs(v * v * v)));
        if (v != 0.0)
            sup_cI2 = std::max(sup_cI2, (sc.c_I_under * v * v * v * v - i1 * v) / (v * v));
        const double hv = eps * kappa * v;
        sup_cH2 = std::max(sup_cH2, hv * hv / (1.0 + v * v));
        const double i1p = a + v * (-2.0 * (1.0 + a) + 3.0 * v);
        sup_negI1p = std::max(sup_negI1p, -i1p);
    }
    sc.c_I1 = padded(sup_cI1);
    sc.c_I2 = padded(std::max(0.0, sup_cI2));
    sc.c_H2 = padded(sup_cH2);
    sc.pair_K = padded(sup_negI1p + 0.5 * std::fabs(eps * kappa - 1.0));

    // dissipation split with C1 fixed at half the quartic coefficient
    sc.C1 = 0.5;
    sc.C3 = 0.0;
    const int ns = 2001;
    const double hh = 2.0 * range / (ns - 1);
    double sup_C2 = 0.0;
    for (int i = 0; i < ns; ++i) {
        const double v = -range + i * hh;
        for (int j = 0; j < ns; ++j) {
            const double w = -range + j * hh;
            const double r2 = v * v + w * w;
            if (r2 == 0.0) continue;
            const double lhs = w * gating_rhs(v, w) - v * ion_current(v, w);
            sup_C2 = std::max(sup_C2, (lhs + sc.C1 * v * v * v * v) / r2);
        }
    }
    sc.C2 = padded(std::max(0.0, sup_C2));
}

double MembraneModel::dissipation_bound(double v, double w) const {
    if (!enabled)
        throw std::logic_error("membrane: dissipation bound needs a certified model");
    const double lhs = w * gating_rhs(v, w) - v * ion_current(v, w);
    return (-sc.C1 * v * v * v * v + sc.C2 * (v * v + w * w) + sc.C3) - lhs;
}

double MembraneModel::pairing_gap(double v1, double w1, double v2, double w2) const {
    if (!enabled)
        throw std::logic_error("membrane: pairing gap needs a certified model");
    const double dv = v1 - v2, dw = w1 - w2;
    const double lhs = (gating_rhs(v1, w1) - gating_rhs(v2, w2)) * dw -
                       (ion_current(v1, w1) - ion_current(v2, w2)) * dv;
    return sc.pair_K * (dv * dv + dw * dw) - lhs;
}

StructuralReport check_structural_bounds(const MembraneModel& model, double v_min,
                                         double v_max, int samples) {
    if (!model.enabled)
        throw std::logic_error("membrane: structural check needs a certified model");
    if (samples < 2) throw std::invalid_argument("check_structural_bounds: samples >= 2");
    if (v_max < v_min) std::swap(v_min, v_max);

    const auto& sc = model.sc;
    StructuralReport rep;
    rep.bounds = {{"cubic_growth", std::numeric_limits<double>::infinity(), 0.0},
                  {"cubic_coercivity", std::numeric_limits<double>::infinity(), 0.0},
                  {"gating_growth", std::numeric_limits<double>::infinity(), 0.0}};

    const double h = samples > 1 ? (v_max - v_min) / (samples - 1) : 0.0;
    for (int i = 0; i < samples; ++i) {
        const double v = v_min + i * h;
        const double i1 = model.cubic(v);
        const double hv = model.eps * model.kappa * v;
        const double m0 = sc.c_I1 * (1.0 + std::fabs(v * v * v)) - std::fabs(i1);
        const double m1 = i1 * v - (sc.c_I_under * v * v * v * v - sc.c_I2 * v * v);
        const double m2 = sc.c_H2 * (1.0 + v * v) - hv * hv;
        const double ms[3] = {m0, m1, m2};
        for (int k = 0; k < 3; ++k) {
            if (ms[k] < rep.bounds[k].margin) {
                rep.bounds[k].margin = ms[k];
                rep.bounds[k].at_v = v;
            }
        }
    }
    return rep;
}

}  // namespace bidomain
