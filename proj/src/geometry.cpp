#include "bidomain/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bidomain {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

const char* Domain::face_name(int axis, int side) {
    static const char* names[2][2] = {{"x-", "x+"}, {"y-", "y+"}};
    return names[axis][side];
}

bool Domain::has_dirichlet() const {
    for (int a = 0; a < dim; ++a)
        for (int s = 0; s < 2; ++s)
            if (bc[a][s] == Bc::Dirichlet) return true;
    return false;
}

void Domain::validate() const {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("domain: dim must be 1 or 2");
    for (int a = 0; a < dim; ++a)
        if (!(lengths[a] > 0.0))
            throw std::invalid_argument("domain: lengths must be strictly positive");
    if (!has_dirichlet())
        throw std::invalid_argument("domain: dirichlet_faces must be nonempty");
}

void gauss_legendre(int q, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(q);
    weights.resize(q);
    for (int i = 0; i < q; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (q + 0.5));
        double p0 = 0, dp = 0;
        for (int it = 0; it < 100; ++it) {
            p0 = 1.0;
            double p1 = 0.0;
            for (int j = 0; j < q; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) * t * p1 - j * p2) / (j + 1);
            }
            dp = q * (t * p0 - p1) / (t * t - 1.0);
            double step = p0 / dp;
            t -= step;
            if (std::fabs(step) < 1e-15) break;
        }
        p0 = 1.0;
        double p1 = 0.0;
        for (int j = 0; j < q; ++j) {
            double p2 = p1;
            p1 = p0;
            p0 = ((2 * j + 1) * t * p1 - j * p2) / (j + 1);
        }
        dp = q * (t * p0 - p1) / (t * t - 1.0);
        nodes[i] = t;
        weights[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    // nodes come out descending in this recurrence; sort ascending
    std::vector<std::pair<double, double>> nw(q);
    for (int i = 0; i < q; ++i) nw[i] = {nodes[i], weights[i]};
    std::sort(nw.begin(), nw.end());
    for (int i = 0; i < q; ++i) {
        nodes[i] = nw[i].first;
        weights[i] = nw[i].second;
    }
}

namespace {

// Eigenfamilies on [0,L] for the four boundary pairs.
// D-D: sin(p pi x/L), p>=1.  D-N: sin((p-1/2) pi x/L), p>=1.
// N-D: cos((p-1/2) pi x/L), p>=1.  N-N: cos(p pi x/L), p>=0.
AxisMode make_axis_mode(Bc low, Bc high, double L, int k) {
    AxisMode m;
    if (low == Bc::Dirichlet && high == Bc::Dirichlet) {
        m.index = k + 1;
        m.frequency = m.index * kPi / L;
        m.cosine = false;
        m.norm = std::sqrt(2.0 / L);
    } else if (low == Bc::Dirichlet && high == Bc::Neumann) {
        m.index = k + 1;
        m.frequency = (m.index - 0.5) * kPi / L;
        m.cosine = false;
        m.norm = std::sqrt(2.0 / L);
    } else if (low == Bc::Neumann && high == Bc::Dirichlet) {
        m.index = k + 1;
        m.frequency = (m.index - 0.5) * kPi / L;
        m.cosine = true;
        m.norm = std::sqrt(2.0 / L);
    } else {
        m.index = k;  // constant mode first
        m.frequency = m.index * kPi / L;
        m.cosine = true;
        m.norm = m.index == 0 ? std::sqrt(1.0 / L) : std::sqrt(2.0 / L);
    }
    m.mu = m.frequency * m.frequency;
    return m;
}

double axis_value(const AxisMode& m, double x) {
    return m.norm * (m.cosine ? std::cos(m.frequency * x) : std::sin(m.frequency * x));
}

double axis_derivative(const AxisMode& m, double x) {
    if (m.cosine) return -m.norm * m.frequency * std::sin(m.frequency * x);
    return m.norm * m.frequency * std::cos(m.frequency * x);
}

}  // namespace

BasisSet build_basis(const Domain& domain, int n, int quad_points) {
    domain.validate();
    if (n < 1) throw std::invalid_argument("build_basis: n must be >= 1");

    BasisSet b;
    b.domain = domain;
    b.n = n;

    // candidate per-axis families; n modes per axis always suffice for the
    // n smallest tensor eigenvalues
    for (int a = 0; a < domain.dim; ++a) {
        b.axis_modes_[a].reserve(n);
        for (int k = 0; k < n; ++k)
            b.axis_modes_[a].push_back(
                make_axis_mode(domain.bc[a][0], domain.bc[a][1], domain.lengths[a], k));
    }

    struct Candidate {
        double lambda;
        std::array<int, 2> idx;  // positions within axis_modes_
    };
    std::vector<Candidate> cands;
    if (domain.dim == 1) {
        for (int k = 0; k < n; ++k)
            cands.push_back({b.axis_modes_[0][k].mu, {k, 0}});
    } else {
        for (int k0 = 0; k0 < n; ++k0)
            for (int k1 = 0; k1 < n; ++k1)
                cands.push_back({b.axis_modes_[0][k0].mu + b.axis_modes_[1][k1].mu, {k0, k1}});
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& u, const Candidate& v) {
        if (u.lambda != v.lambda) return u.lambda < v.lambda;
        return u.idx < v.idx;
    });
    cands.resize(n);

    b.modes.resize(n);
    b.eigenvalues.resize(n);
    for (int l = 0; l < n; ++l) {
        b.modes[l] = cands[l].idx;
        b.eigenvalues[l] = cands[l].lambda;
    }

    // quadrature sizing off the highest retained frequency index per axis
    std::array<int, 2> qpts{0, 0};
    for (int a = 0; a < domain.dim; ++a) {
        int maxidx = 0;
        for (int l = 0; l < n; ++l)
            maxidx = std::max(maxidx, b.axis_modes_[a][b.modes[l][a]].index);
        qpts[a] = quad_points > 0 ? quad_points : 2 * maxidx + 10;
        qpts[a] = std::max(qpts[a], 5);
    }

    for (int a = 0; a < domain.dim; ++a) {
        std::vector<double> xs, ws;
        gauss_legendre(qpts[a], xs, ws);
        const double L = domain.lengths[a];
        b.quad.axis_nodes[a].resize(qpts[a]);
        b.quad.axis_weights[a].resize(qpts[a]);
        for (int i = 0; i < qpts[a]; ++i) {
            b.quad.axis_nodes[a][i] = 0.5 * L * (xs[i] + 1.0);
            b.quad.axis_weights[a][i] = 0.5 * L * ws[i];
        }
    }

    const int Q = domain.dim == 1 ? qpts[0] : qpts[0] * qpts[1];
    b.quad.points.resize(Q, domain.dim);
    b.quad.weights.resize(Q);
    if (domain.dim == 1) {
        for (int i = 0; i < Q; ++i) {
            b.quad.points(i, 0) = b.quad.axis_nodes[0][i];
            b.quad.weights(i) = b.quad.axis_weights[0][i];
        }
    } else {
        int q = 0;
        for (int i = 0; i < qpts[0]; ++i)
            for (int j = 0; j < qpts[1]; ++j, ++q) {
                b.quad.points(q, 0) = b.quad.axis_nodes[0][i];
                b.quad.points(q, 1) = b.quad.axis_nodes[1][j];
                b.quad.weights(q) = b.quad.axis_weights[0][i] * b.quad.axis_weights[1][j];
            }
    }

    b.values.resize(n, Q);
    for (int a = 0; a < domain.dim; ++a) b.gradients[a].resize(n, Q);
    for (int l = 0; l < n; ++l) {
        for (int q = 0; q < Q; ++q) {
            double x[2] = {b.quad.points(q, 0), domain.dim == 2 ? b.quad.points(q, 1) : 0.0};
            double val = 1.0;
            for (int a = 0; a < domain.dim; ++a)
                val *= axis_value(b.axis_modes_[a][b.modes[l][a]], x[a]);
            b.values(l, q) = val;
            for (int a = 0; a < domain.dim; ++a) {
                double g = 1.0;
                for (int aa = 0; aa < domain.dim; ++aa) {
                    const AxisMode& m = b.axis_modes_[aa][b.modes[l][aa]];
                    g *= (aa == a) ? axis_derivative(m, x[aa]) : axis_value(m, x[aa]);
                }
                b.gradients[a](l, q) = g;
            }
        }
    }
    return b;
}

double BasisSet::mode_value(int l, const double* x) const {
    double val = 1.0;
    for (int a = 0; a < domain.dim; ++a)
        val *= axis_value(axis_modes_[a][modes[l][a]], x[a]);
    return val;
}

VectorXd BasisSet::mode_gradient_at(int l, const double* x) const {
    VectorXd g(domain.dim);
    for (int a = 0; a < domain.dim; ++a) {
        double v = 1.0;
        for (int aa = 0; aa < domain.dim; ++aa) {
            const AxisMode& m = axis_modes_[aa][modes[l][aa]];
            v *= (aa == a) ? axis_derivative(m, x[aa]) : axis_value(m, x[aa]);
        }
        g(a) = v;
    }
    return g;
}

VectorXd BasisSet::project(const std::function<double(const double*)>& f) const {
    const int Q = quad.size();
    VectorXd fq(Q);
    for (int q = 0; q < Q; ++q) {
        double x[2] = {quad.points(q, 0), domain.dim == 2 ? quad.points(q, 1) : 0.0};
        fq(q) = f(x);
    }
    return values * quad.weights.cwiseProduct(fq);
}

VectorXd BasisSet::evaluate(const VectorXd& coeffs, const MatrixXd& points) const {
    if (coeffs.size() != n)
        throw std::invalid_argument("evaluate: coefficient length mismatch");
    VectorXd out(points.rows());
    for (Eigen::Index p = 0; p < points.rows(); ++p) {
        double x[2] = {points(p, 0), domain.dim == 2 ? points(p, 1) : 0.0};
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += coeffs(l) * mode_value(l, x);
        out(p) = s;
    }
    return out;
}

MatrixXd BasisSet::mass_matrix() const {
    return values * quad.weights.asDiagonal() * values.transpose();
}

double ConductivityField::ellipticity_lower() const {
    return std::min({sigma_l_i, sigma_t_i, sigma_l_e, sigma_t_e});
}

double ConductivityField::ellipticity_upper() const {
    return std::max({sigma_l_i, sigma_t_i, sigma_l_e, sigma_t_e});
}

Eigen::Vector2d ConductivityField::fiber(const Domain& dom, const double* x) const {
    double theta = fiber_angle;
    if (fiber_twist != 0.0) theta += fiber_twist * (x[0] / dom.lengths[0]);
    return {std::cos(theta), std::sin(theta)};
}

Eigen::Matrix2d ConductivityField::tensor(Tissue which, const Domain& dom,
                                          const double* x) const {
    const double sl = which == Tissue::Intra ? sigma_l_i : sigma_l_e;
    const double st = which == Tissue::Intra ? sigma_t_i : sigma_t_e;
    Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
    if (dom.dim == 1) {
        M(0, 0) = sl;
        return M;
    }
    if (kind == Kind::Constant) {
        M(0, 0) = sl;
        M(1, 1) = st;
        return M;
    }
    Eigen::Vector2d a = fiber(dom, x);
    M = st * Eigen::Matrix2d::Identity() + (sl - st) * (a * a.transpose());
    return M;
}

bool ConductivityField::proportional(double& lambda) const {
    const double rel = 1e-12;
    if (sigma_t_e == 0.0 || sigma_l_e == 0.0) return false;
    const double lam_t = sigma_t_i / sigma_t_e;
    const double lam_l = sigma_l_i / sigma_l_e;
    if (std::fabs(lam_t - lam_l) > rel * std::max(std::fabs(lam_t), std::fabs(lam_l)))
        return false;
    lambda = lam_t;
    return true;
}

void ConductivityField::validate() const {
    for (double s : {sigma_l_i, sigma_t_i, sigma_l_e, sigma_t_e})
        if (!(s > 0.0))
            throw std::invalid_argument("conductivity: all sigma values must be positive");
}

MatrixXd assemble_stiffness(const BasisSet& basis, const ConductivityField& cond,
                            Tissue which) {
    cond.validate();
    const int n = basis.n;
    const int Q = basis.quad.size();
    const int dim = basis.domain.dim;

    // M(x_q) grad(e_m)(x_q), tabulated per axis
    std::array<MatrixXd, 2> mg;
    for (int a = 0; a < dim; ++a) mg[a].resize(n, Q);
    for (int q = 0; q < Q; ++q) {
        double x[2] = {basis.quad.points(q, 0),
                       dim == 2 ? basis.quad.points(q, 1) : 0.0};
        Eigen::Matrix2d M = cond.tensor(which, basis.domain, x);
        for (int m = 0; m < n; ++m) {
            if (dim == 1) {
                mg[0](m, q) = M(0, 0) * basis.gradients[0](m, q);
            } else {
                double g0 = basis.gradients[0](m, q), g1 = basis.gradients[1](m, q);
                mg[0](m, q) = M(0, 0) * g0 + M(0, 1) * g1;
                mg[1](m, q) = M(1, 0) * g0 + M(1, 1) * g1;
            }
        }
    }

    MatrixXd K = MatrixXd::Zero(n, n);
    for (int l = 0; l < n; ++l) {
        for (int m = l; m < n; ++m) {
            double s = 0.0;
            for (int q = 0; q < Q; ++q) {
                double dot = basis.gradients[0](l, q) * mg[0](m, q);
                if (dim == 2) dot += basis.gradients[1](l, q) * mg[1](m, q);
                s += basis.quad.weights(q) * dot;
            }
            K(l, m) = s;
            K(m, l) = s;
        }
    }
    return K;
}

}  // namespace bidomain
